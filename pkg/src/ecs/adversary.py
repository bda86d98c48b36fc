"""Adversarial choice of arbitrary points, at desk scale.

The impossibility arguments pick every arbitrary point from a dense set X
that avoids the forbidden object and is closed under the allowed moves, so
every branch built this way avoids it too.  Here X is approximated by the
image of a small closure of rational grid points under a fixed map:

* :func:`hilbert_x_provider`: ``X = g o f_p^-1 (X')`` with ``X'`` closed
  under lines and the fixed circle.  Its points never hit the centre because
  ``f_p(c) = p`` has a transcendental coordinate.
* :func:`unit_x_provider`: ``X = alpha * X'`` with ``alpha`` clear of every
  inverse distance of ``X'``.
* :func:`origin_x_provider`: ``X = X' + a`` with a shift keeping ``X`` off the origin.

None of this proves the universal statements.  It runs the mechanism on
finitely many branches, and :class:`AdversaryReport` says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .closure import PointSet, e_closure, h_closure, scale_avoiding_unit, translate_avoiding_origin
from .errors import LocationUnreachable, UnsupportedLocation
from .geometry import Circle, Point, distance, get_tolerance, intersect, line_through, same_curve
from .maps import Affine, StrommerRotated, transfer_map
from .model import (
    GENERAL,
    STRAIGHTEDGE,
    AdversaryX,
    Choose,
    ConstructionProgram,
    Disc,
    End,
    NewCircle,
    NewIntersection,
    NewLine,
    NewLocation,
    Trace,
    execute,
    is_curve,
    is_location,
)

UNIVERSAL_NOTE = (
    "finite-scale demonstration: one branch per run, X approximated by a finite closure of rational grid points; "
    "the theorem's claim over all branches is not reproduced"
)

# ---------------------------------------------------------------------------
# forbidden sets


@dataclass(frozen=True)
class ForbiddenPoint:
    point: Point
    tol: float = 1e-9
    label: str = "point"

    def witness(self, trace: Trace):
        for n, item in enumerate(trace.word):
            if isinstance(item, Point) and distance(item, self.point) <= self.tol:
                return n, item
        return None


@dataclass(frozen=True)
class ForbiddenUnitDistance:
    tol: float = 1e-9
    label: str = "unit"

    def witness(self, trace: Trace):
        idx = [n for n, x in enumerate(trace.word) if isinstance(x, Point)]
        if len(idx) < 2:
            return None
        xy = np.array([tuple(trace.word[n]) for n in idx])
        i, j = np.triu_indices(len(idx), 1)
        d = np.hypot(xy[i, 0] - xy[j, 0], xy[i, 1] - xy[j, 1])
        hit = np.flatnonzero(np.abs(d - 1.0) <= self.tol)
        if len(hit):
            a, b = idx[i[hit[0]]], idx[j[hit[0]]]
            return (a, b), (trace.word[a], trace.word[b])
        return None


# ---------------------------------------------------------------------------
# providers


def _affine_xy(m: Affine, xy: np.ndarray) -> np.ndarray:
    m00, m01, m10, m11 = m.m
    return np.stack([m00 * xy[:, 0] + m01 * xy[:, 1] + m.t[0], m10 * xy[:, 0] + m11 * xy[:, 1] + m.t[1]], axis=1)


def _strommer_xy(xy: np.ndarray, eps: float) -> np.ndarray:
    out = np.full_like(xy, np.nan)
    ok = np.abs(xy[:, 0]) > eps
    out[ok, 0] = 1.0 / xy[ok, 0]
    out[ok, 1] = xy[ok, 1] / xy[ok, 0]
    return out


@dataclass
class XProvider:
    """Supplies points of a fixed dense set X inside requested discs.

    ``from_base`` maps base-frame points (rational grid closures) into the
    world, returning NaN rows where undefined; ``to_base`` is its inverse on
    single points.  ``pool`` closes a few grid seeds; ``guard`` certifies a
    world point (e.g. it is not the centre).  Not thread-safe: the grid and
    statistics are mutable.
    """

    name: str
    from_base: Callable[[np.ndarray], np.ndarray]
    to_base: Callable[[Point], Optional[Point]]
    pool: Callable[[np.ndarray], PointSet]
    guard: Callable[[np.ndarray], np.ndarray]
    base_guard: Optional[Callable[[np.ndarray], np.ndarray]] = None
    seed: int = 0
    h0: float = 0.25
    max_refine: int = 30
    description: str = ""
    info: dict = field(default_factory=dict)
    stats: dict = field(default_factory=lambda: {"calls": 0, "refinements": 0, "max_level": 0, "pool_points": 0})

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)
        self._cache: dict = {}

    def _base_center(self, loc: Disc) -> Point:
        for k in range(64):
            ang = 2.399963 * k  # golden-angle spiral inside the disc
            rad = loc.radius * 0.5 * math.sqrt(k / 64)
            q = Point(loc.center.x + rad * math.cos(ang), loc.center.y + rad * math.sin(ang))
            b = self.to_base(q)
            if b is not None:
                return b
        raise LocationUnreachable(f"{loc} has no point with a base-frame preimage")

    def _pool(self, seeds: np.ndarray, level: int) -> tuple[np.ndarray, np.ndarray]:
        key = (level, seeds.tobytes())
        if key not in self._cache:
            ps = self.pool(seeds)
            world = self.from_base(ps.xy)
            self._cache[key] = (ps.xy, world)
            self.stats["pool_points"] += len(ps)
        return self._cache[key]

    def point_in(self, loc) -> Point:
        if not isinstance(loc, Disc):
            raise UnsupportedLocation(
                f"{type(loc).__name__} locations are outside the disc system this provider serves; "
                "the impossibility argument only covers classical (disc) arbitrary points"
            )
        self.stats["calls"] += 1
        b = self._base_center(loc)
        for level in range(self.max_refine):
            h = self.h0 / 2**level
            gx, gy = math.floor(b.x / h), math.floor(b.y / h)
            cells = np.array([(gx + i, gy + j) for i in (0, 1) for j in (0, 1)], dtype=float) * h
            order = np.argsort(np.hypot(cells[:, 0] - b.x, cells[:, 1] - b.y), kind="stable")
            seeds = cells[order[:3]]
            base, world = self._pool(seeds, level)
            d = np.hypot(world[:, 0] - loc.center.x, world[:, 1] - loc.center.y)
            inside = np.isfinite(d) & (d < loc.radius * (1 - 1e-9))
            inside &= self.guard(world)
            if self.base_guard is not None:
                inside &= self.base_guard(base)
            cand = np.flatnonzero(inside)
            if len(cand):
                self.stats["refinements"] += level
                self.stats["max_level"] = max(self.stats["max_level"], level)
                x, y = world[cand[self.rng.integers(len(cand))]]
                return Point(x, y)
        raise LocationUnreachable(f"no point of X found in {loc} after {self.max_refine} grid refinements")


HILBERT_A = 2.0
HILBERT_CIRCLE = Circle(Point(HILBERT_A, 0.0), math.sqrt(HILBERT_A**2 - 1))


def hilbert_p(a: float = HILBERT_A, theta: float = 1.0) -> Point:
    """Point of ``k0`` at rotation angle ``theta``; transcendental for algebraic ``a`` and ``theta = 1``."""
    r = a - 1.0 / a
    return Point(a - r * math.cos(theta), -r * math.sin(theta))


def hilbert_x_provider(k: Circle, depth: int = 2, seed: int = 0, theta: float = 1.0) -> XProvider:
    """Provider whose points never coincide with the centre of ``k``.

    Base frame: the canonical circle ``(x-2)**2 + y**2 = 3``.  World points are
    ``g(f_p^-1(q))`` where ``g`` carries the canonical circle to ``k`` and ``q``
    ranges over an H-closure of grid points.  ``f_p^-1(q)`` is the canonical
    centre only for ``q = p``, which no closure point equals.
    """
    fp = StrommerRotated(HILBERT_A, hilbert_p(HILBERT_A, theta))
    g = transfer_map(HILBERT_CIRCLE, k)
    g_aff = Affine(*_compose_affine(g))
    g_inv = g_aff.inverse()
    phi, phi_inv = fp.rotation, fp.rotation.inverse()
    p = fp.p
    eps = get_tolerance().eps_abs

    def from_base(xy: np.ndarray) -> np.ndarray:
        return _affine_xy(g_aff, _strommer_xy(_affine_xy(phi_inv, xy), eps))

    def to_base(w: Point) -> Optional[Point]:
        u = g_inv.apply_point(w)
        if abs(u.x) <= 1e-6:
            return None
        return phi.apply_point(Point(1.0 / u.x, u.y / u.x))

    def pool(seeds: np.ndarray) -> PointSet:
        return h_closure(seeds, HILBERT_CIRCLE, depth)

    c = k.center

    def guard(world: np.ndarray) -> np.ndarray:
        return np.hypot(world[:, 0] - c.x, world[:, 1] - c.y) > 1e-9

    def base_guard(xy: np.ndarray) -> np.ndarray:
        return np.hypot(xy[:, 0] - p.x, xy[:, 1] - p.y) > 1e-9

    return XProvider(
        "hilbert",
        from_base,
        to_base,
        pool,
        guard,
        base_guard,
        seed=seed,
        description=f"X = g(f_p^-1(H-closure of grid, depth {depth})), a=2, p at angle {theta}",
        info={"p": p, "center": c, "depth": depth},
    )


def _compose_affine(comp) -> tuple:
    """Flatten a composite of affine maps into ``(m, t)``."""
    m = (1.0, 0.0, 0.0, 1.0)
    t = (0.0, 0.0)
    for a in reversed(comp.maps):
        a00, a01, a10, a11 = a.m
        m00, m01, m10, m11 = m
        m = (a00 * m00 + a01 * m10, a00 * m01 + a01 * m11, a10 * m00 + a11 * m10, a10 * m01 + a11 * m11)
        t = (a00 * t[0] + a01 * t[1] + a.t[0], a10 * t[0] + a11 * t[1] + a.t[1])
    return m, t


UNIT_ALPHA = math.e / 2  # transcendental, so 1/alpha is no distance between algebraic points
ORIGIN_SHIFT = (math.e / 7, math.pi / 9)


def _reference_pool(depth: int) -> PointSet:
    return e_closure([(0.0, 0.0), (0.25, 0.0), (0.0, 0.25)], depth)


def unit_x_provider(depth: int = 1, seed: int = 0) -> XProvider:
    """Provider for ``X = alpha * X'``; no two points of X are at distance 1."""
    alpha, _ = scale_avoiding_unit(_reference_pool(depth), preferred=(UNIT_ALPHA,))

    def pool(seeds: np.ndarray) -> PointSet:
        return e_closure(seeds, depth)

    return XProvider(
        "unit",
        lambda xy: xy * alpha,
        lambda w: Point(w.x / alpha, w.y / alpha),
        pool,
        lambda world: np.ones(len(world), dtype=bool),
        seed=seed,
        description=f"X = alpha * E-closure(grid, depth {depth}), alpha = {alpha!r}",
        info={"alpha": alpha, "depth": depth},
    )


def origin_x_provider(depth: int = 1, seed: int = 0) -> XProvider:
    """Provider for ``X = X' + a``; the origin is not in X."""
    shift, _ = translate_avoiding_origin(_reference_pool(depth), shifts=[ORIGIN_SHIFT])
    dx, dy = shift.t

    def pool(seeds: np.ndarray) -> PointSet:
        return e_closure(seeds, depth)

    return XProvider(
        "origin",
        lambda xy: xy + np.array([dx, dy]),
        lambda w: Point(w.x - dx, w.y - dy),
        pool,
        lambda world: np.hypot(world[:, 0], world[:, 1]) > 1e-9,
        seed=seed,
        description=f"X = E-closure(grid, depth {depth}) + ({dx!r}, {dy!r})",
        info={"shift": (dx, dy), "depth": depth},
    )


# ---------------------------------------------------------------------------
# running the adversary


@dataclass
class AdversaryReport:
    trace: Optional[Trace]
    avoided: bool
    witness: object
    provider: str
    provider_stats: dict
    note: str = UNIVERSAL_NOTE

    def summary(self) -> str:
        head = f"avoided={'true' if self.avoided else 'false'}"
        if self.witness is not None:
            head += f" witness={self.witness}"
        return head


def adversary_run(program: ConstructionProgram, forbidden, provider: XProvider) -> AdversaryReport:
    """Execute ``program`` choosing every arbitrary point through ``provider``.

    :class:`UnsupportedLocation` propagates when the program asks for a
    location the provider cannot serve.
    """
    trace = execute(program, AdversaryX(provider))
    w = forbidden.witness(trace)
    return AdversaryReport(trace, w is None, w, provider.name, dict(provider.stats))


# ---------------------------------------------------------------------------
# random scripts


def _pick_pair(rng, idx: list[int]):
    a, b = rng.choice(len(idx), size=2, replace=False)
    return idx[a], idx[b]


def random_program(
    seed: int,
    kind: str = STRAIGHTEDGE,
    root: tuple = (),
    max_letters: int = 30,
    region: Circle = Circle(Point(0.0, 0.0), 1.0),
    min_points: int = 3,
) -> ConstructionProgram:
    """A random non-uniform program whose steps are drawn on the fly.

    Each step is decided by a generator seeded with ``(seed, len(word))``, so
    the program is a fixed function of the word.  Only feasible steps are
    emitted: lines through distinct points, circles of positive radius and
    intersections that exist.  Arbitrary points come from discs near
    ``region``.  ``kind`` is ``straightedge`` or ``general``.
    """
    n0 = len(root)
    cx, cy, r = region.center.x, region.center.y, region.radius
    eps = 1e-7

    def new_disc(rng) -> NewLocation:
        ox, oy = rng.uniform(-1.2, 1.2, size=2)
        return NewLocation(Disc(Point(cx + r * ox, cy + r * oy), r * rng.uniform(0.05, 0.4)))

    def next_step(word) -> object:
        if word and is_location(word[-1]):
            return Choose()
        steps = len(word) - n0
        if steps >= max_letters:
            return End()
        rng = np.random.default_rng([seed, len(word)])
        pts = [n for n, x in enumerate(word) if isinstance(x, Point)]
        curves = [n for n, x in enumerate(word) if is_curve(x)]
        if len(pts) < min_points or steps >= max_letters - 1:
            return new_disc(rng) if steps < max_letters - 1 else End()
        moves = ["loc", "line", "meet", "meet"] + (["circle"] if kind == GENERAL else [])
        for _ in range(20):
            move = moves[rng.integers(len(moves))]
            if move == "loc":
                return new_disc(rng)
            if move == "line":
                i, j = _pick_pair(rng, pts)
                if distance(word[i], word[j]) > eps:
                    line = line_through(word[i], word[j])
                    if not any(same_curve(line, word[c]) for c in curves):
                        return NewLine(i, j)
            elif move == "circle":
                e = pts[rng.integers(len(pts))]
                f, g = _pick_pair(rng, pts)
                if distance(word[f], word[g]) > eps:
                    return NewCircle(e, f, g)
            elif move == "meet" and len(curves) >= 2:
                i, j = _pick_pair(rng, curves)
                if same_curve(word[i], word[j]):
                    continue
                hits = intersect(word[i], word[j])
                if hits:
                    return NewIntersection(i, j, int(rng.integers(len(hits))))
        return new_disc(rng)

    return ConstructionProgram(
        root=tuple(root),
        next_step=next_step,
        declared_type=kind,
        max_steps=max_letters + 2,
        name=f"random-{kind}-{seed}",
    )

"""The real projective plane as antipodal pairs on the unit sphere.

A projective point is stored as one unit vector with a canonical sign (last
non-negligible coordinate positive), a projective line by its unit normal,
and a projective circle by an axis and a level ``a`` in (0, 1): the points
with ``|<x, axis>| = a``.

Linear maps of R^3 act on all of this.  The involution
``(x:y:z) -> (-sqrt2 x - z : y : x + sqrt2 z)`` fixes the circle with axis
(0, 0, 1) and level ``1/sqrt2`` while moving its centre; rotating afterwards
about the z-axis gives the family ``f_pr,p`` used by the projective
adversary below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .closure import h_closure
from .errors import (
    BadParameter,
    CoincidentPoints,
    IdenticalLines,
    LevelMismatch,
    LevelOutOfRange,
    LocationUnreachable,
    ZeroTriple,
)
from .geometry import Circle, Point

SQRT2 = math.sqrt(2.0)
_EPS = 1e-12


def _canonical(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = float(np.linalg.norm(v))
    if not math.isfinite(n) or n <= _EPS:
        raise ZeroTriple(f"{tuple(v)} is not a projective point")
    v = v / n
    for c in v[::-1]:
        if abs(c) > _EPS:
            if c < 0:
                v = -v
            break
    return v + 0.0


@dataclass(frozen=True, eq=False)
class ProjPoint:
    v: np.ndarray

    def __init__(self, v):
        object.__setattr__(self, "v", _canonical(v))

    def __iter__(self):
        return iter(float(c) for c in self.v)

    def __repr__(self):
        return "ProjPoint({:.12g}, {:.12g}, {:.12g})".format(*self.v)

    def isclose(self, other: "ProjPoint", tol: float = 1e-9) -> bool:
        return bool(min(np.linalg.norm(self.v - other.v), np.linalg.norm(self.v + other.v)) <= tol)

    def text(self) -> str:
        return " ".join(repr(float(c)) for c in self.v)


@dataclass(frozen=True, eq=False)
class ProjLine:
    n: np.ndarray

    def __init__(self, n):
        object.__setattr__(self, "n", _canonical(n))

    def __repr__(self):
        return "ProjLine({:.12g}, {:.12g}, {:.12g})".format(*self.n)

    def contains(self, p: ProjPoint, tol: float = 1e-9) -> bool:
        return abs(float(self.n @ p.v)) <= tol

    def same_as(self, other: "ProjLine", tol: float = 1e-9) -> bool:
        return ProjPoint(self.n).isclose(ProjPoint(other.n), tol)


@dataclass(frozen=True, eq=False)
class ProjCircle:
    axis: np.ndarray
    level: float

    def __init__(self, axis, level: float):
        if not 0.0 < level < 1.0:
            raise LevelOutOfRange(f"level must lie in (0, 1), got {level}")
        object.__setattr__(self, "axis", _canonical(axis))
        object.__setattr__(self, "level", float(level))

    def __repr__(self):
        return "ProjCircle(axis=({:.12g}, {:.12g}, {:.12g}), level={:.12g})".format(*self.axis, self.level)

    @property
    def center(self) -> ProjPoint:
        return ProjPoint(self.axis)

    @property
    def radius(self) -> float:
        """Spherical radius ``arccos(level)`` of either cap boundary."""
        return math.acos(self.level)

    def value(self, p: ProjPoint) -> float:
        return abs(float(self.axis @ p.v)) - self.level

    def contains(self, p: ProjPoint, tol: float = 1e-9) -> bool:
        return abs(self.value(p)) <= tol

    def sample(self, rng: np.random.Generator, n: int = 1) -> list[ProjPoint]:
        u, w = _orthonormal_pair(self.axis)
        t = rng.uniform(0.0, 2 * math.pi, size=n)
        s = math.sqrt(1 - self.level**2)
        return [ProjPoint(self.level * self.axis + s * (math.cos(a) * u + math.sin(a) * w)) for a in t]


@dataclass(frozen=True, eq=False)
class ProjDisc:
    axis: np.ndarray
    level: float

    def __init__(self, axis, level: float):
        if not 0.0 < level < 1.0:
            raise LevelOutOfRange(f"level must lie in (0, 1), got {level}")
        object.__setattr__(self, "axis", _canonical(axis))
        object.__setattr__(self, "level", float(level))

    def contains(self, p: ProjPoint) -> bool:
        return abs(float(self.axis @ p.v)) > self.level


def _orthonormal_pair(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.eye(3)[int(np.argmin(np.abs(n)))]
    u = np.cross(n, e)
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)


# ---------------------------------------------------------------------------
# incidence


def proj_line_through(p: ProjPoint, q: ProjPoint, tol: float = 1e-12) -> ProjLine:
    n = np.cross(p.v, q.v)
    if np.linalg.norm(n) <= tol:
        raise CoincidentPoints(f"{p} and {q} are the same projective point")
    return ProjLine(n)


def proj_intersect_lines(l1: ProjLine, l2: ProjLine, tol: float = 1e-12) -> ProjPoint:
    """The unique common point; there are no parallels."""
    v = np.cross(l1.n, l2.n)
    if np.linalg.norm(v) <= tol:
        raise IdenticalLines(f"{l1} and {l2} are the same projective line")
    return ProjPoint(v)


def proj_intersect_line_circle(
    line: ProjLine, k: ProjCircle, sphere: bool = False, tol: float = 1e-9
) -> list:
    """Common points of a line and a circle, sorted by canonical representative.

    Gives 0, 1 (tangent) or 2 projective points.  With ``sphere=True`` the
    antipodal pairs are expanded into unit vectors (0, 2 or 4 of them).
    """
    u, w = _orthonormal_pair(line.n)
    cu, cw = float(u @ k.axis), float(w @ k.axis)
    R = math.hypot(cu, cw)
    if R < k.level - tol:
        return []
    t0 = math.atan2(cw, cu)
    if abs(R - k.level) <= tol:
        angles = [t0]
    else:
        dt = math.acos(min(1.0, k.level / R))
        angles = [t0 - dt, t0 + dt]
    pts = sorted((ProjPoint(math.cos(t) * u + math.sin(t) * w) for t in angles), key=lambda p: tuple(p.v))
    if sphere:
        return [v for p in pts for v in (p.v.copy(), -p.v)]
    return pts


def proj_circle_from(p: ProjPoint, q: ProjPoint, r: ProjPoint, tol: float = 1e-12) -> Union[ProjCircle, ProjPoint]:
    """``k(p, q, r)``: centre ``p``, radius the spherical distance of ``q`` and ``r``.

    The distance of two projective points is ``arccos|<q, r>|`` (the nearer
    representatives), so the level is ``|<q, r>|``.
    """
    level = abs(float(q.v @ r.v))
    if level >= 1.0 - tol:
        return p
    if level <= tol:
        raise LevelOutOfRange("points at spherical distance pi/2 give no projective circle")
    return ProjCircle(p.v, level)


# ---------------------------------------------------------------------------
# the plane model z = 1, plus its line and point at infinity


def F(p: ProjPoint) -> tuple[float, float, float]:
    x, y, z = p.v
    if abs(z) > _EPS:
        return (x / z, y / z, 1.0)
    if abs(y) > _EPS:
        return (x / y, 1.0, 0.0)
    return (1.0, 0.0, 0.0)


def F_inv(t: Sequence[float]) -> ProjPoint:
    return ProjPoint(t)


# ---------------------------------------------------------------------------
# linear maps


@dataclass(frozen=True, eq=False)
class ProjMap:
    """A projective map given by an invertible 3x3 matrix."""

    m: np.ndarray

    def __init__(self, m):
        m = np.asarray(m, dtype=float).reshape(3, 3)
        if abs(np.linalg.det(m)) <= _EPS:
            raise BadParameter("singular matrix")
        object.__setattr__(self, "m", m)

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.m @ p.v)

    def apply_homogeneous(self, h: Sequence[float]) -> tuple[float, float, float]:
        v = np.asarray(h, dtype=float)
        if np.linalg.norm(v) <= _EPS:
            raise ZeroTriple("(0:0:0) is not a projective point")
        return tuple(float(c) for c in self.m @ v)

    def apply_line(self, line: ProjLine) -> ProjLine:
        return ProjLine(np.linalg.inv(self.m).T @ line.n)

    def apply_xy(self, vs: np.ndarray) -> np.ndarray:
        """Rows of unit vectors in, canonical unit rows out."""
        out = vs @ self.m.T
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        return out

    def inverse(self) -> "ProjMap":
        return ProjMap(np.linalg.inv(self.m))

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(self.m @ other.m)


def general_f0_bar(a: float) -> ProjMap:
    """Projectivised ``sigma o f o sigma^-1`` with ``sigma(x, y) = (x - a, y)``.

    Fixes the circle ``x**2 + y**2 = a**2 - 1`` of the plane z = 1, which is
    the projective circle with axis (0, 0, 1) and level ``1/a``.
    """
    if not a > 1:
        raise BadParameter(f"parameter must exceed 1, got {a}")
    return ProjMap([[-a, 0.0, 1.0 - a * a], [0.0, 1.0, 0.0], [1.0, 0.0, a]])


F0_BAR = general_f0_bar(SQRT2)


def f0_bar(h: Sequence[float]) -> tuple[float, float, float]:
    """``(x:y:z) -> (-sqrt2 x - z : y : x + sqrt2 z)`` on homogeneous triples."""
    x, y, z = (float(c) for c in h)
    if x == y == z == 0:
        raise ZeroTriple("(0:0:0) is not a projective point")
    return (-SQRT2 * x - z, y, x + SQRT2 * z)


POLES = ProjPoint((0.0, 0.0, 1.0))
CANONICAL_K = ProjCircle((0.0, 0.0, 1.0), 1.0 / SQRT2)


def rotation_z(angle: float) -> ProjMap:
    c, s = math.cos(angle), math.sin(angle)
    return ProjMap([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_between(u: np.ndarray, v: np.ndarray) -> ProjMap:
    """Rotation of R^3 taking unit ``u`` to unit ``v`` (about their common normal)."""
    u, v = _canonical(u), _canonical(v)
    axis = np.cross(u, v)
    s, c = float(np.linalg.norm(axis)), float(u @ v)
    if s <= _EPS:
        if c > 0:
            return ProjMap(np.eye(3))
        # half turn about any axis perpendicular to u
        w, _ = _orthonormal_pair(u)
        return ProjMap(2 * np.outer(w, w) - np.eye(3))
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return ProjMap(np.eye(3) + s * K + (1 - c) * (K @ K))


@dataclass(frozen=True)
class FprFamily:
    """``f_pr`` for parameter ``a`` and its rotated versions ``f_pr,p``.

    ``k`` has axis (0, 0, 1) and level ``1/a``; ``c_prime = f_pr(c)``; ``k1``
    is the circle about ``c`` through ``c_prime``.
    """

    a: float = SQRT2

    @property
    def base(self) -> ProjMap:
        return general_f0_bar(self.a)

    @property
    def k(self) -> ProjCircle:
        return ProjCircle((0.0, 0.0, 1.0), 1.0 / self.a)

    @property
    def c_prime(self) -> ProjPoint:
        return self.base(POLES)

    @property
    def k1(self) -> ProjCircle:
        return ProjCircle((0.0, 0.0, 1.0), abs(float(self.c_prime.v[2])))

    def tau_angle(self, p: ProjPoint) -> float:
        cp = self.c_prime.v
        return math.atan2(p.v[1], p.v[0]) - math.atan2(cp[1], cp[0])

    def f_pr(self, p: Optional[ProjPoint] = None) -> ProjMap:
        """``tau_p o f_pr``; plain ``f_pr`` when ``p`` is None."""
        if p is None:
            return self.base
        if not self.k1.contains(p, 1e-9):
            raise BadParameter(f"{p} is not on k1")
        return rotation_z(self.tau_angle(p)) @ self.base

    def point_on_k1(self, angle: float) -> ProjPoint:
        """``c_prime`` turned by ``angle`` about the z-axis."""
        return rotation_z(angle)(self.c_prime)


def f_pr(p: ProjPoint, theta: Optional[float] = None) -> ProjPoint:
    """``F^-1 o f0_bar o F`` at ``p``, optionally followed by a turn of ``theta`` about the z-axis."""
    q = F0_BAR(F_inv(F(p)))
    return rotation_z(theta)(q) if theta is not None else q


def proj_transfer(k: ProjCircle, k2: ProjCircle, tol: float = 1e-9) -> ProjMap:
    """Rotation carrying ``k`` onto ``k2`` (centre onto centre)."""
    if abs(k.level - k2.level) > tol:
        raise LevelMismatch(f"levels differ: {k.level} vs {k2.level}")
    return rotation_between(k.axis, k2.axis)


# ---------------------------------------------------------------------------
# projective adversary


class ProjXProvider:
    """Points of ``X = g(f_pr,p^-1(X'))`` inside projective discs.

    ``X'`` is approximated in the plane z = 1 by an H-closure of rational grid
    points with respect to the circle ``x**2 + y**2 = a**2 - 1`` (the image of
    the base circle under ``F``).  Intersections on the line at infinity are
    dropped, one of the two deleted lines of the construction.
    """

    def __init__(self, k: ProjCircle, depth: int = 2, seed: int = 0, theta: float = 1.0, max_refine: int = 30):
        self.k = k
        self.family = FprFamily(1.0 / k.level)
        self.p = self.family.point_on_k1(theta)
        self.fp = self.family.f_pr(self.p)
        self.fp_inv = self.fp.inverse()
        self.g = proj_transfer(self.family.k, k)
        self.g_inv = self.g.inverse()
        self.plane_circle = Circle(Point(0.0, 0.0), math.sqrt(self.family.a**2 - 1))
        self.depth = depth
        self.max_refine = max_refine
        self.rng = np.random.default_rng(seed)
        self.stats = {"calls": 0, "max_level": 0}
        self._cache: dict = {}

    def point_in(self, disc: ProjDisc) -> ProjPoint:
        if not isinstance(disc, ProjDisc):
            from .errors import UnsupportedLocation

            raise UnsupportedLocation("the projective provider serves projective discs only")
        self.stats["calls"] += 1
        b = self.fp(self.g_inv(ProjPoint(disc.axis)))
        if abs(b.v[2]) < 1e-6:
            b = ProjPoint(b.v + np.array([0.0, 0.0, 1e-3]))
        bx, by = b.v[0] / b.v[2], b.v[1] / b.v[2]
        for level in range(self.max_refine):
            h = 0.25 / 2**level
            gx, gy = math.floor(bx / h), math.floor(by / h)
            cells = np.array([(gx + i, gy + j) for i in (0, 1) for j in (0, 1)], dtype=float) * h
            order = np.argsort(np.hypot(cells[:, 0] - bx, cells[:, 1] - by), kind="stable")
            seeds = cells[order[:3]]
            key = (level, seeds.tobytes())
            if key not in self._cache:
                ps = h_closure(seeds, self.plane_circle, self.depth)
                homog = np.column_stack([ps.xy, np.ones(len(ps))])
                homog /= np.linalg.norm(homog, axis=1, keepdims=True)
                base_ok = np.array([not ProjPoint(v).isclose(self.p) for v in homog])
                world = (self.g @ self.fp_inv).apply_xy(homog)
                self._cache[key] = (world, base_ok)
            world, base_ok = self._cache[key]
            inside = (np.abs(world @ disc.axis) > disc.level) & base_ok
            inside &= np.abs(np.abs(world @ self.k.axis) - 1.0) > 1e-9  # not the centre
            cand = np.flatnonzero(inside)
            if len(cand):
                self.stats["max_level"] = max(self.stats["max_level"], level)
                return ProjPoint(world[cand[self.rng.integers(len(cand))]])
        raise LocationUnreachable(f"no point of X in the projective disc after {self.max_refine} refinements")


@dataclass
class ProjAdversaryReport:
    letters: list
    avoided: bool
    witness: object
    provider_stats: dict


def projective_adversary_run(k: ProjCircle, seed: int = 0, steps: int = 30, depth: int = 2) -> ProjAdversaryReport:
    """A random straightedge projective construction from ``k``, points chosen adversarially.

    Moves: an arbitrary point in a random projective disc, the line through
    two points, the meet of two lines, or a line meeting ``k``.
    """
    rng = np.random.default_rng(seed)
    prov = ProjXProvider(k, depth=depth, seed=seed)
    letters: list = [k]
    centre = k.center
    for _ in range(steps):
        pts = [x for x in letters if isinstance(x, ProjPoint)]
        lines = [x for x in letters if isinstance(x, ProjLine)]
        move = "choose" if len(pts) < 3 else ["choose", "line", "meet", "cut"][rng.integers(4)]
        if move == "line":
            i, j = rng.choice(len(pts), 2, replace=False)
            if pts[i].isclose(pts[j]):
                continue
            ln = proj_line_through(pts[i], pts[j])
            if not any(ln.same_as(m) for m in lines):
                letters.append(ln)
        elif move == "meet" and len(lines) >= 2:
            i, j = rng.choice(len(lines), 2, replace=False)
            if not lines[i].same_as(lines[j]):
                letters.append(proj_intersect_lines(lines[i], lines[j]))
        elif move == "cut" and lines:
            hits = proj_intersect_line_circle(lines[rng.integers(len(lines))], k)
            if hits:
                letters.append(hits[rng.integers(len(hits))])
        else:
            axis = rng.normal(size=3)
            disc = ProjDisc(axis, rng.uniform(0.8, 0.99))
            letters.append(prov.point_in(disc))
    witness = next((x for x in letters if isinstance(x, ProjPoint) and x.isclose(centre)), None)
    return ProjAdversaryReport(letters, witness is None, witness, dict(prov.stats))


# ---------------------------------------------------------------------------
# invariant battery


def _random_points(rng, n: int) -> list[ProjPoint]:
    return [ProjPoint(v) for v in rng.normal(size=(n, 3))]


def run_battery(seed: int = 0, n: int = 1000) -> list[tuple[str, bool, str]]:
    """The projective checks as ``(name, passed, detail)`` rows."""
    rng = np.random.default_rng(seed)
    rows = []

    def row(name: str, ok: bool, detail: str):
        rows.append((name, bool(ok), detail))

    row("f0_bar fixes (0:1:0)", f0_bar((0, 1, 0)) == (0.0, 1.0, 0.0), repr(f0_bar((0, 1, 0))))
    v = f0_bar((-SQRT2, 0, 1))
    row("f0_bar(-sqrt2:0:1) = (1:0:0)", v[1] == 0 and v[2] == 0 and v[0] != 0, repr(v))
    pts = _random_points(rng, n)
    err = max(min(np.linalg.norm(F0_BAR(F0_BAR(p)).v - p.v), np.linalg.norm(F0_BAR(F0_BAR(p)).v + p.v)) for p in pts)
    row("f0_bar is an involution", err < 1e-9, f"max error {err:.2e}")
    worst = 0.0
    for p in pts:
        other = ProjPoint(rng.normal(size=3))
        if p.isclose(other):
            continue
        ln = proj_line_through(p, other)
        worst = max(worst, abs(float(F0_BAR.apply_line(ln).n @ F0_BAR(p).v)))
    row("f0_bar maps lines to lines", worst < 1e-9, f"max incidence residual {worst:.2e}")
    cp = f_pr(POLES)
    expect = ProjPoint((-1 / math.sqrt(3), 0.0, math.sqrt(2 / 3)))
    row("f_pr(c) = +-(-1/sqrt3, 0, sqrt(2/3))", cp.isclose(expect), repr(cp))
    ks = CANONICAL_K.sample(rng, n)
    err = max(abs(CANONICAL_K.value(f_pr(q))) for q in ks)
    row("f_pr fixes k", err < 1e-9, f"max residual {err:.2e}")
    err = max(min(np.linalg.norm(f_pr(f_pr(p)).v - p.v), np.linalg.norm(f_pr(f_pr(p)).v + p.v)) for p in pts)
    row("f_pr is an involution", err < 1e-9, f"max error {err:.2e}")
    err = max(np.linalg.norm(np.abs(F_inv(F(p)).v) - np.abs(p.v)) for p in pts)
    row("F_inv o F = id", err < 1e-12, f"max error {err:.2e}")
    fam = FprFamily()
    err = 0.0
    for t in rng.uniform(0, 2 * math.pi, size=100):
        p = fam.point_on_k1(float(t))
        err = max(err, 0.0 if fam.f_pr(p)(POLES).isclose(p) else 1.0)
    row("f_pr,p(c) = p on k1", err == 0.0, "100 sampled p")
    a2 = general_f0_bar(2.0)
    err = float(np.max(np.abs(a2.m @ a2.m - np.eye(3))))
    row("general f0_bar(a=2) involution", err < 1e-12, f"max error {err:.2e}")
    ok = all(projective_adversary_run(CANONICAL_K, seed=s, steps=20).avoided for s in range(5))
    row("projective adversary avoids c", ok, "5 random straightedge runs")
    return rows

"""Finite-depth closures of point sets under construction operations.

``e_closure`` adds every intersection of lines and circles drawn from the
current points (all ruler-and-compass moves); ``h_closure`` only uses lines
and one fixed circle (a straightedge with a circle already on the page).
Each stage is computed in bulk with numpy and deduplicated with a k-d tree.

Every added point records how it was made so :func:`audit_provenance` can
recompute it with the scalar kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import NoGapFound, SizeLimit
from .geometry import Circle, Point, Tolerance, circle_from, distance, get_tolerance, intersect, line_through
from .maps import Affine, Translate

DEFAULT_CAP = 100_000
_CANDIDATE_FACTOR = 50


@dataclass
class PointSet:
    """Points as an ``(n, 2)`` array with how each one arose.

    ``provenance[i]`` is ``("seed",)`` or a tuple naming the two curves whose
    intersection gave point ``i``: ``("line", i, j)`` for ``l(P[i], P[j])``,
    ``("circle", e, f, g)`` for ``k(P[e], P[f], P[g])`` and ``("k",)`` for the
    fixed circle of an H-closure.
    """

    xy: np.ndarray
    provenance: list = field(default_factory=list)
    kind: str = "seed"
    depth: int = 0
    n_seed: int = 0
    circle: Optional[Circle] = None

    def __post_init__(self):
        self.xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        if not self.provenance:
            self.provenance = [("seed",)] * len(self.xy)
        if not self.n_seed:
            self.n_seed = len(self.xy)

    @classmethod
    def from_points(cls, points: Iterable) -> "PointSet":
        pts = [tuple(p) for p in points]
        return cls(np.array(pts, dtype=float).reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.xy)

    def __iter__(self):
        return (Point(x, y) for x, y in self.xy)

    @property
    def points(self) -> list[Point]:
        return list(self)

    def contains(self, p: Point, eps: float | None = None) -> bool:
        eps = eps if eps is not None else get_tolerance().eps_abs
        if not len(self.xy):
            return False
        return bool(np.min(np.hypot(self.xy[:, 0] - p.x, self.xy[:, 1] - p.y)) <= eps)

    def to_text(self) -> str:
        return "".join(f"{float(x)!r} {float(y)!r}\n" for x, y in self.xy)

    @classmethod
    def from_text(cls, text: str) -> "PointSet":
        rows = []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"line {n}: expected 'x y', got {raw!r}")
            rows.append((float(parts[0]), float(parts[1])))
        return cls(np.array(rows, dtype=float).reshape(-1, 2))


# ---------------------------------------------------------------------------
# vectorised curves and intersections


def _lines(P: np.ndarray, eps: float):
    """Distinct lines through pairs of points: coefficients ``(m, 3)`` and defining pairs."""
    n = len(P)
    i, j = np.triu_indices(n, 1)
    a = P[j, 1] - P[i, 1]
    b = P[i, 0] - P[j, 0]
    norm = np.hypot(a, b)
    ok = norm > eps
    i, j, a, b, norm = i[ok], j[ok], a[ok], b[ok], norm[ok]
    a, b = a / norm, b / norm
    c = -(a * P[i, 0] + b * P[i, 1])
    lead = np.where(np.abs(a) > 1e-12, a, b)
    s = np.where(lead < 0, -1.0, 1.0)
    coef = np.stack([a * s, b * s, c * s], axis=1)
    _, keep = np.unique(np.round(coef / eps), axis=0, return_index=True)
    keep.sort()
    return coef[keep], np.stack([i[keep], j[keep]], axis=1)


def _circles(P: np.ndarray, eps: float):
    """Circles ``k(e, f, g)`` with distinct radii per centre: ``(m, 3)`` and defining triples."""
    n = len(P)
    f, g = np.triu_indices(n, 1)
    r = np.hypot(P[f, 0] - P[g, 0], P[f, 1] - P[g, 1])
    ok = r > eps
    f, g, r = f[ok], g[ok], r[ok]
    _, keep = np.unique(np.round(r / eps), return_index=True)
    f, g, r = f[keep], g[keep], r[keep]
    e = np.repeat(np.arange(n), len(r))
    ff, gg, rr = np.tile(f, n), np.tile(g, n), np.tile(r, n)
    circ = np.stack([P[e, 0], P[e, 1], rr], axis=1)
    return circ, np.stack([e, ff, gg], axis=1)


def _ll(L: np.ndarray, eps: float):
    i, j = np.triu_indices(len(L), 1)
    a1, b1, c1 = L[i].T
    a2, b2, c2 = L[j].T
    det = a1 * b2 - a2 * b1
    ok = np.abs(det) > eps
    det = np.where(ok, det, 1.0)
    x = (b1 * c2 - b2 * c1) / det
    y = (a2 * c1 - a1 * c2) / det
    return np.stack([x, y], axis=1)[ok], i[ok], j[ok]


def _lc(L: np.ndarray, C: np.ndarray, eps: float):
    """Line-circle intersections over all pairs; returns points, line index, circle index."""
    li, ci = np.meshgrid(np.arange(len(L)), np.arange(len(C)), indexing="ij")
    li, ci = li.ravel(), ci.ravel()
    a, b, c = L[li].T
    cx, cy, r = C[ci].T
    d = a * cx + b * cy + c
    fx, fy = cx - d * a, cy - d * b
    gap = np.abs(d) - r
    tangent = np.abs(gap) <= eps
    secant = gap < -eps
    h = np.sqrt(np.where(secant, r * r - d * d, 0.0))
    pts = [np.stack([fx, fy], axis=1)[tangent]]
    idx_l = [li[tangent]]
    idx_c = [ci[tangent]]
    for sgn in (1.0, -1.0):
        pts.append(np.stack([fx - sgn * h * b, fy + sgn * h * a], axis=1)[secant])
        idx_l.append(li[secant])
        idx_c.append(ci[secant])
    return np.concatenate(pts), np.concatenate(idx_l), np.concatenate(idx_c)


def _cc(C: np.ndarray, eps: float):
    i, j = np.triu_indices(len(C), 1)
    x1, y1, r1 = C[i].T
    x2, y2, r2 = C[j].T
    dx, dy = x2 - x1, y2 - y1
    d = np.hypot(dx, dy)
    live = (d > eps) & (d - (r1 + r2) <= eps) & (np.abs(r1 - r2) - d <= eps)
    dd = np.where(live, d, 1.0)
    along = (dd * dd + r1 * r1 - r2 * r2) / (2 * dd)
    ux, uy = dx / dd, dy / dd
    bx, by = x1 + along * ux, y1 + along * uy
    touch = live & ((np.abs(d - (r1 + r2)) <= eps) | (np.abs(np.abs(r1 - r2) - d) <= eps))
    two = live & ~touch
    h = np.sqrt(np.maximum(np.where(two, r1 * r1 - along * along, 0.0), 0.0))
    pts = [np.stack([bx, by], axis=1)[touch]]
    ii, jj = [i[touch]], [j[touch]]
    for sgn in (1.0, -1.0):
        pts.append(np.stack([bx - sgn * h * uy, by + sgn * h * ux], axis=1)[two])
        ii.append(i[two])
        jj.append(j[two])
    return np.concatenate(pts), np.concatenate(ii), np.concatenate(jj)


def _dedupe(xy: np.ndarray, eps: float) -> np.ndarray:
    """Indices of a subset with no two points within ``eps``; earlier rows win."""
    if len(xy) == 0:
        return np.zeros(0, dtype=int)
    keys = np.floor(xy / eps)
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    sub = xy[first]
    pairs = cKDTree(sub).query_pairs(eps, output_type="ndarray")
    dead = np.zeros(len(sub), dtype=bool)
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        for p, q in pairs:
            if not dead[p]:
                dead[q] = True
    return first[~dead]


def _check_budget(n: int, cap: int) -> None:
    if n > _CANDIDATE_FACTOR * cap:
        raise SizeLimit(f"{n} candidate intersections exceed the budget for a cap of {cap} points")


def _stage(ps: PointSet, eps: float, cap: int, circles: bool, fixed: Optional[Circle]) -> PointSet:
    P = ps.xy
    L, Lpair = _lines(P, eps)
    C = np.zeros((0, 3))
    Cdef: list = []
    if circles:
        C, Ctrip = _circles(P, eps)
        Cdef = [("circle", *map(int, t)) for t in Ctrip]
    if fixed is not None:
        C = np.vstack([C, [[fixed.center.x, fixed.center.y, fixed.radius]]])
        Cdef = Cdef + [("k",)]
    nL, nC = len(L), len(C)
    _check_budget(nL * (nL - 1) // 2 + 2 * nL * nC + (nC * (nC - 1) if circles else 0), cap)
    Ldef = [("line", int(a), int(b)) for a, b in Lpair]
    chunks, provs = [], []
    pts, i, j = _ll(L, eps)
    chunks.append(pts)
    provs.append((Ldef, Ldef, i, j))
    if nC:
        pts, i, j = _lc(L, C, eps)
        chunks.append(pts)
        provs.append((Ldef, Cdef, i, j))
    if circles and nC > 1:
        pts, i, j = _cc(C, eps)
        chunks.append(pts)
        provs.append((Cdef, Cdef, i, j))
    cand = np.concatenate([P] + chunks)
    finite = np.all(np.isfinite(cand), axis=1)
    keep = _dedupe(np.where(finite[:, None], cand, 0.0), eps)
    keep = keep[finite[keep]]
    keep.sort()
    new = keep[keep >= len(P)] - len(P)
    # map a candidate row back to its two curves
    offsets = np.cumsum([0] + [len(c) for c in chunks])
    prov = list(ps.provenance)
    for n in new:
        block = int(np.searchsorted(offsets, n, side="right") - 1)
        defs1, defs2, ii, jj = provs[block]
        r = n - offsets[block]
        prov.append((defs1[ii[r]], defs2[jj[r]]))
    if len(P) + len(new) > cap:
        raise SizeLimit(f"closure reached {len(P) + len(new)} points, cap is {cap}")
    xy = np.vstack([P, cand[len(P) + new]]) if len(new) else P.copy()
    return PointSet(xy, prov, ps.kind, ps.depth, ps.n_seed, ps.circle)


def _closure(seed, depth: int, cap: int, eps: float | None, circles: bool, fixed: Optional[Circle], kind: str):
    if not isinstance(seed, PointSet):
        seed = PointSet.from_points(seed)
    if len(seed) < 2:
        raise ValueError("a closure needs at least two seed points")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    eps = eps if eps is not None else get_tolerance().eps_abs
    ps = PointSet(seed.xy.copy(), list(seed.provenance), kind, 0, seed.n_seed, fixed)
    for d in range(depth):
        ps = _stage(ps, eps, cap, circles, fixed)
        ps.depth = d + 1
    return ps


def e_closure(seed, depth: int, cap: int = DEFAULT_CAP, eps: float | None = None) -> PointSet:
    """All points reachable in ``depth`` rounds of ruler-and-compass intersections."""
    return _closure(seed, depth, cap, eps, True, None, "e")


def h_closure(seed, k: Circle, depth: int, cap: int = DEFAULT_CAP, eps: float | None = None) -> PointSet:
    """Like :func:`e_closure` with lines only, plus intersections with the fixed circle ``k``."""
    return _closure(seed, depth, cap, eps, False, k, "h")


# ---------------------------------------------------------------------------
# audit


def _curve(ps: PointSet, spec: tuple, pts: Sequence[Point]):
    if spec[0] == "line":
        return line_through(pts[spec[1]], pts[spec[2]])
    if spec[0] == "circle":
        return circle_from(pts[spec[1]], pts[spec[2]], pts[spec[3]])
    return ps.circle


def audit_provenance(ps: PointSet, tol: float = 1e-7) -> list[int]:
    """Indices of points the scalar kernel cannot reproduce from their recorded curves.

    Operands must be earlier points, so an empty list means every non-seed
    point is one kernel intersection of two curves drawn from its predecessors.
    """
    pts = ps.points
    bad = []
    t = Tolerance(tol, 1e-9)
    for n, rec in enumerate(ps.provenance):
        if rec == ("seed",):
            continue
        spec1, spec2 = rec
        refs = [x for spec in rec for x in spec[1:]]
        if any(r >= n for r in refs):
            bad.append(n)
            continue
        c1, c2 = _curve(ps, spec1, pts), _curve(ps, spec2, pts)
        scale = max(1.0, abs(pts[n].x), abs(pts[n].y))
        hits = intersect(c1, c2, Tolerance(get_tolerance().eps_abs * scale, 1e-12))
        if not any(h.isclose(pts[n], t) or distance(h, pts[n]) <= tol * scale for h in hits):
            bad.append(n)
    return bad


# ---------------------------------------------------------------------------
# choosing a scale or shift that keeps a set away from a forbidden value


def _pair_distances(xy: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(len(xy), 1)
    return np.hypot(xy[i, 0] - xy[j, 0], xy[i, 1] - xy[j, 1])


def scale_avoiding_unit(
    base, gap: float = 1e-6, lo: float = 0.5, hi: float = 4.0, preferred: Sequence[float] = (2.0,)
) -> tuple[float, PointSet]:
    """A factor ``alpha`` such that no two points of ``alpha * base`` are at distance 1.

    Bad factors are ``M = {1/|ab|}``.  The ``preferred`` factors are tried
    first, then the midpoint of the widest gap of ``M`` in ``[lo, hi]``; the
    factor must clear ``M`` by ``gap``.
    """
    if not isinstance(base, PointSet):
        base = PointSet.from_points(base)
    if len(base) < 2:
        raise ValueError("need at least two points")
    d = _pair_distances(base.xy)
    M = np.sort(1.0 / d[d > 0])

    def clearance(alpha: float) -> float:
        k = np.searchsorted(M, alpha)
        near = M[max(k - 1, 0): k + 1]
        return float(np.min(np.abs(near - alpha))) if len(near) else math.inf

    alpha = next((float(a) for a in preferred if clearance(a) > gap), None)
    if alpha is None:
        inner = M[(M > lo) & (M < hi)]
        cuts = np.concatenate([[lo], inner, [hi]])
        widths = np.diff(cuts)
        k = int(np.argmax(widths))
        alpha = float((cuts[k] + cuts[k + 1]) / 2)
        if clearance(alpha) <= gap:
            raise NoGapFound(f"no scale in [{lo}, {hi}] clears the bad set by {gap}")
    scaled = PointSet(base.xy * alpha, list(base.provenance), base.kind, base.depth, base.n_seed)
    if np.any(np.abs(_pair_distances(scaled.xy) - 1.0) <= 1e-9):  # pragma: no cover - guaranteed above
        raise NoGapFound("post-check found a unit distance")
    return alpha, scaled


_SHIFTS = [(1.0, 0.0), (math.sqrt(2) / 7, math.pi / 9), (math.e / 5, -math.sqrt(3) / 11)]


def translate_avoiding_origin(base, gap: float = 1e-6, shifts=None) -> tuple[Affine, PointSet]:
    """A translation after which no point of ``base`` lies within ``gap`` of the origin."""
    if not isinstance(base, PointSet):
        base = PointSet.from_points(base)
    if len(base) < 1:
        raise ValueError("need at least one point")
    for dx, dy in shifts if shifts is not None else _SHIFTS:
        xy = base.xy + np.array([dx, dy])
        if np.min(np.hypot(xy[:, 0], xy[:, 1])) > gap:
            return Translate(dx, dy), PointSet(xy, list(base.provenance), base.kind, base.depth, base.n_seed)
    raise NoGapFound("every candidate shift puts a point on the origin")

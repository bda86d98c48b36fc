"""Affine plane primitives and the intersection operations of the construction rules.

Everything here is floating point.  A single process-wide :class:`Tolerance`
decides when two numbers are "the same"; each operation takes an optional
``tol`` argument that overrides it for one call.

Intersection results are always returned in lexicographic (x, then y) order,
where two x-coordinates within ``eps_abs`` of each other count as equal.  Rule
4 steps select an intersection by its index in that order.
"""

from __future__ import annotations

import contextlib
import enum
import functools
import math
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import CoincidentPoints, IdenticalCircles


@dataclass(frozen=True)
class Tolerance:
    eps_abs: float = 1e-9
    eps_rel: float = 1e-12

    def __post_init__(self):
        if not (self.eps_abs > 0 and self.eps_rel > 0):
            raise ValueError("tolerances must be positive")

    def close(self, u: float, v: float) -> bool:
        return abs(u - v) <= self.eps_abs + self.eps_rel * max(abs(u), abs(v))


_TOLERANCE = Tolerance()


def get_tolerance() -> Tolerance:
    return _TOLERANCE


def set_tolerance(tol: Tolerance) -> None:
    global _TOLERANCE
    _TOLERANCE = tol


@contextlib.contextmanager
def tolerance(eps_abs: float | None = None, eps_rel: float | None = None) -> Iterator[Tolerance]:
    """Temporarily replace the global tolerance."""
    old = get_tolerance()
    new = Tolerance(
        eps_abs if eps_abs is not None else old.eps_abs,
        eps_rel if eps_rel is not None else old.eps_rel,
    )
    set_tolerance(new)
    try:
        yield new
    finally:
        set_tolerance(old)


def _tol(tol: Tolerance | None) -> Tolerance:
    return tol if tol is not None else _TOLERANCE


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")
        # normalise ints / numpy scalars so equality and hashing are plain-float
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def isclose(self, other: "Point", tol: Tolerance | None = None) -> bool:
        t = _tol(tol)
        return t.close(self.x, other.x) and t.close(self.y, other.y)


@dataclass(frozen=True, slots=True)
class Line:
    """The line ``a*x + b*y + c = 0``.

    Coefficients are canonicalised on construction: ``a**2 + b**2 == 1`` and
    the first of ``a, b`` that is not negligibly small is positive.  With that
    normalisation ``a*x + b*y + c`` is the signed distance of ``(x, y)``.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        n = math.hypot(a, b)
        if not math.isfinite(n) or n == 0.0 or not math.isfinite(c):
            raise ValueError(f"degenerate line coefficients ({a}, {b}, {c})")
        a, b, c = a / n, b / n, c / n
        lead = a if abs(a) > 1e-12 else b
        if lead < 0:
            a, b, c = -a, -b, -c
        object.__setattr__(self, "a", a + 0.0)
        object.__setattr__(self, "b", b + 0.0)
        object.__setattr__(self, "c", c + 0.0)

    @classmethod
    def horizontal(cls, y: float) -> "Line":
        return cls(0.0, 1.0, -y)

    @classmethod
    def vertical(cls, x: float) -> "Line":
        return cls(1.0, 0.0, -x)

    def value(self, p: Point) -> float:
        return self.a * p.x + self.b * p.y + self.c

    def contains(self, p: Point, tol: Tolerance | None = None) -> bool:
        return abs(self.value(p)) <= _tol(tol).eps_abs

    @property
    def direction(self) -> tuple[float, float]:
        return (-self.b, self.a)

    def same_as(self, other: "Line", tol: Tolerance | None = None) -> bool:
        t = _tol(tol)
        for s in (1.0, -1.0):
            if (
                abs(self.a - s * other.a) <= t.eps_abs
                and abs(self.b - s * other.b) <= t.eps_abs
                and abs(self.c - s * other.c) <= t.eps_abs
            ):
                return True
        return False


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    def value(self, p: Point) -> float:
        """Signed radial residual ``|p - center| - radius``."""
        return distance(p, self.center) - self.radius

    def contains(self, p: Point, tol: Tolerance | None = None) -> bool:
        return abs(self.value(p)) <= _tol(tol).eps_abs

    def point_at(self, angle: float) -> Point:
        return Point(
            self.center.x + self.radius * math.cos(angle),
            self.center.y + self.radius * math.sin(angle),
        )

    def same_as(self, other: "Circle", tol: Tolerance | None = None) -> bool:
        t = _tol(tol)
        return self.center.isclose(other.center, t) and abs(self.radius - other.radius) <= t.eps_abs


class LineRelation(enum.Enum):
    """Outcomes of :func:`intersect_lines` other than a single point."""

    PARALLEL = "parallel"
    IDENTICAL = "identical"


PARALLEL = LineRelation.PARALLEL
IDENTICAL = LineRelation.IDENTICAL

Curve = Union[Line, Circle]


def distance(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def line_through(p: Point, q: Point, tol: Tolerance | None = None) -> Line:
    if distance(p, q) <= _tol(tol).eps_abs:
        raise CoincidentPoints(f"no unique line through coincident points {p} and {q}")
    a = q.y - p.y
    b = p.x - q.x
    return Line(a, b, -(a * p.x + b * p.y))


def circle_from(center: Point, b: Point, c: Point, tol: Tolerance | None = None) -> Circle | Point:
    """``k(center, b, c)``: the circle about ``center`` with radius ``|bc|``.

    When ``b`` and ``c`` coincide the circle degenerates to ``center`` itself,
    which is how a construction repeats a point.
    """
    r = distance(b, c)
    if r <= _tol(tol).eps_abs:
        return center
    return Circle(center, r)


def sort_points(points: list[Point], tol: Tolerance | None = None) -> list[Point]:
    eps = _tol(tol).eps_abs

    def cmp(p: Point, q: Point) -> int:
        if abs(p.x - q.x) > eps:
            return -1 if p.x < q.x else 1
        if p.y != q.y:
            return -1 if p.y < q.y else 1
        return 0

    return sorted(points, key=functools.cmp_to_key(cmp))


def intersect_lines(l1: Line, l2: Line, tol: Tolerance | None = None) -> Point | LineRelation:
    t = _tol(tol)
    det = l1.a * l2.b - l2.a * l1.b
    if abs(det) <= t.eps_abs:
        return IDENTICAL if l1.same_as(l2, t) else PARALLEL
    x = (l1.b * l2.c - l2.b * l1.c) / det
    y = (l2.a * l1.c - l1.a * l2.c) / det
    return Point(x, y)


def intersect_line_circle(line: Line, circle: Circle, tol: Tolerance | None = None) -> list[Point]:
    t = _tol(tol)
    cx, cy = circle.center.x, circle.center.y
    d = line.a * cx + line.b * cy + line.c
    foot = Point(cx - d * line.a, cy - d * line.b)
    gap = abs(d) - circle.radius
    if gap > t.eps_abs:
        return []
    if abs(gap) <= t.eps_abs:
        return [foot]
    h = math.sqrt(circle.radius**2 - d * d)
    dx, dy = line.direction
    return sort_points([Point(foot.x + h * dx, foot.y + h * dy), Point(foot.x - h * dx, foot.y - h * dy)], t)


def intersect_circles(k1: Circle, k2: Circle, tol: Tolerance | None = None) -> list[Point]:
    t = _tol(tol)
    if k1.same_as(k2, t):
        raise IdenticalCircles(f"circles {k1} and {k2} coincide")
    dx = k2.center.x - k1.center.x
    dy = k2.center.y - k1.center.y
    d = math.hypot(dx, dy)
    if d <= t.eps_abs:
        return []
    r1, r2 = k1.radius, k2.radius
    if d - (r1 + r2) > t.eps_abs or abs(r1 - r2) - d > t.eps_abs:
        return []
    # distance from k1's centre to the radical line, measured along the centre line
    along = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    ux, uy = dx / d, dy / d
    base = Point(k1.center.x + along * ux, k1.center.y + along * uy)
    if abs(d - (r1 + r2)) <= t.eps_abs or abs(abs(r1 - r2) - d) <= t.eps_abs:
        return [base]
    h = math.sqrt(max(r1 * r1 - along * along, 0.0))
    return sort_points([Point(base.x - h * uy, base.y + h * ux), Point(base.x + h * uy, base.y - h * ux)], t)


def intersect(c1: Curve, c2: Curve, tol: Tolerance | None = None) -> list[Point]:
    """Intersection points of any two curves as a sorted list.

    Parallel lines give ``[]``; identical lines raise nothing here and also
    give ``[]`` -- callers that must distinguish use :func:`intersect_lines`.
    """
    if isinstance(c1, Line) and isinstance(c2, Line):
        r = intersect_lines(c1, c2, tol)
        return [r] if isinstance(r, Point) else []
    if isinstance(c1, Line):
        return intersect_line_circle(c1, c2, tol)
    if isinstance(c2, Line):
        return intersect_line_circle(c2, c1, tol)
    return intersect_circles(c1, c2, tol)


def same_curve(c1: Curve, c2: Curve, tol: Tolerance | None = None) -> bool:
    if type(c1) is not type(c2):
        return False
    return c1.same_as(c2, tol)


def collinearity(p: Point, q: Point, r: Point) -> float:
    """Twice the signed area of the triangle ``pqr``."""
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)

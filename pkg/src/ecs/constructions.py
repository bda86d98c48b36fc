"""The explicit constructions: positive results and the concrete Y set.

Every factory returns a :class:`~ecs.model.ConstructionProgram` carrying its
target, so ``check_constructs(execute(prog, chooser), prog.target)`` is the
success test.  :data:`BUILTINS` maps the names used by scripts and the CLI to
these factories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CoincidentPoints, DegenerateDenominator, GeometricFailure
from .geometry import Circle, Point, Tolerance, distance, get_tolerance, intersect
from .maps import StrommerRotated, strommer_circle
from .model import (
    COMPASS,
    GENERAL,
    STRAIGHTEDGE,
    BisectorTarget,
    Choose,
    ConstructionProgram,
    EquilateralTarget,
    HSegment,
    Disc,
    NewCircle,
    NewIntersection,
    NewLine,
    NewLocation,
    PointTarget,
    UnitDistanceTarget,
    Word,
)

SIN1 = math.sin(1.0)
COS1 = math.cos(1.0)


def equilateral_triangle_program() -> ConstructionProgram:
    """Two arbitrary points from unit discs about (0,0) and (0,3), then the apex.

    The word ends ``p3 p1 p2``: the apex followed by both base points,
    repeated as degenerate circles.
    """
    steps = [
        NewLocation(Disc(Point(0.0, 0.0), 1.0)),
        Choose(),
        NewLocation(Disc(Point(0.0, 3.0), 1.0)),
        Choose(),
        NewCircle(1, 1, 3),
        NewCircle(3, 1, 3),
        NewIntersection(4, 5, 0),
        NewCircle(1, 1, 1),
        NewCircle(3, 3, 3),
    ]
    return ConstructionProgram.from_steps(
        [], steps, declared_type=COMPASS, target=EquilateralTarget(), name="equilateral", macro=("equilateral", ())
    )


def bisector_program(p1: Point, p2: Point) -> ConstructionProgram:
    if distance(p1, p2) <= get_tolerance().eps_abs:
        raise CoincidentPoints("the bisector needs two distinct points")
    steps = [
        NewCircle(0, 0, 1),
        NewCircle(1, 0, 1),
        NewIntersection(2, 3, 0),
        NewIntersection(2, 3, 1),
        NewLine(4, 5),
    ]
    return ConstructionProgram.from_steps(
        [p1, p2],
        steps,
        declared_type=GENERAL,
        target=BisectorTarget(p1, p2),
        name="bisector",
        macro=("bisector", ("P", "Q")),
    )


def _u_line(height: float, left: tuple[float, float], right: tuple[float, float], at: int) -> list:
    """Steps drawing ``y = height`` through two U-arbitrary points; ``at`` is the first new index."""
    return [
        NewLocation(HSegment(left[0], left[1], height)),
        Choose(),
        NewLocation(HSegment(right[0], right[1], height)),
        Choose(),
        NewLine(at + 1, at + 3),
    ]


def unit_length_program() -> ConstructionProgram:
    """Two points at distance 1 from nothing, using horizontal-segment points.

    The arbitrary points ``a``, ``b`` on ``y = 0`` are reused directly; their
    bisector is vertical and meets ``y = 0`` and ``y = 1`` in a unit pair.
    """
    steps = _u_line(0.0, (-2.0, -1.0), (1.0, 2.0), 0) + _u_line(1.0, (-2.0, -1.0), (1.0, 2.0), 5)
    # a = word[1], b = word[3]; y=0 is word[4], y=1 is word[9]
    steps += [
        NewCircle(1, 1, 3),
        NewCircle(3, 1, 3),
        NewIntersection(10, 11, 0),
        NewIntersection(10, 11, 1),
        NewLine(12, 13),
        NewIntersection(14, 4, 0),
        NewIntersection(14, 9, 0),
    ]
    return ConstructionProgram.from_steps(
        [], steps, declared_type=GENERAL, target=UnitDistanceTarget(), name="unit_length", macro=("unit_length", ())
    )


def center_via_u_program(k: Circle, heights: Optional[Sequence[float]] = None) -> ConstructionProgram:
    """Centre of ``k`` with the straightedge alone, given horizontal-segment points.

    Three horizontal chords at heights ``t1 = cy`` (a diameter), ``t2`` and
    ``t3`` (default ``t1 + r/3`` and ``t1 + r/2``).  Crossing chords
    ``l(p1, q_i)`` and ``l(p_i, q1)`` meet on the vertical diameter, which
    then cuts ``y = t1`` in the centre.
    """
    cx, cy, r = k.center.x, k.center.y, k.radius
    if heights is None:
        heights = (cy, cy + r / 3.0, cy + r / 2.0)
    t1, t2, t3 = (float(t) for t in heights)
    if abs(t1 - cy) > 1e-12 * max(1.0, abs(cy)):
        raise ValueError("the first chord must be the horizontal diameter (t1 = centre y)")
    if not (t1 < t2 < t3 and t3 - t1 < r):
        raise ValueError("need t1 < t2 < t3 with t3 - t1 below the radius")
    heights = (t1, t2, t3)
    left, right = (cx - 3 * r, cx - 2 * r), (cx + 2 * r, cx + 3 * r)
    steps: list = []
    chord_lines = []
    for t in heights:
        at = 1 + len(steps)
        steps += _u_line(t, left, right, at)
        chord_lines.append(at + 4)
    ends = []
    for ln in chord_lines:
        at = 1 + len(steps)
        steps += [NewIntersection(ln, 0, 0), NewIntersection(ln, 0, 1)]
        ends.append((at, at + 1))
    (p1, q1), (p2, q2), (p3, q3) = ends
    at = 1 + len(steps)
    steps += [
        NewLine(p1, q2),  # at
        NewLine(p2, q1),  # at+1
        NewIntersection(at, at + 1, 0),  # a, at+2
        NewLine(p1, q3),  # at+3
        NewLine(p3, q1),  # at+4
        NewIntersection(at + 3, at + 4, 0),  # b, at+5
        NewLine(at + 2, at + 5),  # vertical diameter, at+6
        NewIntersection(at + 6, chord_lines[0], 0),
    ]
    return ConstructionProgram.from_steps(
        [k],
        steps,
        declared_type=STRAIGHTEDGE,
        target=PointTarget(k.center, "center"),
        name="center_via_u",
        macro=("center_via_u", ("K",)),
    )


def origin_b(q1: Point, q2: Point) -> Point:
    """Where ``l(q2, q1)`` meets the line through the origin at the mirrored slope."""
    dx = q2.x - q1.x
    bx = (q1.x - dx) / 2.0
    return Point(bx, -bx / dx)


def origin_admissible(q1: Point, q2: Point) -> bool:
    return 2 * q1.x > q2.x > q1.x > 0


def origin_program() -> ConstructionProgram:
    """The origin from nothing with horizontal-segment points.

    Non-uniform: the segment heights for ``p, p'`` depend on ``b``, which
    depends on the chosen ``q1, q2``.  Letter indices::

        0-4   y = 0 through U-points
        5-6   q1 on [0.5, 2] x {1}
        7-8   q2 on [q1x, 2 q1x] x {2}
        9     kappa = l(q2, q1)
        10-14 l' = (y = b_y) through p, p'
        15-17 mirror of q1 in l'
        18-20 mirror of q2 in l'
        21    l through both mirrors
        22    l meets y = 0 at the origin
    """

    def q2_segment(word: Word) -> HSegment:
        q1 = word[6]
        return HSegment(q1.x, 2.0 * q1.x, 2.0)

    def kappa(word: Word):
        q1, q2 = word[6], word[8]
        if not origin_admissible(q1, q2):
            raise GeometricFailure(f"q1={q1}, q2={q2} violate 2*q1x > q2x > q1x > 0", 9)
        return NewLine(8, 6)

    def p_segment(lo: float, hi: float) -> Callable[[Word], HSegment]:
        def seg(word: Word) -> HSegment:
            return HSegment(lo, hi, origin_b(word[6], word[8]).y)

        return seg

    def other_point(c1: int, c2: int, q: int) -> Callable[[Word], NewIntersection]:
        def step(word: Word) -> NewIntersection:
            pts = intersect(word[c1], word[c2])
            sel = 0 if len(pts) < 2 or not pts[0].isclose(word[q], _LOOSE) else 1
            return NewIntersection(c1, c2, sel)

        return step

    steps = _u_line(0.0, (-2.0, -1.0), (1.0, 2.0), 0) + [
        NewLocation(HSegment(0.5, 2.0, 1.0)),
        Choose(),
        NewLocation(q2_segment),
        Choose(),
        kappa,
        NewLocation(p_segment(-1.0, 0.0)),
        Choose(),
        NewLocation(p_segment(1.0, 2.0)),
        Choose(),
        NewLine(11, 13),
        NewCircle(11, 11, 6),
        NewCircle(13, 13, 6),
        other_point(15, 16, 6),
        NewCircle(11, 11, 8),
        NewCircle(13, 13, 8),
        other_point(18, 19, 8),
        NewLine(17, 20),
        NewIntersection(21, 4, 0),
    ]
    return ConstructionProgram.from_steps(
        [],
        steps,
        declared_type=GENERAL,
        target=PointTarget(Point(0.0, 0.0), "origin"),
        name="origin_via_u",
        macro=("origin_via_u", ()),
    )


_LOOSE = Tolerance(1e-7, 1e-9)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Builtin:
    factory: Callable
    arg_kinds: tuple[str, ...]
    defaults: tuple
    doc: str


BUILTINS: dict[str, Builtin] = {
    "equilateral": Builtin(equilateral_triangle_program, (), (), "equilateral triangle by compass"),
    "bisector": Builtin(
        bisector_program, ("point", "point"), (Point(0.0, 0.0), Point(2.0, 0.0)), "perpendicular bisector"
    ),
    "unit_length": Builtin(unit_length_program, (), (), "unit distance from U-arbitrary points"),
    "center_via_u": Builtin(
        center_via_u_program, ("circle",), (Circle(Point(0.0, 0.0), 2.0),), "centre of a circle by straightedge"
    ),
    "origin_via_u": Builtin(origin_program, (), (), "the origin from U-arbitrary points (non-uniform)"),
}

ALIASES = {"unit": "unit_length", "center": "center_via_u", "origin": "origin_via_u"}


def builtin(name: str, *args) -> ConstructionProgram:
    name = ALIASES.get(name, name)
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    b = BUILTINS[name]
    return b.factory(*(args or b.defaults))


# ---------------------------------------------------------------------------
# the concrete Y set


@dataclass(frozen=True)
class YSetParams:
    alpha: Fraction | float

    @property
    def denominator(self) -> float:
        a = float(self.alpha)
        return 5.0 - 2.0 * a + a * a

    @property
    def beta(self) -> float:
        a = float(self.alpha)
        return (2.0 + 2.0 * a * a) / self.denominator

    @property
    def gamma(self) -> float:
        a = float(self.alpha)
        return (1.0 + 4.0 * a - a * a) / self.denominator


Y_CIRCLE = strommer_circle(1.5)
Y_P = Point(1.5 - (5.0 / 6.0) * COS1, -(5.0 / 6.0) * SIN1)


def y0_point(alpha) -> Point:
    """Rational point of ``(x - 3/2)**2 + y**2 = 5/4``, from the chord through (2, 1)."""
    prm = YSetParams(alpha)
    return Point(prm.beta, prm.gamma)


def y_set_point(alpha, method: str = "direct") -> Point:
    """Image of ``y0_point(alpha)`` under ``f_p^-1 = f o phi^-1`` with angle 1.

    ``method="direct"`` evaluates the closed formula; ``"composed"`` runs
    the point through the map objects.
    """
    prm = YSetParams(alpha)
    if method == "composed":
        q = StrommerRotated(1.5, Y_P).inverse().apply_point(y0_point(alpha))
        if not isinstance(q, Point):
            raise DegenerateDenominator(f"alpha={alpha} lands on the excluded line")
        return q
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    b, g = prm.beta, prm.gamma
    den = (b - 1.5) * COS1 + g * SIN1 + 1.5
    if abs(den) <= 1e-15:
        raise DegenerateDenominator(f"alpha={alpha} gives a zero denominator")
    return Point(1.0 / den, ((1.5 - b) * SIN1 + g * COS1) / den)


def arc_histogram(alphas: Sequence, bucket: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Counts of Y points per angular bucket about (3/2, 0); returns (edges, counts)."""
    c = Y_CIRCLE.center
    angles = np.array([math.atan2(p.y - c.y, p.x - c.x) for p in map(y_set_point, alphas)])
    n = int(math.ceil(2 * math.pi / bucket))
    edges = -math.pi + bucket * np.arange(n + 1)
    edges[-1] = max(edges[-1], math.pi)
    counts, _ = np.histogram(angles, bins=edges)
    return edges, counts


def default_alphas() -> list[Fraction]:
    """The rationals -100, -99.5, ..., 100."""
    return [Fraction(k, 2) for k in range(-200, 201)]

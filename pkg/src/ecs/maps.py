"""Plane maps that carry lines to lines: similarities and Strommer's involution.

Strommer's map ``(x, y) -> (1/x, y/x)`` is undefined on the y-axis; it maps
every other line, minus its point on the y-axis, onto a line minus a point of
the y-axis, and it fixes the circle ``(x - a)**2 + y**2 = a**2 - 1`` while
moving its centre ``(a, 0)`` to ``(1/a, 0)``.  Partial maps return
:data:`UNDEFINED` instead of raising.

:class:`Composite` lists maps in composition order: ``Composite([f, g])`` is
``f o g``, so ``g`` is applied first.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import BadParameter, ExcludedLine, PointNotOnK0
from .geometry import Circle, Line, Point, Tolerance, distance, get_tolerance


class _Undefined(enum.Enum):
    UNDEFINED = "undefined"

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined.UNDEFINED

MaybePoint = Union[Point, _Undefined]

Y_AXIS = Line.vertical(0.0)


class PlaneMap:
    """Base class; subclasses implement ``apply_point``, ``apply_line`` and ``inverse``."""

    def apply_point(self, p: Point) -> MaybePoint:
        raise NotImplementedError

    def apply_line(self, line: Line) -> tuple[Line, Optional[Point]]:
        raise NotImplementedError

    def inverse(self) -> "PlaneMap":
        raise NotImplementedError

    def __call__(self, p: Point) -> MaybePoint:
        return self.apply_point(p)


@dataclass(frozen=True)
class Affine(PlaneMap):
    """``p -> A p + t`` with ``A`` invertible, stored row-major as ``(m00, m01, m10, m11)``."""

    m: tuple[float, float, float, float]
    t: tuple[float, float] = (0.0, 0.0)

    def apply_point(self, p: Point) -> Point:
        m00, m01, m10, m11 = self.m
        return Point(m00 * p.x + m01 * p.y + self.t[0], m10 * p.x + m11 * p.y + self.t[1])

    def _inverse_parts(self):
        m00, m01, m10, m11 = self.m
        det = m00 * m11 - m01 * m10
        inv = (m11 / det, -m01 / det, -m10 / det, m00 / det)
        tx, ty = self.t
        return inv, (-(inv[0] * tx + inv[1] * ty), -(inv[2] * tx + inv[3] * ty))

    def apply_line(self, line: Line) -> tuple[Line, None]:
        # image = {q : line(A^-1 q + s) = 0} with s = -A^-1 t
        inv, s = self._inverse_parts()
        a = line.a * inv[0] + line.b * inv[2]
        b = line.a * inv[1] + line.b * inv[3]
        c = line.a * s[0] + line.b * s[1] + line.c
        return Line(a, b, c), None

    def inverse(self) -> "Affine":
        inv, s = self._inverse_parts()
        return Affine(inv, s)


def Scale(alpha: float) -> Affine:
    """Homothety about the origin."""
    if not alpha > 0:
        raise BadParameter("scale factor must be positive")
    return Affine((alpha, 0.0, 0.0, alpha))


def Translate(dx: float, dy: float) -> Affine:
    return Affine((1.0, 0.0, 0.0, 1.0), (dx, dy))


def Rotate(center: Point, theta: float) -> Affine:
    """Counter-clockwise rotation by ``theta`` radians about ``center``."""
    c, s = math.cos(theta), math.sin(theta)
    return Affine((c, -s, s, c), (center.x - c * center.x + s * center.y, center.y - s * center.x - c * center.y))


def Similarity(center: Point, ratio: float) -> Affine:
    """``p -> center + ratio * (p - center)``."""
    if not ratio > 0:
        raise BadParameter("similarity ratio must be positive")
    return Affine((ratio, 0.0, 0.0, ratio), ((1 - ratio) * center.x, (1 - ratio) * center.y))


@dataclass(frozen=True)
class Strommer(PlaneMap):
    a: float

    def __post_init__(self):
        if not self.a > 1:
            raise BadParameter(f"Strommer parameter must exceed 1, got {self.a}")

    def apply_point(self, p: Point, tol: Tolerance | None = None) -> MaybePoint:
        if abs(p.x) <= (tol or get_tolerance()).eps_abs:
            return UNDEFINED
        return Point(1.0 / p.x, p.y / p.x)

    def apply_line(self, line: Line, tol: Tolerance | None = None) -> tuple[Line, Optional[Point]]:
        """Image of ``line`` minus the y-axis, and the point the image line is missing.

        ``alpha*x + beta*y + gamma = 0`` becomes ``gamma*x + beta*y + alpha = 0``.
        """
        eps = (tol or get_tolerance()).eps_abs
        alpha, beta, gamma = line.a, line.b, line.c
        if abs(beta) <= eps and abs(gamma) <= eps:
            raise ExcludedLine("the y-axis is outside the domain of Strommer's map")
        image = Line(gamma, beta, alpha)
        deleted = None if abs(beta) <= eps else Point(0.0, -alpha / beta)
        return image, deleted

    def inverse(self) -> "Strommer":
        return self

    @property
    def circle(self) -> Circle:
        return strommer_circle(self.a)

    @property
    def center(self) -> Point:
        return Point(self.a, 0.0)


@dataclass(frozen=True)
class Composite(PlaneMap):
    maps: tuple

    def __init__(self, maps: Sequence[PlaneMap]):
        object.__setattr__(self, "maps", tuple(maps))

    def apply_point(self, p: Point) -> MaybePoint:
        for m in reversed(self.maps):
            p = m.apply_point(p)
            if p is UNDEFINED:
                return UNDEFINED
        return p

    def apply_line(self, line: Line) -> tuple[Line, Optional[Point]]:
        """Only one member may be partial; its missing point is carried forward."""
        deleted = None
        partial = 0
        for m in reversed(self.maps):
            line, d = m.apply_line(line)
            if deleted is not None:
                deleted = m.apply_point(deleted)
            if d is not None:
                partial += 1
                if partial > 1:
                    raise NotImplementedError("line images through two partial maps")
                deleted = d
        return line, deleted if deleted is not UNDEFINED else None

    def inverse(self) -> "Composite":
        return Composite([m.inverse() for m in reversed(self.maps)])


@dataclass(frozen=True)
class StrommerRotated(PlaneMap):
    """``f_p = phi o f`` where ``phi`` rotates about ``(a, 0)`` taking ``f(c) = (1/a, 0)`` to ``p``."""

    a: float
    p: Point

    def __post_init__(self):
        Strommer(self.a)  # validates a
        k0 = strommer_k0(self.a)
        if abs(distance(self.p, k0.center) - k0.radius) > get_tolerance().eps_abs * max(1.0, k0.radius) * 10:
            raise PointNotOnK0(f"{self.p} is not on the circle {k0}")

    @property
    def center(self) -> Point:
        return Point(self.a, 0.0)

    @property
    def theta(self) -> float:
        c = self.center
        return math.atan2(self.p.y - c.y, self.p.x - c.x) - math.pi

    @property
    def rotation(self) -> Affine:
        return Rotate(self.center, self.theta)

    def _as_composite(self) -> Composite:
        return Composite([self.rotation, Strommer(self.a)])

    def apply_point(self, p: Point) -> MaybePoint:
        return self._as_composite().apply_point(p)

    def apply_line(self, line: Line) -> tuple[Line, Optional[Point]]:
        return self._as_composite().apply_line(line)

    def inverse(self) -> Composite:
        """``f o phi^-1``; undefined on the rotated image of the y-axis."""
        return Composite([Strommer(self.a), self.rotation.inverse()])

    @property
    def excluded_image_line(self) -> Line:
        """``l_p``, the image of the y-axis under the rotation."""
        return self.rotation.apply_line(Y_AXIS)[0]


def strommer_circle(a: float) -> Circle:
    """The circle fixed by Strommer's map with parameter ``a``."""
    if not a > 1:
        raise BadParameter(f"Strommer parameter must exceed 1, got {a}")
    return Circle(Point(a, 0.0), math.sqrt(a * a - 1.0))


def strommer_k0(a: float) -> Circle:
    """Circle about ``(a, 0)`` through ``f((a, 0)) = (1/a, 0)``."""
    if not a > 1:
        raise BadParameter(f"Strommer parameter must exceed 1, got {a}")
    return Circle(Point(a, 0.0), abs(a - 1.0 / a))


def strommer_rotated(a: float, p: Point) -> StrommerRotated:
    return StrommerRotated(a, p)


def k0_point(a: float, theta: float) -> Point:
    """Point of ``k0`` reached by turning ``(1/a, 0)`` counter-clockwise by ``theta`` about ``(a, 0)``."""
    r = a - 1.0 / a
    return Point(a - r * math.cos(theta), -r * math.sin(theta))


def transfer_map(k: Circle, k2: Circle) -> Composite:
    """Shift then similarity: maps ``k`` onto ``k2`` and its centre onto the centre of ``k2``."""
    c, c2 = k.center, k2.center
    return Composite([Similarity(c2, k2.radius / k.radius), Translate(c2.x - c.x, c2.y - c.y)])


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_map(name: str) -> PlaneMap:
    """Build a map from its command-line name.

    ``scale:ALPHA``, ``translate:DX,DY``, ``rotate:CX,CY,THETA``,
    ``strommer:A``, ``strommer:A:THETA`` and ``transfer:CX,CY,R->CX,CY,R``.
    """
    kind, _, rest = name.partition(":")
    nums = [float(v) for v in re.findall(_NUM, rest)]
    try:
        if kind == "scale" and len(nums) == 1:
            return Scale(nums[0])
        if kind == "translate" and len(nums) == 2:
            return Translate(*nums)
        if kind == "rotate" and len(nums) == 3:
            return Rotate(Point(nums[0], nums[1]), nums[2])
        if kind == "strommer" and len(nums) == 1:
            return Strommer(nums[0])
        if kind == "strommer" and len(nums) == 2:
            return StrommerRotated(nums[0], k0_point(nums[0], nums[1]))
        if kind == "transfer" and "->" in rest and len(nums) == 6:
            k = Circle(Point(nums[0], nums[1]), nums[2])
            k2 = Circle(Point(nums[3], nums[4]), nums[5])
            return transfer_map(k, k2)
    except ValueError as exc:
        raise BadParameter(str(exc)) from exc
    raise BadParameter(f"unrecognised map {name!r}")

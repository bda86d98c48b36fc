"""Constructions with arbitrary points, executed one branch at a time.

A construction is a rooted tree of words over points, lines, circles and
*locations* (sets from which an arbitrary point may be picked).  A
:class:`ConstructionProgram` describes the tree implicitly: ``next_step`` maps
the current word to one of six step rules.  :func:`execute` walks a single
root-to-leaf branch, asking a chooser to resolve every arbitrary point.

Indices in step rules are 0-based positions in the word.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Protocol, Sequence, Union

import numpy as np

from .errors import (
    ChooserOutOfLocation,
    GeometricFailure,
    IdenticalCircles,
    InvalidStep,
    NotSeparated,
    RefinementNotSubset,
    StepLimit,
)
from .geometry import (
    Circle,
    Line,
    Point,
    Tolerance,
    circle_from,
    distance,
    get_tolerance,
    intersect,
    line_through,
    same_curve,
)

STRAIGHTEDGE = "straightedge"
COMPASS = "compass"
GENERAL = "general"
TYPES = (STRAIGHTEDGE, COMPASS, GENERAL)

DEFAULT_MAX_STEPS = 10_000


# ---------------------------------------------------------------------------
# locations


@dataclass(frozen=True)
class Disc:
    """Open disc; membership is closed up to ``eps_abs``."""

    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")

    def contains(self, p: Point, tol: Tolerance | None = None) -> bool:
        t = tol or get_tolerance()
        return distance(p, self.center) < self.radius + t.eps_abs

    def sample(self, rng: np.random.Generator) -> Point:
        r = self.radius * math.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2 * math.pi)
        return Point(self.center.x + r * math.cos(phi), self.center.y + r * math.sin(phi))


@dataclass(frozen=True)
class HSegment:
    """Proper horizontal segment ``[a, b] x {c}``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("horizontal segment needs a < b")

    def contains(self, p: Point, tol: Tolerance | None = None) -> bool:
        e = (tol or get_tolerance()).eps_abs
        return abs(p.y - self.c) <= e and self.a - e <= p.x <= self.b + e

    def sample(self, rng: np.random.Generator) -> Point:
        return Point(rng.uniform(self.a, self.b), self.c)


@dataclass(frozen=True)
class PointPair:
    p: Point
    q: Point

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("point pair needs two distinct points")

    def contains(self, pt: Point, tol: Tolerance | None = None) -> bool:
        return pt.isclose(self.p, tol) or pt.isclose(self.q, tol)

    def sample(self, rng: np.random.Generator) -> Point:
        return self.p if rng.integers(2) == 0 else self.q


Location = Union[Disc, HSegment, PointPair]
LOCATION_TYPES = (Disc, HSegment, PointPair)
ConfigItem = Union[Point, Line, Circle, Disc, HSegment, PointPair]
Word = tuple  # tuple[ConfigItem, ...]


def is_location(item) -> bool:
    return isinstance(item, LOCATION_TYPES)


def is_curve(item) -> bool:
    return isinstance(item, (Line, Circle))


# ---------------------------------------------------------------------------
# step rules


@dataclass(frozen=True)
class End:
    rule = 1


@dataclass(frozen=True)
class NewLine:
    i: int
    j: int
    rule = 2


@dataclass(frozen=True)
class NewCircle:
    """``k(word[i], word[j], word[k])``; a point when ``word[j] == word[k]``."""

    i: int
    j: int
    k: int
    rule = 3


@dataclass(frozen=True)
class NewIntersection:
    i: int
    j: int
    select: int = 0
    rule = 4


@dataclass(frozen=True)
class NewLocation:
    """Append a location.  ``loc`` is a location or a function of the word."""

    loc: Union[Location, Callable[[Word], Location]]
    rule = 5

    def resolve(self, word: Word) -> Location:
        return self.loc if is_location(self.loc) else self.loc(word)


@dataclass(frozen=True)
class Choose:
    rule = 6


StepRule = Union[End, NewLine, NewCircle, NewIntersection, NewLocation, Choose]

RULE_NAMES = {
    End: "End",
    NewLine: "NewLine",
    NewCircle: "NewCircle",
    NewIntersection: "NewIntersection",
    NewLocation: "NewLocation",
    Choose: "Choose",
}


@dataclass(frozen=True)
class Violation:
    rule: int
    message: str

    def __str__(self):
        return f"rule {self.rule}: {self.message}"


def _check_indices(word: Word, idx: Iterable[int], rule: int) -> Optional[Violation]:
    for i in idx:
        if not 0 <= i < len(word):
            return Violation(rule, f"index {i} outside word of length {len(word)}")
    return None


def validate_step(word: Word, step: StepRule, tol: Tolerance | None = None) -> Optional[Violation]:
    """Return ``None`` if ``step`` may follow ``word``, else the broken rule."""
    trailing_location = bool(word) and is_location(word[-1])
    if isinstance(step, Choose):
        if not trailing_location:
            return Violation(6, "an arbitrary point may only be chosen right after a location")
        return None
    if trailing_location:
        return Violation(6, "a vertex ending in a location is non-deterministic and must choose a point")
    if isinstance(step, (End, NewLocation)):
        return None
    if isinstance(step, NewLine):
        v = _check_indices(word, (step.i, step.j), 2)
        if v:
            return v
        p, q = word[step.i], word[step.j]
        if not (isinstance(p, Point) and isinstance(q, Point)):
            return Violation(2, "a line needs two point letters")
        if step.i == step.j or distance(p, q) <= (tol or get_tolerance()).eps_abs:
            return Violation(2, "a line needs two distinct points")
        return None
    if isinstance(step, NewCircle):
        v = _check_indices(word, (step.i, step.j, step.k), 3)
        if v:
            return v
        if not all(isinstance(word[n], Point) for n in (step.i, step.j, step.k)):
            return Violation(3, "a circle needs three point letters")
        return None
    if isinstance(step, NewIntersection):
        v = _check_indices(word, (step.i, step.j), 4)
        if v:
            return v
        c1, c2 = word[step.i], word[step.j]
        if not (is_curve(c1) and is_curve(c2)):
            return Violation(4, "an intersection needs two curve letters")
        if step.i == step.j or same_curve(c1, c2, tol):
            return Violation(4, "an intersection needs two distinct curves")
        if step.select not in (0, 1):
            return Violation(4, f"intersection index must be 0 or 1, got {step.select}")
        return None
    return Violation(0, f"unknown step {step!r}")


# ---------------------------------------------------------------------------
# targets


class Target(Protocol):
    """A predicate on words (the set K of allowed terminal configurations).

    ``arities`` lists the word lengths the predicate can accept; ``None``
    means any length.
    """

    arities: Optional[tuple[int, ...]]

    def __call__(self, segment: Sequence[ConfigItem]) -> bool: ...


@dataclass(frozen=True)
class PointTarget:
    point: Point
    label: str = "point"
    arities = (1,)

    def __call__(self, segment) -> bool:
        return len(segment) == 1 and isinstance(segment[0], Point) and segment[0].isclose(self.point)


@dataclass(frozen=True)
class UnitDistanceTarget:
    arities = (2,)

    def __call__(self, segment) -> bool:
        if len(segment) != 2 or not all(isinstance(p, Point) for p in segment):
            return False
        return abs(distance(*segment) - 1.0) <= 1e-9


@dataclass(frozen=True)
class EquilateralTarget:
    arities = (3,)

    def __call__(self, segment) -> bool:
        if len(segment) != 3 or not all(isinstance(p, Point) for p in segment):
            return False
        a, b, c = segment
        sides = (distance(a, b), distance(a, c), distance(b, c))
        m = max(sides)
        return min(sides) > 0 and m - min(sides) <= 1e-9 * m


@dataclass(frozen=True)
class BisectorTarget:
    """The perpendicular bisector of two given points."""

    p: Point
    q: Point
    arities = (1,)

    def __call__(self, segment) -> bool:
        if len(segment) != 1 or not isinstance(segment[0], Line):
            return False
        return segment[0].same_as(bisector_line(self.p, self.q))


def bisector_line(p: Point, q: Point) -> Line:
    mid = Point((p.x + q.x) / 2, (p.y + q.y) / 2)
    return Line(q.x - p.x, q.y - p.y, -((q.x - p.x) * mid.x + (q.y - p.y) * mid.y))


# ---------------------------------------------------------------------------
# programs and traces


StepSource = Union[StepRule, Callable[[Word], StepRule]]


@dataclass(frozen=True)
class ConstructionProgram:
    """A construction given by its root word and a step function.

    ``steps`` is set for programs defined by a fixed list of step sources
    (see :meth:`from_steps`); ``labels`` names the letters for the script
    formatter; ``macro`` records a named built-in the program came from.
    """

    root: tuple
    next_step: Callable[[Word], StepRule]
    declared_type: str = GENERAL
    max_steps: int = DEFAULT_MAX_STEPS
    target: Optional[Target] = None
    name: str = ""
    steps: Optional[tuple] = None
    labels: Optional[tuple[str, ...]] = None
    macro: Optional[tuple[str, tuple[str, ...]]] = None

    def __post_init__(self):
        if self.declared_type not in TYPES:
            raise ValueError(f"unknown construction type {self.declared_type!r}")
        if any(is_location(item) for item in self.root):
            raise ValueError("the root word may not contain locations")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")

    @classmethod
    def from_steps(cls, root: Sequence[ConfigItem], steps: Sequence[StepSource], **kw) -> "ConstructionProgram":
        """Program that takes ``steps`` in order, then ends.

        A step source may be a function of the current word, which is how
        non-uniform constructions are written.
        """
        root = tuple(root)
        steps = tuple(steps)
        n0 = len(root)

        def next_step(word: Word) -> StepRule:
            k = len(word) - n0
            if k >= len(steps):
                return End()
            s = steps[k]
            return s(word) if callable(s) else s

        return cls(root=root, next_step=next_step, steps=steps, **kw)

    @property
    def is_uniform(self) -> bool:
        """True when every step is a fixed rule with constant operands."""
        if self.steps is None:
            return False
        for s in self.steps:
            if not isinstance(s, (End, NewLine, NewCircle, NewIntersection, NewLocation, Choose)):
                return False
            if isinstance(s, NewLocation) and not is_location(s.loc):
                return False
        return True


@dataclass(frozen=True)
class StepRecord:
    rule: str
    operands: tuple[int, ...] = ()
    select: Optional[int] = None


@dataclass(frozen=True)
class Trace:
    word: tuple
    provenance: tuple  # tuple[StepRecord, ...], one per letter
    chooser_log: tuple  # tuple[(Location, Point), ...]
    root_length: int
    declared_type: str = GENERAL

    def __len__(self):
        return len(self.word)

    @property
    def points(self) -> list[Point]:
        return [x for x in self.word if isinstance(x, Point)]


# ---------------------------------------------------------------------------
# choosers


class Chooser(Protocol):
    def choose(self, location: Location, word: Word) -> Point: ...


class Sampler:
    """Uniform random choice inside each location."""

    def __init__(self, seed=0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def choose(self, location: Location, word: Word) -> Point:
        return location.sample(self.rng)


class Scripted:
    """Replays a fixed sequence of points."""

    def __init__(self, points: Iterable[Point]):
        self.points = list(points)
        self._next = 0

    @classmethod
    def from_trace(cls, trace: Trace) -> "Scripted":
        return cls(p for _, p in trace.chooser_log)

    def choose(self, location: Location, word: Word) -> Point:
        if self._next >= len(self.points):
            raise ChooserOutOfLocation("scripted chooser ran out of points")
        p = self.points[self._next]
        self._next += 1
        return p


class AdversaryX:
    """Chooses every arbitrary point through an X-provider (see ``ecs.adversary``)."""

    def __init__(self, provider):
        self.provider = provider

    def choose(self, location: Location, word: Word) -> Point:
        return self.provider.point_in(location)


# ---------------------------------------------------------------------------
# execution


def _apply(word: Word, step: StepRule, n: int, tol) -> tuple[ConfigItem, StepRecord]:
    if isinstance(step, NewLine):
        return line_through(word[step.i], word[step.j], tol), StepRecord("NewLine", (step.i, step.j))
    if isinstance(step, NewCircle):
        item = circle_from(word[step.i], word[step.j], word[step.k], tol)
        return item, StepRecord("NewCircle", (step.i, step.j, step.k))
    if isinstance(step, NewIntersection):
        try:
            pts = intersect(word[step.i], word[step.j], tol)
        except IdenticalCircles as exc:  # pragma: no cover - validate_step catches this
            raise GeometricFailure(str(exc), n) from exc
        if step.select >= len(pts):
            raise GeometricFailure(
                f"step {n}: curves {step.i} and {step.j} have {len(pts)} intersection point(s), "
                f"index {step.select} requested",
                n,
            )
        return pts[step.select], StepRecord("NewIntersection", (step.i, step.j), step.select)
    raise TypeError(step)


def _type_breach(declared: str, item, step) -> Optional[str]:
    if declared == STRAIGHTEDGE and isinstance(step, NewCircle) and isinstance(item, Circle):
        return "compass is forbidden in a straightedge construction"
    if declared == COMPASS and isinstance(step, NewLine):
        return "straightedge is forbidden in a compass construction"
    return None


def execute(program: ConstructionProgram, chooser: Chooser, tol: Tolerance | None = None) -> Trace:
    """Run one branch of ``program`` to a leaf."""
    t = tol or get_tolerance()
    word: list = list(program.root)
    prov: list = [StepRecord("root")] * len(word)
    log: list = []
    for n in itertools.count():
        if n >= program.max_steps:
            raise StepLimit(f"no End rule within {program.max_steps} steps")
        w = tuple(word)
        step = program.next_step(w)
        bad = validate_step(w, step, t)
        if bad is not None:
            raise InvalidStep(f"step {n}: {bad}", n, bad.rule)
        if isinstance(step, End):
            break
        if isinstance(step, NewLocation):
            loc = step.resolve(w)
            word.append(loc)
            prov.append(StepRecord("NewLocation"))
            continue
        if isinstance(step, Choose):
            loc = word[-1]
            p = chooser.choose(loc, w)
            if not isinstance(p, Point) or not loc.contains(p, t):
                raise ChooserOutOfLocation(f"step {n}: chosen point {p} is not in {loc}")
            word.append(p)
            prov.append(StepRecord("Choose", (len(word) - 2,)))
            log.append((loc, p))
            continue
        item, rec = _apply(w, step, n, t)
        breach = _type_breach(program.declared_type, item, step)
        if breach:
            raise InvalidStep(f"step {n}: {breach}", n, step.rule)
        word.append(item)
        prov.append(rec)
    return Trace(tuple(word), tuple(prov), tuple(log), len(program.root), program.declared_type)


# ---------------------------------------------------------------------------
# constructs / weakly constructs


def check_constructs(trace: Trace | Sequence, target: Target) -> bool:
    """Does some contiguous final segment of the word satisfy ``target``?"""
    word = tuple(trace.word if isinstance(trace, Trace) else trace)
    arities = getattr(target, "arities", None)
    starts = range(len(word), -1, -1) if arities is None else (len(word) - a for a in arities if a <= len(word))
    return any(target(word[j:]) for j in starts)


def weak_witness(word: Sequence, target: Target, max_free: int = 10) -> Optional[tuple[int, ...]]:
    """Indices of a subsequence of ``word`` that, in the returned order, satisfies ``target``.

    Targets without declared arities are tried on every subset size, which
    is only feasible for short words (``max_free`` letters).
    """
    word = tuple(word)
    arities = getattr(target, "arities", None)
    if arities is None:
        if len(word) > max_free:
            raise ValueError("target without arities: word too long for exhaustive search")
        arities = range(len(word) + 1)
    for a in arities:
        if a > len(word):
            continue
        for perm in itertools.permutations(range(len(word)), a):
            if target(tuple(word[i] for i in perm)):
                return perm
    return None


def check_weakly_constructs(trace: Trace | Sequence, target: Target) -> bool:
    word = trace.word if isinstance(trace, Trace) else trace
    return weak_witness(word, target) is not None


# ---------------------------------------------------------------------------
# type audit


@dataclass(frozen=True)
class TypeAudit:
    type: str
    consistent: frozenset
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def type_audit(trace: Trace, declared: Optional[str] = None) -> TypeAudit:
    """Smallest construction type consistent with the rules the trace used.

    Repeating a point as a degenerate circle counts as neither device.  A
    trace that used neither device is reported as ``straightedge`` (it is
    also a compass construction, see ``consistent``).
    """
    declared = declared or trace.declared_type
    compass_at = [
        n for n, (rec, item) in enumerate(zip(trace.provenance, trace.word))
        if rec.rule == "NewCircle" and isinstance(item, Circle)
    ]
    straight_at = [n for n, rec in enumerate(trace.provenance) if rec.rule == "NewLine"]
    consistent = {GENERAL}
    if not compass_at:
        consistent.add(STRAIGHTEDGE)
    if not straight_at:
        consistent.add(COMPASS)
    if compass_at and straight_at:
        kind = GENERAL
    elif compass_at:
        kind = COMPASS
    else:
        kind = STRAIGHTEDGE
    violations = []
    if declared == STRAIGHTEDGE:
        violations += [f"letter {n}: non-degenerate circle in a straightedge construction" for n in compass_at]
    elif declared == COMPASS:
        violations += [f"letter {n}: line in a compass construction" for n in straight_at]
    return TypeAudit(kind, frozenset(consistent), tuple(violations))


# ---------------------------------------------------------------------------
# from weakly constructing to constructing


def _rederive(word: Sequence, i: int, tol=None) -> StepRule:
    """A step appending a copy of ``word[i]``, using the same device that made it."""
    item = word[i]
    earlier = [(n, x) for n, x in enumerate(word[:i]) if isinstance(x, Point)]
    if isinstance(item, Point):
        return NewCircle(i, i, i)
    if isinstance(item, Line):
        on = [n for n, p in earlier if item.contains(p, tol)]
        for a, b in itertools.combinations(on, 2):
            if distance(word[a], word[b]) > (tol or get_tolerance()).eps_abs:
                return NewLine(a, b)
    if isinstance(item, Circle):
        centers = [n for n, p in earlier if p.isclose(item.center, tol)]
        for c in centers:
            for a, b in itertools.combinations([n for n, _ in earlier], 2):
                if abs(distance(word[a], word[b]) - item.radius) <= (tol or get_tolerance()).eps_abs:
                    return NewCircle(c, a, b)
    raise InvalidStep(f"letter {i} ({item!r}) cannot be re-derived from earlier letters")


def _check_separated(word: Sequence, root_length: int, witness: Sequence[int]) -> None:
    root = word[:root_length]
    for i in witness:
        item = word[i]
        for r in root:
            if type(r) is type(item) and (
                item.isclose(r) if isinstance(item, Point) else item.same_as(r)
            ):
                raise NotSeparated(f"target letter {item!r} already appears in the root")


def strengthen_trace(trace: Trace, target: Target) -> Trace:
    """Append re-derivations so a weakly constructing leaf ends with a target word."""
    if check_constructs(trace, target):
        return trace
    wit = weak_witness(trace.word, target)
    if wit is None:
        return trace
    _check_separated(trace.word, trace.root_length, wit)
    word, prov = list(trace.word), list(trace.provenance)
    for i in wit:
        step = _rederive(word, i)
        item, rec = _apply(tuple(word), step, len(word), None)
        word.append(item)
        prov.append(rec)
    return replace(trace, word=tuple(word), provenance=tuple(prov))


def strengthen_weak(program: ConstructionProgram, target: Target) -> ConstructionProgram:
    """Prolong every leaf of ``program`` so that it constructs ``target``.

    The original step function is consulted on prefixes to find where its
    branch ended; after that point the witness letters are re-derived one by
    one (points as degenerate circles, lines and circles by their devices),
    so the construction type is unchanged.
    """
    n0 = len(program.root)
    orig = program.next_step

    def original_end(word: Word) -> Optional[int]:
        for m in range(n0, len(word) + 1):
            if isinstance(orig(word[:m]), End):
                return m
        return None

    def next_step(word: Word) -> StepRule:
        m0 = original_end(word)
        if m0 is None:
            return orig(word)
        base = word[:m0]
        if check_constructs(base, target):
            return End()
        wit = weak_witness(base, target)
        if wit is None:
            return End()
        _check_separated(base, n0, wit)
        k = len(word) - m0
        if k >= len(wit):
            return End()
        return _rederive(word, wit[k])

    return replace(
        program,
        next_step=next_step,
        steps=None,
        labels=None,
        macro=None,
        target=program.target or target,
        name=(program.name + "+strengthened") if program.name else "strengthened",
    )


# ---------------------------------------------------------------------------
# set-system refinement


def check_refinement(original: Location, refined: Location, rng=None, samples: int = 256) -> None:
    """Raise :class:`RefinementNotSubset` unless ``refined`` lies inside ``original``.

    Disc-in-disc and segment-in-segment are decided exactly; other pairs are
    checked on random samples of ``refined``.
    """
    eps = get_tolerance().eps_abs
    if isinstance(original, Disc) and isinstance(refined, Disc):
        if distance(original.center, refined.center) + refined.radius <= original.radius + eps:
            return
        u = refined.center - original.center
        n = math.hypot(u.x, u.y) or 1.0
        far = Point(
            refined.center.x + refined.radius * (u.x / n if n else 1.0),
            refined.center.y + refined.radius * (u.y / n if n else 0.0),
        )
        raise RefinementNotSubset(f"{refined} is not inside {original}", witness=far)
    if isinstance(original, HSegment) and isinstance(refined, HSegment):
        if abs(original.c - refined.c) <= eps and original.a - eps <= refined.a and refined.b <= original.b + eps:
            return
        witness = Point(refined.a if refined.a < original.a else refined.b, refined.c)
        raise RefinementNotSubset(f"{refined} is not inside {original}", witness=witness)
    rng = rng or np.random.default_rng(0)
    candidates = [refined.p, refined.q] if isinstance(refined, PointPair) else [refined.sample(rng) for _ in range(samples)]
    for p in candidates:
        if not original.contains(p):
            raise RefinementNotSubset(f"sampled point {p} of {refined} is not in {original}", witness=p)


def refine_set_system(program: ConstructionProgram, refine: Callable[[Location], Location]) -> ConstructionProgram:
    """Same construction with every location shrunk by ``refine``.

    Each refined location is checked to be a subset of the original.  The
    original step function always sees the word with its own (unrefined)
    locations, so non-location letters follow the original tree exactly.
    """
    originals: dict = {}

    def refined_loc(loc: Location) -> Location:
        new = refine(loc)
        check_refinement(loc, new)
        originals[new] = loc
        return new

    if program.is_uniform:
        steps = tuple(
            NewLocation(refined_loc(s.loc)) if isinstance(s, NewLocation) else s for s in program.steps
        )
        return ConstructionProgram.from_steps(
            program.root,
            steps,
            declared_type=program.declared_type,
            max_steps=program.max_steps,
            target=program.target,
            name=program.name,
            labels=program.labels,
        )

    orig = program.next_step

    def next_step(word: Word) -> StepRule:
        view = tuple(originals.get(x, x) if is_location(x) else x for x in word)
        step = orig(view)
        if isinstance(step, NewLocation):
            return NewLocation(refined_loc(step.resolve(view)))
        return step

    return replace(program, next_step=next_step, steps=None, labels=None, macro=None)

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecs.constructions import bisector_program, builtin, center_via_u_program, equilateral_triangle_program
from ecs.errors import (
    ChooserOutOfLocation,
    GeometricFailure,
    InvalidStep,
    NotSeparated,
    RefinementNotSubset,
    StepLimit,
)
from ecs.geometry import Circle, Line, Point, distance, line_through
from ecs.model import (
    COMPASS,
    GENERAL,
    STRAIGHTEDGE,
    Choose,
    ConstructionProgram,
    Disc,
    EquilateralTarget,
    HSegment,
    NewCircle,
    NewIntersection,
    NewLine,
    NewLocation,
    PointPair,
    PointTarget,
    Sampler,
    Scripted,
    Trace,
    UnitDistanceTarget,
    check_constructs,
    check_refinement,
    check_weakly_constructs,
    execute,
    refine_set_system,
    strengthen_trace,
    strengthen_weak,
    type_audit,
    validate_step,
)

P, Q = Point(0, 0), Point(1, 0)


# --- locations -----------------------------------------------------------


def test_location_invariants():
    with pytest.raises(ValueError):
        Disc(P, 0.0)
    with pytest.raises(ValueError):
        HSegment(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        PointPair(P, P)


def test_location_membership_closed_up_to_eps():
    d = Disc(P, 1.0)
    assert d.contains(Point(1.0, 0.0)) and not d.contains(Point(1.1, 0))
    s = HSegment(0.0, 1.0, 2.0)
    assert s.contains(Point(0.5, 2.0)) and not s.contains(Point(0.5, 2.1))
    assert PointPair(P, Q).contains(Q) and not PointPair(P, Q).contains(Point(0.5, 0))


# --- validate_step -------------------------------------------------------


def test_validate_step_oracles():
    assert validate_step((P, Q), NewLine(0, 1)) is None
    v = validate_step((P,), NewLine(0, 0))
    assert v is not None and v.rule == 2
    v = validate_step((Disc(P, 1),), NewLine(0, 0))
    assert v is not None and v.rule == 6
    assert validate_step((Disc(P, 1),), Choose()) is None
    assert validate_step((P,), Choose()) is not None
    assert validate_step((Line.horizontal(0),), NewIntersection(0, 0)) is not None
    assert validate_step((P, Q), NewLine(0, 5)) is not None


# --- execute -------------------------------------------------------------


def test_equilateral_trace_shape():
    t = execute(equilateral_triangle_program(), Sampler(1))
    assert len(t.word) == 9
    kinds = [type(x).__name__ for x in t.word]
    assert kinds == ["Disc", "Point", "Disc", "Point", "Circle", "Circle", "Point", "Point", "Point"]
    assert t.word[7] == t.word[1] and t.word[8] == t.word[3]
    assert check_constructs(t, EquilateralTarget())


def test_single_line_program():
    prog = ConstructionProgram.from_steps([P, Q], [NewLine(0, 1)])
    t = execute(prog, Sampler(0))
    assert len(t.word) == 3 and isinstance(t.word[2], Line)


def test_center_via_u_final_letter():
    t = execute(center_via_u_program(Circle(P, 2.0)), Sampler(3))
    assert distance(t.word[-1], P) < 1e-9


def test_step_limit():
    prog = ConstructionProgram(root=(P, Q), next_step=lambda w: NewCircle(0, 0, 0), max_steps=5)
    with pytest.raises(StepLimit):
        execute(prog, Sampler(0))


def test_chooser_out_of_location():
    prog = ConstructionProgram.from_steps([], [NewLocation(Disc(P, 1)), Choose()])
    with pytest.raises(ChooserOutOfLocation):
        execute(prog, Scripted([Point(5, 5)]))


def test_empty_intersection_is_reported_with_index():
    prog = ConstructionProgram.from_steps(
        [P, Q, Point(10, 0)], [NewCircle(0, 0, 1), NewCircle(2, 0, 1), NewIntersection(3, 4, 0)]
    )
    with pytest.raises((GeometricFailure, InvalidStep)) as info:
        execute(prog, Sampler(0))
    assert info.value.step_index == 2


def test_declared_type_enforced():
    prog = ConstructionProgram.from_steps([P, Q], [NewCircle(0, 0, 1)], declared_type=STRAIGHTEDGE)
    with pytest.raises(InvalidStep):
        execute(prog, Sampler(0))
    # degenerate circles are fine in a straightedge construction
    ok = ConstructionProgram.from_steps([P, Q], [NewCircle(0, 1, 1)], declared_type=STRAIGHTEDGE)
    assert execute(ok, Sampler(0)).word[-1] == P


def test_replay_is_bit_identical():
    for prog in (equilateral_triangle_program(), builtin("origin"), builtin("center")):
        t = execute(prog, Sampler(11))
        again = execute(prog, Scripted.from_trace(t))
        assert again == t


def test_provenance_is_exhaustive():
    t = execute(builtin("unit"), Sampler(4))
    for n, (item, rec) in enumerate(zip(t.word, t.provenance)):
        if isinstance(item, Point) and n >= t.root_length:
            assert rec.rule in ("NewIntersection", "NewCircle", "Choose")
            if rec.rule == "Choose":
                assert t.word[n - 1].contains(item)
            if rec.rule == "NewCircle":
                assert t.word[rec.operands[0]] == item


# --- constructs / weakly -------------------------------------------------


def test_constructs_and_weakly():
    a, x, b = Point(0, 0), Point(5, 5), Point(1, 0)
    assert check_weakly_constructs([a, x, b], UnitDistanceTarget())
    assert not check_constructs([a, x, b], UnitDistanceTarget())
    assert check_constructs([x, a, b], UnitDistanceTarget())
    assert not check_constructs([], UnitDistanceTarget())
    # permutation: K = {a b} in that order, trace has b ... a
    k = PointTarget(Point(1, 0))
    assert check_weakly_constructs([b, x], k) and not check_constructs([b, x], k)


def test_empty_word_target():
    class Anything:
        arities = (0,)

        def __call__(self, seg):
            return len(seg) == 0

    assert check_weakly_constructs([P, Q], Anything())


# --- type audit ----------------------------------------------------------


def test_type_audit_oracles():
    assert type_audit(execute(builtin("center"), Sampler(0))).type == STRAIGHTEDGE
    assert type_audit(execute(equilateral_triangle_program(), Sampler(0))).type == COMPASS
    assert type_audit(execute(bisector_program(P, Point(2, 0)), Sampler(0))).type == GENERAL
    audit = type_audit(execute(bisector_program(P, Point(2, 0)), Sampler(0)), declared=COMPASS)
    assert not audit.ok


# --- strengthen ----------------------------------------------------------


def _trace(word, root_length=0):
    from ecs.model import StepRecord

    return Trace(tuple(word), tuple(StepRecord("root") for _ in word), (), root_length)


def test_strengthen_trace_appends_degenerate_circles():
    a, x, b = Point(0, 0), Point(5, 5), Point(1, 0)
    t = strengthen_trace(_trace([a, x, b]), UnitDistanceTarget())
    assert check_constructs(t, UnitDistanceTarget())
    assert t.word[:3] == (a, x, b)
    assert [r.rule for r in t.provenance[3:]] == ["NewCircle", "NewCircle"]


def test_strengthen_not_separated():
    a, b = Point(0, 0), Point(1, 0)
    with pytest.raises(NotSeparated):
        strengthen_trace(_trace([a, b, Point(3, 3)], root_length=2), UnitDistanceTarget())


def test_strengthen_weak_arbitrary_point_program():
    prog = ConstructionProgram.from_steps(
        [],
        [NewLocation(Disc(P, 0.1)), Choose(), NewLocation(Disc(Point(3, 0), 0.1)), Choose()],
    )

    class FirstPointNearOrigin:
        arities = (1,)

        def __call__(self, seg):
            return len(seg) == 1 and isinstance(seg[0], Point) and distance(seg[0], P) < 0.1 + 1e-9

    target = FirstPointNearOrigin()
    strong = strengthen_weak(prog, target)
    t0, t1 = execute(prog, Sampler(2)), execute(strong, Sampler(2))
    assert not check_constructs(t0, target) and check_constructs(t1, target)
    assert t1.word[-1] == t0.word[1]
    assert t1.provenance[-1].rule == "NewCircle"


def test_strengthen_weak_idempotent_on_constructing():
    prog = equilateral_triangle_program()
    strong = strengthen_weak(prog, EquilateralTarget())
    assert execute(strong, Sampler(5)).word == execute(prog, Sampler(5)).word


# --- refinement ----------------------------------------------------------


def test_refinement_checks():
    check_refinement(Disc(P, 1), Disc(P, 0.5))
    check_refinement(HSegment(0, 2, 1), HSegment(0.5, 1, 1))
    with pytest.raises(RefinementNotSubset) as info:
        check_refinement(Disc(P, 1), Disc(Point(5, 0), 0.5))
    assert not Disc(P, 1).contains(info.value.witness)
    with pytest.raises(RefinementNotSubset):
        check_refinement(HSegment(0, 2, 1), HSegment(0, 2, 1.5))


def test_refine_disc_system_keeps_targets():
    prog = equilateral_triangle_program()
    half = refine_set_system(prog, lambda d: Disc(d.center, d.radius / 2))
    for s in range(10):
        t = execute(half, Sampler(s))
        assert check_constructs(t, EquilateralTarget())
        assert type_audit(t).type == COMPASS
        for loc, p in t.chooser_log:
            assert loc.radius <= 0.5 + 1e-12


def test_refine_disjoint_fails():
    prog = equilateral_triangle_program()
    with pytest.raises(RefinementNotSubset):  # uniform programs are checked up front
        refine_set_system(prog, lambda d: Disc(Point(d.center.x + 10, d.center.y), d.radius / 2))


def test_refine_non_uniform_program():
    prog = builtin("origin")
    shrunk = refine_set_system(
        prog, lambda s: HSegment(s.a + (s.b - s.a) / 4, s.b - (s.b - s.a) / 4, s.c) if isinstance(s, HSegment) else s
    )
    for seed in range(10):
        t = execute(shrunk, Sampler(seed))
        assert check_constructs(t, prog.target)


# --- properties ----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_trace_letter_validates(seed):
    t = execute(equilateral_triangle_program(), Sampler(seed))
    for n in range(t.root_length, len(t.word)):
        rec = t.provenance[n]
        if rec.rule == "NewLine":
            ln = line_through(t.word[rec.operands[0]], t.word[rec.operands[1]])
            assert ln.same_as(t.word[n])
    assert check_constructs(t, EquilateralTarget())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 1.0))
def test_refinement_property(seed, factor):
    prog = bisector_program(P, Point(2, 1))
    refined = refine_set_system(prog, lambda d: Disc(d.center, d.radius * factor) if isinstance(d, Disc) else d)
    t = execute(refined, Sampler(seed))
    assert check_constructs(t, prog.target)
    assert type_audit(t).type == type_audit(execute(prog, Sampler(seed))).type


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=2, max_size=6))
def test_strengthen_output_constructs(pts):
    word = [Point(x, y) for x, y in pts]
    target = PointTarget(word[0])
    t = strengthen_trace(_trace(word), target)
    assert check_constructs(t, target)
    assert type_audit(t).type == STRAIGHTEDGE

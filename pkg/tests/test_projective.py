import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ecs.errors import BadParameter, CoincidentPoints, IdenticalLines, LevelMismatch, ZeroTriple
from ecs.projective import (
    CANONICAL_K,
    F,
    F0_BAR,
    F_inv,
    FprFamily,
    ProjCircle,
    ProjDisc,
    ProjLine,
    ProjPoint,
    f0_bar,
    f_pr,
    general_f0_bar,
    proj_circle_from,
    proj_intersect_line_circle,
    proj_intersect_lines,
    proj_line_through,
    proj_transfer,
    projective_adversary_run,
    run_battery,
)

SQRT2 = math.sqrt(2)
C_PRIME = ProjPoint((-1 / math.sqrt(3), 0.0, math.sqrt(2 / 3)))


# --- oracles -------------------------------------------------------------


def test_canonical_sign():
    assert ProjPoint((0, 0, -2)).isclose(ProjPoint((0, 0, 1)))
    assert tuple(ProjPoint((0, 0, -2))) == (0.0, 0.0, 1.0)
    assert ProjPoint((1, -1, 0)).v[1] > 0


def test_line_through_and_meet():
    ln = proj_line_through(ProjPoint((1, 0, 0)), ProjPoint((0, 1, 0)))
    assert ln.same_as(ProjLine((0, 0, 1)))
    assert proj_line_through(ProjPoint((1, 2, 3)), ProjPoint((0, 1, 0))).same_as(
        proj_line_through(ProjPoint((-1, -2, -3)), ProjPoint((0, -1, 0)))
    )
    with pytest.raises(CoincidentPoints):
        proj_line_through(ProjPoint((1, 2, 3)), ProjPoint((-2, -4, -6)))
    assert proj_intersect_lines(ProjLine((0, 0, 1)), ProjLine((0, 1, 0))).isclose(ProjPoint((1, 0, 0)))
    # x = 0 and x = 1 in the plane z = 1 meet at infinity
    m = proj_intersect_lines(ProjLine((1, 0, 0)), ProjLine((1, 0, -1)))
    assert abs(m.v[2]) < 1e-15
    with pytest.raises(IdenticalLines):
        proj_intersect_lines(ProjLine((1, 2, 3)), ProjLine((-1, -2, -3)))


def test_line_circle():
    assert proj_intersect_line_circle(ProjLine((0, 0, 1)), CANONICAL_K) == []
    # a line through c cuts k in two projective points, four sphere points
    ln = ProjLine((1, 0, 0))
    pts = proj_intersect_line_circle(ln, CANONICAL_K)
    assert len(pts) == 2
    assert len(proj_intersect_line_circle(ln, CANONICAL_K, sphere=True)) == 4
    for p in pts:
        assert ln.contains(p) and CANONICAL_K.contains(p)
    assert [tuple(p.v) for p in pts] == sorted(tuple(p.v) for p in pts)


def test_circle_from():
    p = ProjPoint((0, 0, 1))
    q = ProjPoint((1, 2, 3))
    assert proj_circle_from(p, q, q) is p
    r1, r2 = ProjPoint((1, 0, 0)), ProjPoint((1, 1, 0))
    k = proj_circle_from(p, r1, r2)
    assert isinstance(k, ProjCircle)
    assert k.level == pytest.approx(1 / SQRT2, abs=1e-15)
    assert k.radius == pytest.approx(math.pi / 4)
    # antipodal representatives give the same circle
    k2 = proj_circle_from(p, r1, ProjPoint((-1, -1, 0)))
    assert k2.level == pytest.approx(k.level)


def test_F_cases():
    assert F(ProjPoint((0, 0, 1))) == (0.0, 0.0, 1.0)
    assert F(ProjPoint((0, 1, 0))) == (0.0, 1.0, 0.0)
    assert F(ProjPoint((1, 0, 0))) == (1.0, 0.0, 0.0)
    x, y, z = F(ProjPoint((2, 4, -2)))
    assert (x, y, z) == pytest.approx((-1.0, -2.0, 1.0))
    # canonical k lands on the unit circle of the plane z = 1
    for p in CANONICAL_K.sample(np.random.default_rng(0), 50):
        x, y, z = F(p)
        assert z == 1.0 and math.hypot(x, y) == pytest.approx(1.0, abs=1e-12)


def test_f0_bar_oracles():
    assert f0_bar((0, 1, 0)) == (0.0, 1.0, 0.0)
    # the ratio is exact: y and z vanish without rounding
    x, y, z = f0_bar((-SQRT2, 0, 1))
    assert (y, z) == (0.0, 0.0) and x > 0
    assert ProjPoint((x, y, z)).v.tolist() == [1.0, 0.0, 0.0]
    with pytest.raises(ZeroTriple):
        f0_bar((0, 0, 0))
    assert np.array_equal(general_f0_bar(SQRT2).m, F0_BAR.m)
    assert F0_BAR.m[0, 2] == pytest.approx(-1.0)


def test_general_f0_bar():
    g = general_f0_bar(2.0)
    mm = g.m @ g.m
    assert np.allclose(mm / mm[0, 0], np.eye(3), atol=1e-12)
    with pytest.raises(BadParameter):
        general_f0_bar(1.0)


def test_f_pr_of_c():
    c = ProjPoint((0, 0, 1))
    assert f_pr(c).isclose(C_PRIME)
    assert FprFamily().c_prime.isclose(C_PRIME)
    # the printed second representative is the antipode once its typo is corrected
    assert ProjPoint((1 / math.sqrt(3), 0, -math.sqrt(2 / 3))).isclose(C_PRIME)


def test_transfer():
    k = ProjCircle((0, 0, 1), 0.6)
    assert np.allclose(proj_transfer(k, k).m, np.eye(3))
    k2 = ProjCircle((1, 0, 0), 0.6)
    g = proj_transfer(k, k2)
    assert g(k.center).isclose(k2.center)
    for p in k.sample(np.random.default_rng(1), 20):
        assert k2.contains(g(p))
    with pytest.raises(LevelMismatch):
        proj_transfer(k, ProjCircle((1, 0, 0), 0.5))


def test_fpr_family_sends_c_to_p():
    fam = FprFamily()
    c = ProjPoint((0, 0, 1))
    for t in np.linspace(0.1, 6.0, 12):
        p = fam.point_on_k1(t)
        assert fam.f_pr(p)(c).isclose(p)
    with pytest.raises(BadParameter):
        fam.f_pr(ProjPoint((0, 0, 1)))


def test_disc_membership():
    d = ProjDisc((0, 0, 1), 0.9)
    assert d.contains(ProjPoint((0.1, 0, -1)))
    assert not d.contains(ProjPoint((1, 0, 1)))


def test_adversary_avoids_center():
    for seed in range(5):
        rep = projective_adversary_run(CANONICAL_K, seed=seed, steps=30)
        assert rep.avoided


def test_battery_passes():
    rows = run_battery(seed=0, n=1000)
    assert len(rows) >= 10
    assert all(ok for _, ok, _ in rows), [r for r in rows if not r[1]]


# --- properties ----------------------------------------------------------

vec = st.tuples(*(st.floats(-1, 1, allow_nan=False),) * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=200)
@given(vec)
def test_F_round_trip(v):
    p = ProjPoint(v)
    assert F_inv(F(p)).isclose(p, 1e-12)


@settings(max_examples=200)
@given(vec)
def test_f0_involution(v):
    p = ProjPoint(v)
    assert F0_BAR(F0_BAR(p)).isclose(p, 1e-9)
    assert f_pr(f_pr(p)).isclose(p, 1e-9)


@settings(max_examples=200)
@given(vec, vec)
def test_lines_go_to_lines(u, v):
    p, q = ProjPoint(u), ProjPoint(v)
    assume(not p.isclose(q, 1e-6))
    ln = proj_line_through(p, q)
    img = F0_BAR.apply_line(ln)
    assert img.contains(F0_BAR(p)) and img.contains(F0_BAR(q))


@settings(max_examples=200)
@given(vec, vec)
def test_distinct_lines_always_meet(u, v):
    l1, l2 = ProjLine(u), ProjLine(v)
    assume(not l1.same_as(l2, 1e-6))
    m = proj_intersect_lines(l1, l2)
    assert l1.contains(m) and l2.contains(m)


@settings(max_examples=200)
@given(st.floats(0, 2 * math.pi))
def test_f_pr_fixes_canonical_k(t):
    p = ProjPoint((math.cos(t), math.sin(t), 1.0))
    assert CANONICAL_K.contains(p)
    assert CANONICAL_K.contains(f_pr(p))


@settings(max_examples=100)
@given(vec, st.floats(0.05, 0.95))
def test_line_circle_outputs_satisfy_both(n, level):
    ln = ProjLine(n)
    k = ProjCircle((0.3, -0.2, 0.9), level)
    for p in proj_intersect_line_circle(ln, k):
        assert ln.contains(p) and k.contains(p)

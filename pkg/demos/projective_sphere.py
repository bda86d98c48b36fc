"""
The projective plane as a sphere with antipodes glued
=====================================================

Points are unit vectors up to sign, lines are great circles, and a circle is
the set where |<x, axis>| equals a fixed level.
"""

import math

import numpy as np

from ecs.projective import (
    CANONICAL_K,
    F0_BAR,
    FprFamily,
    ProjLine,
    ProjPoint,
    proj_intersect_line_circle,
    proj_intersect_lines,
    projective_adversary_run,
    run_battery,
)

## No parallels
m = proj_intersect_lines(ProjLine((1, 0, 0)), ProjLine((1, 0, -1)))
print("x=0 and x=1 meet at", m.text())

## A line through the centre cuts the canonical circle twice (four sphere points)
ln = ProjLine((1, 0, 0))
print([p.text() for p in proj_intersect_line_circle(ln, CANONICAL_K)])

## The involution and its conjugates
fam = FprFamily()
print("image of the pole:", fam.c_prime.text())
rng = np.random.default_rng(0)
pts = [ProjPoint(v) for v in rng.normal(size=(5, 3))]
print("involution errors:", [float(np.linalg.norm(F0_BAR(F0_BAR(p)).v - p.v)) for p in pts])
p = fam.point_on_k1(1.0)
print("f_pr,p sends the pole to p:", fam.f_pr(p)(ProjPoint((0, 0, 1))).isclose(p))

## Battery and adversary
for name, ok, detail in run_battery(seed=1, n=500):
    print(f"{'PASS' if ok else 'FAIL'}  {name:<38}{detail}")
rep = projective_adversary_run(CANONICAL_K, seed=3)
print("adversary avoided the centre:", rep.avoided, "after", len(rep.letters), "letters")
print("level of the canonical circle:", CANONICAL_K.level, "=", 1 / math.sqrt(2))

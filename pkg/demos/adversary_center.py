"""
Choosing arbitrary points badly
===============================

An adversary that answers every "pick a point in this disc" with a point of
a dense set X that is closed under lines and the given circle keeps every
straightedge construction away from the centre.  What runs here is a finite
approximation of X, so each run checks one branch and nothing more.
"""

import numpy as np

from ecs.adversary import (
    UNIVERSAL_NOTE,
    ForbiddenPoint,
    adversary_run,
    hilbert_x_provider,
    random_program,
)
from ecs.constructions import center_via_u_program
from ecs.errors import UnsupportedLocation
from ecs.geometry import Circle, Point, distance
from ecs.model import STRAIGHTEDGE, Choose, ConstructionProgram, Disc, NewLocation

k = Circle(Point(0.0, 0.0), 1.0)

## Asking for a point right next to the centre
for radius in (0.5, 0.05, 0.005):
    prog = ConstructionProgram.from_steps([k], [NewLocation(Disc(k.center, radius)), Choose()])
    rep = adversary_run(prog, ForbiddenPoint(k.center), hilbert_x_provider(k, seed=1))
    print(f"disc radius {radius}: got a point at distance {distance(rep.trace.word[-1], k.center):.3e}")

## Random straightedge scripts
closest = []
for i in range(20):
    prog = random_program(i, STRAIGHTEDGE, root=(k,), max_letters=30)
    rep = adversary_run(prog, ForbiddenPoint(k.center), hilbert_x_provider(k, seed=i))
    pts = [p for p in rep.trace.word if isinstance(p, Point)]
    closest.append(min(distance(p, k.center) for p in pts))
    assert rep.avoided
print("closest approach per script:", np.round(closest, 4))
print(UNIVERSAL_NOTE)

## A program that needs more than discs
# Segment locations are outside what X can serve, so the adversary declines.
try:
    adversary_run(center_via_u_program(k), ForbiddenPoint(k.center), hilbert_x_provider(k))
except UnsupportedLocation as e:
    print("declined:", e)

"""
A dense rational-looking set on a circle
========================================

Each rational alpha gives a point of the circle centred at (3/2, 0) with
radius sqrt(5)/2.  The histogram shows how the images spread around it.
"""

from fractions import Fraction

import numpy as np

from ecs.constructions import Y_CIRCLE, arc_histogram, default_alphas, y_set_point

for a in (-7, 0, 100):
    p = y_set_point(Fraction(a))
    print(f"alpha={a:>4}: ({p.x:.15f}, {p.y:.15f})  residual {Y_CIRCLE.value(p):.1e}")

## Coverage of the circle
edges, counts = arc_histogram(default_alphas(), bucket=0.1)
print("empty buckets on the half-step grid:", int((counts == 0).sum()), "of", len(counts))
fine = [Fraction(k, 10) for k in range(-1000, 1001)]
_, counts = arc_histogram(fine, bucket=0.1)
print("empty buckets on the tenth-step grid:", int((counts == 0).sum()))
print("fullest bucket holds", counts.max(), "points, median", int(np.median(counts)))

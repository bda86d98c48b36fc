"""
Constructions with arbitrary points
===================================

Classical constructions pick "an arbitrary point" now and then.  Here a
program is a step function over the word built so far, and a chooser
supplies each arbitrary point from the location the program names.
"""

from ecs import builtin, check_constructs, execute, format, parse, type_audit
from ecs.constructions import center_via_u_program
from ecs.geometry import Circle, Point, distance
from ecs.model import Sampler

## The equilateral triangle, chosen at random
prog = builtin("equilateral")
trace = execute(prog, Sampler(0))
p3, p1, p2 = trace.word[-3:]
print("sides:", distance(p1, p2), distance(p2, p3), distance(p3, p1))
print("constructs target:", check_constructs(trace, prog.target))
print("audited type:", type_audit(trace).type)

## The same program as a script
text = format(prog)
print(text)
assert format(parse(text)) == text

## Centre of a circle with the straightedge, given the set U
# The program draws points on horizontal segments, which is what U offers.
k = Circle(Point(1.5, -0.5), 2.0)
for seed in range(3):
    t = execute(center_via_u_program(k), Sampler(seed))
    print(f"seed {seed}: centre found at {t.word[-1]}, error {distance(t.word[-1], k.center):.1e}")
print("type:", type_audit(t).type)

## Unit length and the origin, also through U
for name in ("unit", "origin"):
    t = execute(builtin(name), Sampler(7))
    print(name, "->", t.word[-2:] if name == "unit" else t.word[-1])

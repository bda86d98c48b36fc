"""Euclidean constructions with arbitrary points.

The submodules build on each other: :mod:`ecs.geometry` holds the exact
incidence kernel, :mod:`ecs.model` runs construction programs, :mod:`ecs.dsl`
reads and writes ``.ecs`` scripts, :mod:`ecs.maps` has the plane deformations,
:mod:`ecs.closure` and :mod:`ecs.adversary` build avoiding point sets, and
:mod:`ecs.projective` repeats the centre argument on the sphere.
"""

from .constructions import BUILTINS, builtin, y_set_point
from .dsl import format, parse, parse_file
from .geometry import Circle, Line, Point, Tolerance, tolerance
from .model import (
    ConstructionProgram,
    Disc,
    HSegment,
    PointPair,
    Sampler,
    Scripted,
    Trace,
    check_constructs,
    check_weakly_constructs,
    execute,
    type_audit,
)

__all__ = [
    "BUILTINS",
    "Circle",
    "ConstructionProgram",
    "Disc",
    "HSegment",
    "Line",
    "Point",
    "PointPair",
    "Sampler",
    "Scripted",
    "Tolerance",
    "Trace",
    "builtin",
    "check_constructs",
    "check_weakly_constructs",
    "execute",
    "format",
    "parse",
    "parse_file",
    "tolerance",
    "type_audit",
    "y_set_point",
]

__version__ = "0.1.0"

"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ECSError(Exception):
    """Base class for all errors raised by ``ecs``."""


# geometry kernel
class GeometryError(ECSError):
    pass


class CoincidentPoints(GeometryError):
    pass


class IdenticalCircles(GeometryError):
    pass


# construction model
class ConstructionError(ECSError):
    pass


class InvalidStep(ConstructionError):
    """A step rule was illegal for the current word."""

    def __init__(self, message: str, step_index: int | None = None, rule: int | None = None):
        super().__init__(message)
        self.step_index = step_index
        self.rule = rule


class StepLimit(ConstructionError):
    pass


class ChooserOutOfLocation(ConstructionError):
    pass


class GeometricFailure(ConstructionError):
    """A required geometric object does not exist (e.g. an empty intersection)."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class NotSeparated(ConstructionError):
    pass


class RefinementNotSubset(ConstructionError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# script language
class ParseError(ECSError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UseBeforeDefine(ParseError):
    pass


class TypeHeaderViolation(ParseError):
    pass


class RuleViolation(ParseError):
    """Statically detectable breach of one of the six construction rules."""


class NotExpressible(ECSError):
    pass


# deformation maps
class MapError(ECSError):
    pass


class ExcludedLine(MapError):
    pass


class BadParameter(MapError):
    pass


class PointNotOnK0(MapError):
    pass


# closures and adversary
class SizeLimit(ECSError):
    pass


class NoGapFound(ECSError):
    pass


class LocationUnreachable(ECSError):
    pass


class UnsupportedLocation(ECSError):
    pass


# projective plane
class ProjectiveError(ECSError):
    pass


class IdenticalLines(ProjectiveError):
    pass


class ZeroTriple(ProjectiveError):
    pass


class LevelOutOfRange(ProjectiveError):
    pass


class LevelMismatch(ProjectiveError):
    pass


class DegenerateDenominator(ECSError):
    pass

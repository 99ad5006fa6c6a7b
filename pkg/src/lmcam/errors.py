"""Exception hierarchy shared across the toolkit.

Every error carries an ``exit_code`` so the CLI can map failures to its
documented exit-code table (0 ok, 2 usage, 3 schema/data, 4 geometry, 5 I/O).
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class UsageError(ToolkitError):
    """Invalid argument values (bad magnitudes, ranges, offsets...)."""

    exit_code = 2


class DataError(ToolkitError):
    """Malformed or inconsistent input data (schemas, shapes, counts)."""

    exit_code = 3


class GeometryError(ToolkitError):
    """Geometric failure: degenerate configurations, points behind camera..."""

    exit_code = 4


class IOFailure(ToolkitError):
    """Missing or unreadable files."""

    exit_code = 5


# -- usage ------------------------------------------------------------------

class InvalidScale(UsageError):
    pass


class InvalidMagnitude(UsageError):
    pass


class InvalidRange(UsageError):
    pass


class InvalidOffset(UsageError):
    pass


class UnknownMotion(UsageError):
    pass


# -- data / schema ----------------------------------------------------------

class SchemaError(DataError):
    pass


class CountMismatch(DataError):
    pass


class NormalizationFailure(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class TooFewClips(DataError):
    pass


# -- geometry ---------------------------------------------------------------

class BehindCamera(GeometryError):
    pass


class AllBehindCamera(GeometryError):
    """Every point failed the depth test; ``frame_index`` set when known."""

    def __init__(self, message, frame_index=None):
        super().__init__(message)
        self.frame_index = frame_index


class DivideByZero(GeometryError):
    pass


class Degenerate(GeometryError):
    pass


class NoValidHypothesis(GeometryError):
    pass


class InsufficientInliers(GeometryError):
    pass


class NoConvergence(GeometryError):
    pass


class ParallelRays(GeometryError):
    pass

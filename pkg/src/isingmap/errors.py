"""Exception types shared across the package."""


class IsingMapError(Exception):
    """Base class for every error raised by this package."""


class ParseError(IsingMapError):
    """Malformed input text; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownReferenceError(IsingMapError):
    """An id refers to a task, unit, or qubit that does not exist."""


class CycleError(IsingMapError):
    """Dependency edges form a cycle."""


class ConnectivityError(IsingMapError):
    """The architecture link graph does not connect all units."""


class RangeError(IsingMapError):
    """A numeric field lies outside its allowed range."""


class CapacityError(IsingMapError):
    """A dependency level needs more units than the architecture provides."""


class ConfigError(IsingMapError):
    """Inconsistent configuration or incompatible inputs."""


class DimensionError(IsingMapError):
    """A bitvector length does not match the problem size."""


class PipelineOrderError(IsingMapError):
    """A sub-problem was built before its cut-edge sources were placed."""


class SolveQualityError(IsingMapError):
    """A solver returned a constraint-violating solution."""

    def __init__(self, message, sub_index=None, violations=()):
        super().__init__(message)
        self.sub_index = sub_index
        self.violations = list(violations)


class InvalidAssignmentError(IsingMapError):
    """A metric was requested for an assignment that violates constraints."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ProblemTooLargeError(IsingMapError):
    """The problem exceeds a solver's hard size cap."""

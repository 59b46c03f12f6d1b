"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DistOrderError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(DistOrderError, ValueError):
    """A precondition on an argument was violated."""


class AdmissibilityError(DistOrderError):
    """The constitutive symbol has zeros in the open right half-plane (or on its boundary)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class UnsupportedKernelError(DistOrderError):
    """The fundamental solution is not a locally integrable function we can sample."""


class ContourError(DistOrderError):
    """Argument tracking along the admissibility contour failed."""


class NoBallError(DistOrderError):
    """No horizon delta makes the fixed-point map send the r-ball into itself."""


class DivergenceError(DistOrderError):
    """Picard iterates became non-finite."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class OracleError(DistOrderError):
    """An independent reference computation could not be carried out."""


class ProblemFileError(DistOrderError, ValueError):
    """A problem file could not be parsed or validated."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.key = key
        self.line = line


class LaplaceEvaluationError(DistOrderError):
    """A transform evaluated to a non-finite value on the inversion contour."""

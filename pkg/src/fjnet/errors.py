"""Exception types shared across the package."""


class FJNetError(Exception):
    """Base class for every error raised by fjnet."""


class NegativeEntry(FJNetError):
    """A matrix entry that must be nonnegative is negative."""

    def __init__(self, i: int, j: int, value: float):
        self.i = i
        self.j = j
        self.value = value
        super().__init__(f"negative entry {value!r} at (i={i}, j={j})")


class RowSumViolation(FJNetError):
    """A row sum falls outside the admissible range."""

    def __init__(self, i: int, row_sum: float):
        self.i = i
        self.row_sum = row_sum
        super().__init__(f"row {i} has sum {row_sum!r}")


class DimensionMismatch(FJNetError):
    """Operands do not have compatible shapes."""


class InvalidDelta(FJNetError):
    """A prejudice-margin parameter delta must be strictly positive."""


class InvalidParams(FJNetError):
    """A parameter lies outside its admissible range."""


class NoConvergence(FJNetError):
    """An iterative method exhausted its budget before reaching tolerance."""

    def __init__(self, iterations: int, message: str = ""):
        self.iterations = iterations
        super().__init__(message or f"no convergence after {iterations} iterations")


class NotSchurStable(FJNetError):
    """The operation requires a Schur-stable model."""


class SingularSystem(FJNetError):
    """A linear system believed nonsingular failed to factorize."""


class NotCFJMember(FJNetError):
    """The sequence is not a member of the requested chain class."""


class NonPeriodicSchedule(FJNetError):
    """The schedule has no periodic tail, so the certificate cannot apply."""


class TrajectoryTooShort(FJNetError):
    """The trajectory does not contain enough states for a tail check."""


class ParseError(FJNetError):
    """A file could not be parsed; carries origin and line diagnostics."""

    def __init__(self, message: str, origin: str = "<input>", line: int | None = None):
        self.origin = origin
        self.line = line
        where = origin if line is None else f"{origin}:{line}"
        super().__init__(f"{where}: {message}")


class WriteError(FJNetError):
    """An output file could not be written."""

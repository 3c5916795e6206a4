"""Exception types shared across the package."""


class SparsestabError(Exception):
    """Base class for all package errors."""


class PatternFormatError(SparsestabError):
    """Malformed pattern input (mask or json)."""

    def __init__(self, message, line=None, column=None):
        pos = ""
        if line is not None:
            pos = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + pos)
        self.line = line
        self.column = column


class CapabilityError(SparsestabError):
    """Requested size exceeds a documented capability cap."""


class SingularMatrixError(SparsestabError):
    """An operation required an invertible matrix."""


class SynthesisError(SparsestabError):
    """Witness construction failed; carries diagnostics."""


class StabilizationError(SynthesisError):
    """Diagonal stabilizer search exhausted its iteration budget."""


class ValidationError(SparsestabError):
    """A certificate or file is structurally malformed."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class NumericalError(SparsestabError):
    """An eigenvalue computation did not converge."""

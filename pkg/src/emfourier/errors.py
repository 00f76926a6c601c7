"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """A source, grid or run configuration is invalid or incomplete."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DegeneracyError(ArithmeticError):
    """An extraction formula would divide by a vanishing cross product."""

    def __init__(self, mode, quantity):
        self.mode = tuple(int(v) for v in mode)
        super().__init__(
            f"degenerate {quantity} at mode l={self.mode}; "
            "the polarization is not admissible for this mode")


class IncompleteDataError(LookupError):
    """Records needed by an operation are missing from a dataset."""

    def __init__(self, missing, message=None):
        self.missing = [tuple(int(v) for v in m) for m in missing]
        shown = ", ".join(str(m) for m in self.missing[:10])
        if len(self.missing) > 10:
            shown += f", ... ({len(self.missing)} total)"
        super().__init__(message or f"missing records for modes: {shown}")


class SequencingError(RuntimeError):
    """An operation was invoked before its prerequisites were computed."""


class DatasetFormatError(ValueError):
    """A dataset or coefficient file cannot be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QuadratureWarning(UserWarning):
    """The requested quadrature does not resolve the integrand oscillation."""

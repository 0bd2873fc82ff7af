"""Exception types shared across the package."""


class PvCurtError(Exception):
    """Base class for all pvcurt errors."""


class ContractError(PvCurtError, ValueError):
    """A documented precondition was violated by the caller."""


class ExtractionError(PvCurtError, RuntimeError):
    """Single-diode parameter extraction did not converge.

    Attributes:
        residual: max-norm of the scaled residual vector at the last iterate.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverError(PvCurtError, RuntimeError):
    """An implicit-equation solve failed; carries bracket diagnostics."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class PlantCollapseError(PvCurtError, RuntimeError):
    """dc-link voltage fell below half the configured minimum."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NumericFaultError(PvCurtError, RuntimeError):
    """NaN/Inf appeared in the plant state."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(PvCurtError, ValueError):
    """Configuration failed validation; names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ParseError(PvCurtError, ValueError):
    """A data file could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(PvCurtError, ValueError):
    """Input data violated an invariant; names the offending field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class MetricsError(PvCurtError, ValueError):
    """A metric is undefined for the given trace (e.g. zero denominator)."""

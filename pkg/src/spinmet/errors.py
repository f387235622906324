"""Exception types shared across the package."""


class SpinmetError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SpinmetError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class CapacityError(SpinmetError, ValueError):
    """A requested object exceeds a configured size cap."""


class SingularityError(SpinmetError, ValueError):
    """A geometric configuration makes the requested quantity undefined."""


class UnsupportedSpinError(SpinmetError, ValueError):
    """The closed-form path only exists for spin 1/2; use the spectral route."""


class ConfigError(SpinmetError, ValueError):
    """A run configuration is inconsistent or incomplete."""


class ValidationError(SpinmetError, RuntimeError):
    """A self-check or Monte Carlo validation failed at run time."""

"""Exception types shared across the package.

Validation problems (bad dimensions, unphysical inputs, out-of-domain
arguments) all derive from ValidationError so the CLI can map them to a
single exit code. Numerical integration blow-ups get their own branch.
"""


class ValidationError(ValueError):
    """Input rejected before any computation ran."""


class InvalidDimensionError(ValidationError):
    """Hilbert space dimension below 2, or a size mismatch."""


class InconsistentStatsError(ValidationError):
    """Energy statistics incompatible with the spectrum, e.g. a mean
    outside [E_min, E_max]."""


class UndefinedAngleError(ValidationError):
    """Angle requested for a zero-length Bloch vector."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a closed form."""


class IntegrationError(RuntimeError):
    """The integrator lost trace or otherwise failed its guards."""

"""Exception taxonomy shared across the package.

Configuration problems and bad inputs raise ConfigError or DomainError;
runtime numerical failures raise NumericalError subclasses. The command
line maps the first group to exit code 2 and the second to exit code 3.
"""


class LatticeTurbError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LatticeTurbError):
    """Invalid configuration, schema violation, or inconsistent inputs."""


class IntegrityError(ConfigError):
    """A dataset does not match the digest recorded in its manifest."""


class DomainError(LatticeTurbError, ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class NumericalError(LatticeTurbError):
    """Base class for runtime numerical failures."""


class StepSizeError(NumericalError):
    """Requested time step violates a stability or accuracy guard."""


class DivergenceError(NumericalError):
    """A solution left the trusted dynamic range."""


class ConvergenceError(NumericalError):
    """An iteration failed to reach its tolerance within budget."""

"""Exception hierarchy shared across the package."""


class CycleMechError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CycleMechError, ValueError):
    """An input value is outside the domain of the requested operation."""


class MechanismError(CycleMechError, ValueError):
    """A mechanism was applied to a profile it is not defined for."""


class ConfigError(CycleMechError, ValueError):
    """A search or CLI configuration is invalid or over budget."""

"""Exception types shared across the package."""


class JungleKitError(Exception):
    """Base class for all package errors."""


class ContractViolation(JungleKitError, ValueError):
    """A caller broke a documented precondition."""


class ConfigError(JungleKitError, ValueError):
    """Invalid configuration file or parameter set."""


class PIIRejectedError(JungleKitError):
    """A request crossed the privacy boundary with unredacted PII."""


class InvariantViolation(JungleKitError, AssertionError):
    """An internal system invariant failed; the run is not trustworthy."""


class PushError(JungleKitError):
    """A snapshot push to an edge node did not get through."""

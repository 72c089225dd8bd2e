"""Exception types shared across the package."""


class RevgenError(Exception):
    """Base class for all errors raised by revgen."""


class InvalidGenerator(RevgenError, ValueError):
    """Generator parameters violate an invariant (e.g. even multiplier)."""


class RangeError(RevgenError, ValueError):
    """A word width or word value lies outside its permitted range."""


class CycleNotFound(RevgenError):
    """Iteration exceeded its cap without returning to the seed."""


class ResourceLimit(RevgenError):
    """The requested exhaustive sweep would exceed the supported state space."""


class PeriodMismatch(RevgenError):
    """The forward sequence did not return to its seed after ``n`` steps."""


class ModeViolation(RevgenError, ValueError):
    """Integrator configuration combines incompatible options."""

"""Exception types raised by the models."""


class DomainError(ValueError):
    """An input lies outside the validity domain of a model."""


class SaturationError(RuntimeError):
    """A power solve hit its upper search cap without closing the link."""


class InfeasibleError(ValueError):
    """Constraints cannot be met simultaneously (e.g. a null on the steer direction)."""


class DegenerateInputError(ValueError):
    """An input set contains a zero-energy or otherwise unusable element."""

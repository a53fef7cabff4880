"""Exception types shared across the package."""


class SizeGuardError(Exception):
    """An exhaustive computation was requested beyond the configured guard."""


class ShapeError(ValueError):
    """Operands belong to different towers, sizes or representation flags."""


class SpringerUndefinedError(ValueError):
    """The requested Springer morphism is not defined for this group."""


class NonIntegralityError(AssertionError):
    """An orbit sum failed to divide exactly; this would falsify the theory."""

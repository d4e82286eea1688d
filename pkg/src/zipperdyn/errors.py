"""Exception hierarchy shared by all modules."""


class ZipperDynError(Exception):
    """Base class for all library errors."""


class DomainError(ZipperDynError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(ZipperDynError):
    """A documented operation precondition is violated."""


class EpsilonTooLargeError(PreconditionError):
    """The requested transversality band [eps, 1-eps] is empty."""


class BudgetExceededError(ZipperDynError):
    """An enumeration or refinement exceeded its configured budget."""


class SearchFailedError(ZipperDynError):
    """A search exhausted its budget without finding a witness."""


class DepthInsufficientError(ZipperDynError):
    """Brackets at the allowed depth are too coarse to decide a claim."""


class PrecisionError(ZipperDynError):
    """Enclosure precision is insufficient; retry with more bits."""

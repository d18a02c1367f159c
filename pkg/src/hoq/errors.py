"""Exception hierarchy shared by all modules."""


class HoqError(Exception):
    """Base class for library errors."""


class LimitExceeded(HoqError):
    """A configured size guard refused the computation."""


class SearchSpaceTooLarge(LimitExceeded):
    pass


class CodeTooLong(LimitExceeded):
    pass


class TargetTooLarge(LimitExceeded):
    pass


class StructureError(HoqError, ValueError):
    """An interpretation violates its declared type or the universe."""


class DecodeOutOfRange(HoqError, ValueError):
    pass


class UnboundSymbol(HoqError):
    pass


class NormalizationError(HoqError):
    """A rewrite precondition does not hold for the given formula."""


class UnsupportedNode(HoqError):
    pass

"""Exception hierarchy for cantorlab."""


class CantorError(Exception):
    """Base class for every error raised by this package."""


class NonMonotoneMap(CantorError):
    pass


class TrivialMap(CantorError):
    """The digit map is the identity, so C_n = n and nothing is interesting."""


class RangeError(CantorError):
    pass


class DigitOutOfRange(CantorError):
    pass


class ScopeError(CantorError):
    """Operation needs f(0)=0 and f(m)=p with f strictly increasing."""


class ScanTooLarge(CantorError):
    pass


class NotFound(CantorError):
    pass


class OutOfInterval(CantorError):
    pass


class NotRational(CantorError):
    pass


class DegenerateGrid(CantorError):
    pass


class PoleAtOne(CantorError):
    pass


class NearPole(CantorError):
    pass


class UsageError(CantorError):
    pass


class IoError(CantorError):
    pass


class StrategyMismatch(CantorError):
    """Two independent evaluation routes disagreed. Always a bug."""

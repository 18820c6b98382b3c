"""Exception hierarchy for contract violations and degenerate configurations."""


class LccpError(Exception):
    """Base class for every error raised by this package."""


class ZeroSize(LccpError, ValueError):
    """A size or count argument was zero or negative."""


class NonBijection(LccpError, ValueError):
    """A matching (or a sample's id sets) failed to be a bijection."""


class OutOfRange(LccpError, ValueError):
    """A probability or numeric parameter fell outside its allowed range."""


class IdOutOfRange(LccpError, ValueError):
    """A coupon or label id is not in ``0..n-1``."""


class SizeExceedsN(LccpError, ValueError):
    """A drawable sample size exceeds the number of coupons."""


class TargetExceedsN(LccpError, ValueError):
    """A recovery target asks for more coupons than the instance has."""


class EmptySupport(LccpError, ValueError):
    """A sample-size distribution has no positive-probability entry."""


class UnsupportedHistory(LccpError, ValueError):
    """The pair-component rule needs a size<=2 history in vertices-unknown mode."""


class InvalidState(LccpError, ValueError):
    """A chain state violates its structural invariants."""


class TooSmallN(LccpError, ValueError):
    """A closed form is undefined below its minimum instance size."""


class TooLargeN(LccpError, ValueError):
    """Brute-force guard: the instance size exceeds the hard cap."""


class Unrecoverable(LccpError, RuntimeError):
    """The recovery target cannot be reached under the given model."""


class NumericalInstability(LccpError, RuntimeError):
    """A non-absorbing state has a self-loop probability too close to one."""


class NonTerminating(LccpError, RuntimeError):
    """A simulated trial exceeded the hard cap on draws."""

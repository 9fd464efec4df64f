"""Exception hierarchy shared by every module of the package."""


class SRLRCError(Exception):
    """Base class for all errors raised by this package."""


# fields and linear algebra
class NonDividingChain(SRLRCError, ValueError):
    pass


class NoIrreducibleFound(SRLRCError, RuntimeError):
    pass


class NotInSubfield(SRLRCError, ValueError):
    pass


class Inconsistent(SRLRCError, ValueError):
    pass


class Singular(SRLRCError, ValueError):
    pass


# sum-rank oracles
class LengthMismatch(SRLRCError, ValueError):
    pass


class TooLarge(SRLRCError, ValueError):
    """An exhaustive enumeration would exceed its configured cap."""


TooLargeToEnumerate = TooLarge


class NotInvertibleBlock(SRLRCError, ValueError):
    pass


# outer and local codes
class BadDistribution(SRLRCError, ValueError):
    pass


class InsufficientRank(SRLRCError):
    """The erasure pattern leaves too little information to decode."""


class FieldTooSmall(SRLRCError, ValueError):
    pass


class NotFullRank(SRLRCError, ValueError):
    pass


class UnrepairableLocally(SRLRCError):
    """Survivors inside the group do not determine it; escalate to global decoding."""


# global codes
class ProfileInvalid(SRLRCError, ValueError):
    pass


class PreconditionNotSorted(SRLRCError, ValueError):
    pass


# dynamics
class DimensionMismatch(SRLRCError, ValueError):
    pass


class BadPartitionSum(SRLRCError, ValueError):
    pass


class LocalityOutOfRange(SRLRCError, ValueError):
    pass


class WouldViolateKBound(SRLRCError, ValueError):
    pass


class KOutOfRange(SRLRCError, ValueError):
    pass


class GroupCountOutOfRange(SRLRCError, ValueError):
    pass


# alternant codes
class NotAPowerChain(SRLRCError, ValueError):
    pass


# cli / shard sets
class ParseError(SRLRCError, ValueError):
    pass


class ShardFormatError(SRLRCError, ValueError):
    pass

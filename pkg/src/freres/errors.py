"""Exception types shared across the codec."""


class CodecError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(CodecError):
    """Array or grid dimensions are inconsistent with what the operation requires."""


class NonFiniteValue(CodecError):
    """An embedding contains NaN or infinity."""


class BadMagic(CodecError):
    """A file does not start with the expected magic tag."""


class TruncatedFile(CodecError):
    """A file is shorter than its header declares."""


class IoFailure(CodecError):
    """An underlying read or write failed."""


class InvalidBudget(CodecError):
    """Anchor count is outside [1, T]."""


class BudgetTooSmall(CodecError):
    """The token budget cannot cover the requested configuration."""


class DivisionDomain(CodecError):
    """Denominator of a ratio is zero."""


class EmptyGop(CodecError):
    """A group of pictures has no P-frames, so no residual trajectory exists."""


class MissingWeights(CodecError):
    """An operation that needs codec weights was invoked without them."""


class InvalidSpec(CodecError):
    """A synthetic-clip specification is malformed."""

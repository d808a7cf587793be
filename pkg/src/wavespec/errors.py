"""Exception hierarchy shared across the toolchain."""


class WavespecError(Exception):
    """Base class for every error this package raises deliberately."""


class UsageError(WavespecError):
    """The caller asked for something the inputs cannot satisfy (CLI exit 1)."""


class TraceFormatError(WavespecError):
    """Input trace text violates the expected format (CLI exit 2)."""


class MalformedHeader(TraceFormatError):
    """VCD declaration section is structurally broken or truncated."""


class BadDigit(TraceFormatError):
    """A value token contains a character outside 0/1/x/z."""


class WidthOverflow(TraceFormatError):
    """A vector token carries more significant bits than the declared width."""


class UnknownVariable(TraceFormatError):
    """An event references a variable index outside the header's range."""


class NoSuchClock(UsageError):
    """A sampling policy names a variable that is not in the header."""


class NotAScalarClock(UsageError):
    """A sampling policy names a clock whose width is not 1."""


class InvalidConfig(UsageError):
    """CI pipeline configuration is missing or has malformed fields."""


class PartitionOverlap(WavespecError):
    """Two candidate partitions being merged contain the same candidate."""

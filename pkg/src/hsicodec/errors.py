"""Exception hierarchy for the codec."""


class CodecError(Exception):
    """Base class for all codec errors."""


class FormatError(CodecError):
    """A header or descriptor file could not be parsed."""


class CorruptInputError(CodecError):
    """An input cube file disagrees with its declared dimensions."""


class WriteError(CodecError):
    """An output file could not be written."""


class DimensionError(CodecError):
    """An array has the wrong shape for the requested operation."""


class CorruptStreamError(CodecError):
    """A bitstream or coded segment failed to parse or validate."""


class NumericError(CodecError):
    """A numeric step failed (non-finite values, factorization failure)."""


class NoContentError(CodecError):
    """The cube has no codable band (all zero or all excluded)."""


class UndefinedCorrelationError(CodecError):
    """Correlation is undefined because a band is constant."""

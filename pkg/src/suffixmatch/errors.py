"""Exception hierarchy shared by the library and the CLI."""


class SuffixMatchError(Exception):
    """Base class for all errors raised by suffixmatch."""

    exit_code = 4


class ParameterError(SuffixMatchError, ValueError):
    """An argument or encoding parameter is outside its valid range."""

    exit_code = 1


class AlphabetError(ParameterError):
    """A string contains a character outside the declared alphabet."""


class ParameterMismatchError(SuffixMatchError):
    """Two encodings were produced under different public parameters."""

    exit_code = 2

    def __init__(self, message, diff=None):
        super().__init__(message)
        self.diff = dict(diff or {})


class MalformedInputError(SuffixMatchError):
    """An input file could not be parsed."""

    exit_code = 3


class RecordEncodingError(SuffixMatchError):
    """Encoding failed for a specific database record."""

    exit_code = 3

    def __init__(self, record_id, cause):
        super().__init__(f"record {record_id!r}: {cause}")
        self.record_id = record_id
        self.cause = cause

"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ColCacheError(Exception):
    """Base class for all errors raised by this package."""


class CorruptFileError(ColCacheError):
    """A columnar file's framing or section contents are inconsistent."""


class ParseError(CorruptFileError):
    """A metadata section failed to parse.

    ``offset`` is the byte position within the section where parsing
    stopped; for truncated input it equals the input length.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class DecompressError(CorruptFileError):
    """A compressed section is not a valid DEFLATE stream."""


class SchemaError(ColCacheError):
    """Row data does not conform to the declared schema."""


class EmptyInputError(ColCacheError):
    """A writer was given zero rows."""


class BufferFormatError(ColCacheError):
    """An object buffer failed validation (magic, kind, or bounds)."""


class CacheError(ColCacheError):
    """Base class for cache failures."""


class BackendError(CacheError):
    """A cache backend could not serve a request (I/O failure)."""


class OversizeValueError(CacheError):
    """A value's charge exceeds the cache capacity; nothing was stored."""


class DatasetError(ColCacheError):
    """A generated dataset is missing or does not match its manifest."""


class ScanError(ColCacheError):
    """A scan failed; the message carries the file it failed on."""

"""Raw DEFLATE framing for file sections.

Every metadata section and every column chunk is independently
compressed as a raw RFC 1951 stream (no zlib or gzip wrapper). The
level is fixed per writer so identical inputs produce identical bytes;
decompression does not depend on it.
"""

from __future__ import annotations

import zlib

from ..errors import DecompressError

DEFAULT_LEVEL = 6


def deflate_section(raw: bytes, level: int = DEFAULT_LEVEL) -> bytes:
    co = zlib.compressobj(level, zlib.DEFLATED, -zlib.MAX_WBITS)
    return co.compress(raw) + co.flush()


def inflate_section(compressed: bytes) -> bytes:
    dec = zlib.decompressobj(-zlib.MAX_WBITS)
    try:
        raw = dec.decompress(compressed)
        raw += dec.flush()
    except zlib.error as exc:
        raise DecompressError(f"bad DEFLATE stream: {exc}") from exc
    if not dec.eof:
        raise DecompressError("truncated DEFLATE stream")
    if dec.unused_data:
        raise DecompressError("trailing bytes after DEFLATE stream")
    return raw

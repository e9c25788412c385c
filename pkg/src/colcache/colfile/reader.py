"""Columnar file reader: footer location, section reads, chunk decode.

Reads are positionless (``os.pread``), so one open reader may serve
many threads at once. Nothing here caches: callers that want cached
metadata layer the cache on top.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

from ..errors import CorruptFileError
from .codec import parse_footer, parse_stripe_footer, parse_stripe_index
from .compress import inflate_section
from .types import (
    MAGIC,
    ColumnChunk,
    ColumnType,
    FileFooter,
    StreamInfo,
    StripeFooter,
    StripeIndex,
    StripeInfo,
)

TAIL_LEN = 8  # u32 footer length + trailing magic


def locate_footer(file_tail: bytes, file_length: int) -> tuple[int, int]:
    """Resolve the compressed footer's (offset, length) from the file tail.

    ``file_tail`` is the final 8 bytes: a u32 compressed-footer length
    followed by the magic. The footer must leave room for the leading
    magic, else the length field is lying.
    """
    if len(file_tail) != TAIL_LEN:
        raise CorruptFileError("file too short for a footer tail")
    if file_tail[4:8] != MAGIC:
        raise CorruptFileError("bad trailing magic")
    (comp_len,) = struct.unpack("<I", file_tail[0:4])
    offset = file_length - TAIL_LEN - comp_len
    if offset < len(MAGIC):
        raise CorruptFileError("footer length exceeds file length")
    return offset, comp_len


class ColFileReader:
    """Random-access reader over one columnar file."""

    def __init__(self, pread, file_length: int, name: str = "<bytes>"):
        self._pread = pread
        self._length = file_length
        self.name = name
        self._fd: int | None = None
        if file_length < len(MAGIC) + TAIL_LEN:
            raise CorruptFileError(f"{name}: file too short")
        if self._read(0, 4) != MAGIC:
            raise CorruptFileError(f"{name}: bad leading magic")
        tail = self._read(file_length - TAIL_LEN, TAIL_LEN)
        self.footer_offset, self.footer_comp_len = locate_footer(tail, file_length)

    @classmethod
    def open(cls, path: str | Path) -> "ColFileReader":
        fd = os.open(os.fspath(path), os.O_RDONLY)
        try:
            size = os.fstat(fd).st_size
            reader = cls(lambda off, n: os.pread(fd, n, off), size, str(path))
        except Exception:
            os.close(fd)
            raise
        reader._fd = fd
        return reader

    @classmethod
    def from_bytes(cls, data: bytes, name: str = "<bytes>") -> "ColFileReader":
        return cls(lambda off, n: data[off : off + n], len(data), name)

    def close(self) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None

    def __enter__(self) -> "ColFileReader":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- section reads ------------------------------------------------

    def _read(self, off: int, n: int) -> bytes:
        data = self._pread(off, n)
        if len(data) != n:
            raise CorruptFileError(f"{self.name}: short read at offset {off}")
        return data

    def read_footer_raw(self) -> bytes:
        """Decompressed canonical footer bytes."""
        return inflate_section(self._read(self.footer_offset, self.footer_comp_len))

    def read_footer(self) -> FileFooter:
        return parse_footer(self.read_footer_raw())

    def _check_stripe_bounds(self, info: StripeInfo) -> None:
        if info.stripe_offset < len(MAGIC):
            raise CorruptFileError(f"{self.name}: stripe overlaps leading magic")
        if info.footer_offset + info.footer_len > self.footer_offset:
            raise CorruptFileError(f"{self.name}: stripe extends into file footer")

    def read_stripe_index_raw(self, info: StripeInfo) -> bytes:
        self._check_stripe_bounds(info)
        return inflate_section(self._read(info.stripe_offset, info.index_len))

    def read_stripe_footer_raw(self, info: StripeInfo) -> bytes:
        self._check_stripe_bounds(info)
        return inflate_section(self._read(info.footer_offset, info.footer_len))

    def read_stripe_index(self, info: StripeInfo, column_types) -> StripeIndex:
        return parse_stripe_index(self.read_stripe_index_raw(info), column_types)

    def read_stripe_footer(self, info: StripeInfo) -> StripeFooter:
        return parse_stripe_footer(self.read_stripe_footer_raw(info))

    def read_chunk_raw(self, info: StripeInfo, stream: StreamInfo) -> bytes:
        """Decompressed chunk bytes for one column of one stripe."""
        if stream.chunk_offset + stream.chunk_len > info.data_len:
            raise CorruptFileError(
                f"{self.name}: chunk bounds outside stripe data region"
            )
        self._check_stripe_bounds(info)
        comp = self._read(info.data_offset + stream.chunk_offset, stream.chunk_len)
        return inflate_section(comp)

    def read_column_chunk(self, stripe_idx: int, col_idx: int,
                          footer: FileFooter, stripe_footer: StripeFooter) -> ColumnChunk:
        """Read and decode one column chunk into slot values plus bitmap."""
        if not 0 <= stripe_idx < footer.num_stripes:
            raise IndexError(f"stripe {stripe_idx} out of range")
        if not 0 <= col_idx < footer.num_columns:
            raise IndexError(f"column {col_idx} out of range")
        info = footer.stripe(stripe_idx)
        raw = self.read_chunk_raw(info, stripe_footer.stream(col_idx))
        return decode_chunk(raw, info.num_rows, footer.column(col_idx)[1])


def decode_chunk(raw: bytes, num_rows: int, ctype: ColumnType) -> ColumnChunk:
    """Decode a decompressed chunk per the fixed slot layout.

    Reference decoder: every slot is materialized as a Python value.
    Null slots are required to be zero-filled.
    """
    bm_len = (num_rows + 7) // 8
    if len(raw) < bm_len:
        raise CorruptFileError("chunk shorter than its null bitmap")
    bitmap = raw[:bm_len]
    pos = bm_len
    if ctype == ColumnType.UTF8:
        values = []
        for i in range(num_rows):
            if pos + 4 > len(raw):
                raise CorruptFileError("chunk truncated in utf8 slot")
            (n,) = struct.unpack_from("<I", raw, pos)
            pos += 4
            if pos + n > len(raw):
                raise CorruptFileError("chunk truncated in utf8 slot")
            values.append(raw[pos : pos + n])
            pos += n
        if pos != len(raw):
            raise CorruptFileError("trailing bytes after chunk values")
    else:
        fmt = "<%dq" if ctype == ColumnType.INT64 else "<%dd"
        if len(raw) != bm_len + 8 * num_rows:
            raise CorruptFileError("chunk length disagrees with row count")
        values = list(struct.unpack_from(fmt % num_rows, raw, bm_len))

    zero = b"" if ctype == ColumnType.UTF8 else (0 if ctype == ColumnType.INT64 else 0.0)
    for i in range(num_rows):
        if not (bitmap[i >> 3] >> (i & 7)) & 1 and values[i] != zero:
            raise CorruptFileError(f"null row {i} has a non-zero slot")
    return ColumnChunk(bitmap, tuple(values))

"""Flat object buffers: encode once, read fields without deserializing.

A buffer is a fixed header plus fixed-stride record tables plus a
string heap, everything little-endian and 8-byte aligned. Decoding
wraps the payload in a view after O(1) header validation; field reads
are offset arithmetic against the original bytes, so access cost does
not depend on how large the buffer is.

Layouts (``pad`` bytes are zero):

FooterBuf (kind 0)::

    [0]"OBF1" [4]u8 kind [5]pad3 [8]u32 version [12]u32 num_columns
    [16]u64 num_rows [24]u32 num_stripes [28]pad4 [32]u32 col_table_off
    [36]u32 stripe_table_off [40]u32 stats_table_off [44]u32 heap_off
    [48]u32 heap_len [52]pad4
    column record (16B):  u8 type_code, pad3, u32 name_off, u32 name_len, pad4
    stripe record (40B):  u64 x5 (offset, index_len, data_len, footer_len, rows)
    stats record  (32B):  u8 flags, pad7, u64 min_bits, u64 max_bits, u64 nulls

StripeFooterBuf (kind 1)::

    [0]"OBF1" [4]u8 kind [5]pad3 [8]u32 num_columns [12]pad4
    stream record (24B): u64 chunk_offset, u64 chunk_len, u8 encoding, pad7

StripeIndexBuf (kind 2)::

    [0]"OBF1" [4]u8 kind [5]pad3 [8]u32 num_columns [12]u32 num_row_groups
    [16]u32 table_off [20]u32 heap_off [24]u32 heap_len [28]pad4
    per-column region (stride 32 + 40*G): stripe stats record, then per
    row group {stats record, u64 byte_offset}

String heap offsets are heap-relative; utf8 stats pack them as
``offset | length << 32`` in min_bits/max_bits. Stats flags: bit 0 is
has_minmax, bits 1-2 the column type code.
"""

from __future__ import annotations

import struct

from ..colfile.types import (
    ColumnIndexEntry,
    ColumnStats,
    ColumnType,
    FileFooter,
    RowGroupEntry,
    StreamInfo,
    StripeFooter,
    StripeIndex,
    StripeInfo,
)
from ..errors import BufferFormatError
from ..kernels import (
    BUF_MAGIC,
    encode_footer_buf,
    encode_stripe_footer_buf,
    encode_stripe_index_buf,
)

__all__ = [
    "BUF_MAGIC",
    "encode_footer_buf",
    "encode_stripe_footer_buf",
    "encode_stripe_index_buf",
    "decode_footer_view",
    "decode_stripe_footer_view",
    "decode_stripe_index_view",
    "FooterView",
    "StripeFooterView",
    "StripeIndexView",
]

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_F64 = struct.Struct("<d")
_STRIPE = struct.Struct("<QQQQQ")


def _padded(n: int) -> int:
    return (n + 7) & ~7


def _check(cond: bool, why: str) -> None:
    if not cond:
        raise BufferFormatError(why)


class _View:
    """Shared heap access and stats-record decoding."""

    __slots__ = ("_mv", "_heap_off", "_heap_len")

    def __init__(self, mv: memoryview, heap_off: int, heap_len: int):
        self._mv = mv
        self._heap_off = heap_off
        self._heap_len = heap_len

    def _heap_bytes(self, off: int, n: int) -> bytes:
        _check(off + n <= self._heap_len, "heap reference out of bounds")
        start = self._heap_off + off
        return bytes(self._mv[start : start + n])

    def _stats_at(self, off: int, expect_type: int | None = None) -> ColumnStats:
        mv = self._mv
        flags = mv[off]
        _check(flags >> 3 == 0, f"invalid stats flags {flags:#x}")
        code = (flags >> 1) & 0b11
        _check(code <= 2, f"invalid stats type code {code}")
        if expect_type is not None:
            _check(code == expect_type, "stats type disagrees with column type")
        (nulls,) = _U64.unpack_from(mv, off + 24)
        if not flags & 1:
            return ColumnStats(False, None, None, nulls)
        (min_bits,) = _U64.unpack_from(mv, off + 8)
        (max_bits,) = _U64.unpack_from(mv, off + 16)
        if code == ColumnType.INT64:
            mn = min_bits - (1 << 64) if min_bits >> 63 else min_bits
            mx = max_bits - (1 << 64) if max_bits >> 63 else max_bits
        elif code == ColumnType.FLOAT64:
            (mn,) = _F64.unpack(_U64.pack(min_bits))
            (mx,) = _F64.unpack(_U64.pack(max_bits))
        else:
            mn = self._heap_bytes(min_bits & 0xFFFFFFFF, min_bits >> 32)
            mx = self._heap_bytes(max_bits & 0xFFFFFFFF, max_bits >> 32)
        return ColumnStats(True, mn, mx, nulls)


class FooterView(_View):
    """Field accessors over an encoded file footer."""

    __slots__ = ("version", "num_columns", "num_rows", "num_stripes",
                 "_col_off", "_stripe_off", "_stats_off")

    def __init__(self, mv: memoryview):
        _check(len(mv) >= 56, "buffer too short for a footer header")
        (version,) = _U32.unpack_from(mv, 8)
        (ncols,) = _U32.unpack_from(mv, 12)
        (nrows,) = _U64.unpack_from(mv, 16)
        (nstripes,) = _U32.unpack_from(mv, 24)
        (col_off,) = _U32.unpack_from(mv, 32)
        (stripe_off,) = _U32.unpack_from(mv, 36)
        (stats_off,) = _U32.unpack_from(mv, 40)
        (heap_off,) = _U32.unpack_from(mv, 44)
        (heap_len,) = _U32.unpack_from(mv, 48)
        _check(version == 1, f"unknown footer version {version}")
        _check(ncols >= 1, "footer buffer has no columns")
        _check(nstripes >= 1, "footer buffer has no stripes")
        _check(col_off == 56, "column table offset out of place")
        _check(stripe_off == 56 + 16 * ncols, "stripe table offset out of place")
        _check(stats_off == stripe_off + 40 * nstripes, "stats table offset out of place")
        _check(heap_off == stats_off + 32 * ncols, "heap offset out of place")
        _check(len(mv) == heap_off + _padded(heap_len), "buffer length mismatch")
        super().__init__(mv, heap_off, heap_len)
        self.version = version
        self.num_columns = ncols
        self.num_rows = nrows
        self.num_stripes = nstripes
        self._col_off = col_off
        self._stripe_off = stripe_off
        self._stats_off = stats_off

    def column(self, i: int) -> tuple[str, ColumnType]:
        if not 0 <= i < self.num_columns:
            raise IndexError(f"column {i} out of range")
        rec = self._col_off + 16 * i
        code = self._mv[rec]
        _check(code <= 2, f"invalid column type code {code}")
        (name_off,) = _U32.unpack_from(self._mv, rec + 4)
        (name_len,) = _U32.unpack_from(self._mv, rec + 8)
        return self._heap_bytes(name_off, name_len).decode("utf-8"), ColumnType(code)

    def stripe(self, i: int) -> StripeInfo:
        if not 0 <= i < self.num_stripes:
            raise IndexError(f"stripe {i} out of range")
        return StripeInfo(*_STRIPE.unpack_from(self._mv, self._stripe_off + 40 * i))

    def stats(self, i: int) -> ColumnStats:
        if not 0 <= i < self.num_columns:
            raise IndexError(f"column {i} out of range")
        return self._stats_at(self._stats_off + 32 * i, self._mv[self._col_off + 16 * i])

    def column_types(self) -> tuple[ColumnType, ...]:
        return tuple(self.column(i)[1] for i in range(self.num_columns))

    def to_footer(self) -> FileFooter:
        """Full deserialization; test/tooling aid, not the cached-read path."""
        return FileFooter(
            self.version,
            self.num_rows,
            tuple(self.column(i) for i in range(self.num_columns)),
            tuple(self.stripe(i) for i in range(self.num_stripes)),
            tuple(self.stats(i) for i in range(self.num_columns)),
        )


class StripeFooterView:
    __slots__ = ("_mv", "num_columns")

    def __init__(self, mv: memoryview):
        (ncols,) = _U32.unpack_from(mv, 8)
        _check(ncols >= 1, "stripe footer buffer has no streams")
        _check(len(mv) == 16 + 24 * ncols, "buffer length mismatch")
        self._mv = mv
        self.num_columns = ncols

    def stream(self, i: int) -> StreamInfo:
        if not 0 <= i < self.num_columns:
            raise IndexError(f"column {i} out of range")
        rec = 16 + 24 * i
        (off,) = _U64.unpack_from(self._mv, rec)
        (ln,) = _U64.unpack_from(self._mv, rec + 8)
        return StreamInfo(off, ln, self._mv[rec + 16])

    def to_stripe_footer(self) -> StripeFooter:
        return StripeFooter(tuple(self.stream(i) for i in range(self.num_columns)))


class StripeIndexView(_View):
    __slots__ = ("num_columns", "num_row_groups", "_table_off", "_stride")

    def __init__(self, mv: memoryview):
        _check(len(mv) >= 32, "buffer too short for an index header")
        (ncols,) = _U32.unpack_from(mv, 8)
        (ngroups,) = _U32.unpack_from(mv, 12)
        (table_off,) = _U32.unpack_from(mv, 16)
        (heap_off,) = _U32.unpack_from(mv, 20)
        (heap_len,) = _U32.unpack_from(mv, 24)
        _check(ncols >= 1, "index buffer has no columns")
        _check(ngroups >= 1, "index buffer has no row groups")
        _check(table_off == 32, "column region offset out of place")
        stride = 32 + 40 * ngroups
        _check(heap_off == table_off + ncols * stride, "heap offset out of place")
        _check(len(mv) == heap_off + _padded(heap_len), "buffer length mismatch")
        super().__init__(mv, heap_off, heap_len)
        self.num_columns = ncols
        self.num_row_groups = ngroups
        self._table_off = table_off
        self._stride = stride

    def _col_base(self, c: int) -> int:
        if not 0 <= c < self.num_columns:
            raise IndexError(f"column {c} out of range")
        return self._table_off + c * self._stride

    def stripe_stats(self, c: int) -> ColumnStats:
        return self._stats_at(self._col_base(c))

    def _group_rec(self, c: int, g: int) -> int:
        if not 0 <= g < self.num_row_groups:
            raise IndexError(f"row group {g} out of range")
        return self._col_base(c) + 32 + 40 * g

    def group_stats(self, c: int, g: int) -> ColumnStats:
        return self._stats_at(self._group_rec(c, g))

    def group_offset(self, c: int, g: int) -> int:
        (off,) = _U64.unpack_from(self._mv, self._group_rec(c, g) + 32)
        return off

    def to_stripe_index(self) -> StripeIndex:
        cols = []
        for c in range(self.num_columns):
            groups = tuple(
                RowGroupEntry(self.group_stats(c, g), self.group_offset(c, g))
                for g in range(self.num_row_groups)
            )
            cols.append(ColumnIndexEntry(self.stripe_stats(c), groups))
        return StripeIndex(self.num_row_groups, tuple(cols))


_KIND_TO_VIEW = {0: FooterView, 1: StripeFooterView, 2: StripeIndexView}


def _open_view(payload, kind: int):
    mv = memoryview(payload)
    _check(len(mv) >= 16, "buffer too short")
    _check(bytes(mv[0:4]) == BUF_MAGIC, "bad buffer magic")
    _check(mv[4] == kind, f"buffer kind {mv[4]} where {kind} expected")
    return _KIND_TO_VIEW[kind](mv)


def decode_footer_view(payload) -> FooterView:
    """Validate and wrap an encoded footer without copying the payload."""
    return _open_view(payload, 0)


def decode_stripe_footer_view(payload) -> StripeFooterView:
    return _open_view(payload, 1)


def decode_stripe_index_view(payload) -> StripeIndexView:
    return _open_view(payload, 2)

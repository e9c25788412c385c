"""Pure-Python metadata codec kernels.

Two codecs live here. The wire codec produces the canonical
serialization of the three metadata section types (the bytes that get
DEFLATE-compressed into files, and the payload cached in raw-bytes
mode). The buffer codec packs parsed sections into flat, offset-table
addressed object buffers that can be read field-by-field without
deserializing (the payload cached in object-buffer mode).

The compiled extension in ``_native`` implements the same functions
with byte-identical output; :mod:`colcache.kernels` picks a lane at
import time.
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
from ..errors import ParseError

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_I64 = struct.Struct("<q")
_F64 = struct.Struct("<d")
_STRIPE = struct.Struct("<QQQQQ")
_STREAM = struct.Struct("<QQB")
_COLHDR = struct.Struct("<BH")

_U64_MASK = 0xFFFFFFFFFFFFFFFF

BUF_MAGIC = b"OBF1"

# ---------------------------------------------------------------------------
# wire codec: ColumnStats

def _stats_wire(out: bytearray, stats: ColumnStats, ctype: int) -> None:
    if stats.has_minmax:
        out += b"\x01"
        if ctype == ColumnType.INT64:
            out += _I64.pack(stats.min)
            out += _I64.pack(stats.max)
        elif ctype == ColumnType.FLOAT64:
            out += _F64.pack(stats.min)
            out += _F64.pack(stats.max)
        else:
            out += _U32.pack(len(stats.min))
            out += stats.min
            out += _U32.pack(len(stats.max))
            out += stats.max
    else:
        out += b"\x00"
    out += _U64.pack(stats.null_count)


def _read_bytes(data, off: int, n: int) -> bytes:
    if off + n > len(data):
        raise ParseError("truncated input", len(data))
    return bytes(data[off : off + n])


def _parse_stats(data, off: int, ctype: int) -> tuple[ColumnStats, int]:
    try:
        (hm,) = _U8.unpack_from(data, off)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if hm > 1:
        raise ParseError(f"invalid has_minmax flag {hm}", off)
    off += 1
    mn = mx = None
    if hm:
        try:
            if ctype == ColumnType.INT64:
                (mn,) = _I64.unpack_from(data, off)
                (mx,) = _I64.unpack_from(data, off + 8)
                off += 16
            elif ctype == ColumnType.FLOAT64:
                (mn,) = _F64.unpack_from(data, off)
                (mx,) = _F64.unpack_from(data, off + 8)
                off += 16
            else:
                (n,) = _U32.unpack_from(data, off)
                mn = _read_bytes(data, off + 4, n)
                off += 4 + n
                (n,) = _U32.unpack_from(data, off)
                mx = _read_bytes(data, off + 4, n)
                off += 4 + n
        except struct.error:
            raise ParseError("truncated input", len(data)) from None
    try:
        (nulls,) = _U64.unpack_from(data, off)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    return ColumnStats(bool(hm), mn, mx, nulls), off + 8


# ---------------------------------------------------------------------------
# wire codec: sections

def serialize_footer(footer: FileFooter) -> bytes:
    out = bytearray()
    out += _U32.pack(footer.version)
    out += _U64.pack(footer.num_rows)
    ncols = len(footer.columns)
    if ncols == 0:
        raise ValueError("footer has no columns")
    out += _U32.pack(ncols)
    for name, ctype in footer.columns:
        raw = name.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"column name too long ({len(raw)} bytes)")
        out += _COLHDR.pack(ctype, len(raw))
        out += raw
    nstripes = len(footer.stripes)
    if nstripes == 0:
        raise ValueError("footer has no stripes")
    out += _U32.pack(nstripes)
    for s in footer.stripes:
        out += _STRIPE.pack(
            s.stripe_offset, s.index_len, s.data_len, s.footer_len, s.num_rows
        )
    if len(footer.file_stats) != ncols:
        raise ValueError("file_stats length != column count")
    for stats, (_, ctype) in zip(footer.file_stats, footer.columns):
        _stats_wire(out, stats, ctype)
    return bytes(out)


def parse_footer(data) -> FileFooter:
    try:
        (version,) = _U32.unpack_from(data, 0)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if version != 1:
        raise ParseError(f"unknown format version {version}", 0)
    try:
        (num_rows,) = _U64.unpack_from(data, 4)
        (ncols,) = _U32.unpack_from(data, 12)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if ncols == 0:
        raise ParseError("footer has no columns", 12)
    off = 16
    columns = []
    for _ in range(ncols):
        try:
            code, name_len = _COLHDR.unpack_from(data, off)
        except struct.error:
            raise ParseError("truncated input", len(data)) from None
        if code > 2:
            raise ParseError(f"unknown column type code {code}", off)
        raw = _read_bytes(data, off + 3, name_len)
        try:
            name = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError("column name is not valid UTF-8", off + 3) from None
        columns.append((name, ColumnType(code)))
        off += 3 + name_len
    try:
        (nstripes,) = _U32.unpack_from(data, off)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if nstripes == 0:
        raise ParseError("footer has no stripes", off)
    off += 4
    stripes = []
    row_total = 0
    for _ in range(nstripes):
        try:
            fields = _STRIPE.unpack_from(data, off)
        except struct.error:
            raise ParseError("truncated input", len(data)) from None
        stripes.append(StripeInfo(*fields))
        row_total += fields[4]
        off += 40
    stats = []
    for _, ctype in columns:
        st, off = _parse_stats(data, off, ctype)
        stats.append(st)
    if off != len(data):
        raise ParseError("trailing bytes after footer", off)
    if row_total != num_rows:
        raise ParseError("footer num_rows disagrees with stripe totals", 4)
    return FileFooter(version, num_rows, tuple(columns), tuple(stripes), tuple(stats))


def serialize_stripe_footer(sf: StripeFooter) -> bytes:
    ncols = len(sf.streams)
    if ncols == 0:
        raise ValueError("stripe footer has no streams")
    out = bytearray(_U32.pack(ncols))
    for s in sf.streams:
        out += _STREAM.pack(s.chunk_offset, s.chunk_len, s.encoding)
    return bytes(out)


def parse_stripe_footer(data) -> StripeFooter:
    try:
        (ncols,) = _U32.unpack_from(data, 0)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if ncols == 0:
        raise ParseError("stripe footer has no streams", 0)
    off = 4
    streams = []
    expect_offset = 0
    for _ in range(ncols):
        try:
            chunk_offset, chunk_len, encoding = _STREAM.unpack_from(data, off)
        except struct.error:
            raise ParseError("truncated input", len(data)) from None
        if encoding != 0:
            raise ParseError(f"unknown encoding {encoding}", off + 16)
        if chunk_offset != expect_offset:
            raise ParseError("column chunks are not contiguous", off)
        expect_offset = chunk_offset + chunk_len
        streams.append(StreamInfo(chunk_offset, chunk_len, encoding))
        off += 17
    if off != len(data):
        raise ParseError("trailing bytes after stripe footer", off)
    return StripeFooter(tuple(streams))


def serialize_stripe_index(si: StripeIndex, column_types) -> bytes:
    if si.num_row_groups < 1:
        raise ValueError("index must cover at least one row group")
    if len(si.columns) != len(column_types):
        raise ValueError("index column count != schema column count")
    out = bytearray(_U32.pack(si.num_row_groups))
    for entry, ctype in zip(si.columns, column_types):
        if len(entry.groups) != si.num_row_groups:
            raise ValueError("row-group count mismatch in index column")
        _stats_wire(out, entry.stripe_stats, ctype)
        for g in entry.groups:
            _stats_wire(out, g.stats, ctype)
            out += _U64.pack(g.byte_offset)
    return bytes(out)


def parse_stripe_index(data, column_types) -> StripeIndex:
    try:
        (ngroups,) = _U32.unpack_from(data, 0)
    except struct.error:
        raise ParseError("truncated input", len(data)) from None
    if ngroups == 0:
        raise ParseError("index has no row groups", 0)
    off = 4
    columns = []
    for ctype in column_types:
        stripe_stats, off = _parse_stats(data, off, ctype)
        groups = []
        prev_offset = -1
        for _ in range(ngroups):
            st, off = _parse_stats(data, off, ctype)
            try:
                (byte_offset,) = _U64.unpack_from(data, off)
            except struct.error:
                raise ParseError("truncated input", len(data)) from None
            if byte_offset <= prev_offset:
                raise ParseError("row-group offsets not strictly increasing", off)
            prev_offset = byte_offset
            groups.append(RowGroupEntry(st, byte_offset))
            off += 8
        columns.append(ColumnIndexEntry(stripe_stats, tuple(groups)))
    if off != len(data):
        raise ParseError("trailing bytes after index", off)
    return StripeIndex(ngroups, tuple(columns))


# ---------------------------------------------------------------------------
# buffer codec
#
# Shared stats record, 32 bytes:
#   [0]    u8  flags: bit0 = has_minmax, bits1-2 = column type code
#   [1:8]  pad
#   [8:16] u64 min_bits   (int64: two's complement; float64: IEEE-754 bits;
#   [16:24]u64 max_bits    utf8: heap_offset | len << 32; zero when absent)
#   [24:32]u64 null_count


def _pack_stats_record(buf: bytearray, off: int, stats: ColumnStats, ctype: int,
                       heap: bytearray | None) -> None:
    flags = ctype << 1
    min_bits = max_bits = 0
    if stats.has_minmax:
        flags |= 1
        if ctype == ColumnType.INT64:
            min_bits = stats.min & _U64_MASK
            max_bits = stats.max & _U64_MASK
        elif ctype == ColumnType.FLOAT64:
            (min_bits,) = _U64.unpack(_F64.pack(stats.min))
            (max_bits,) = _U64.unpack(_F64.pack(stats.max))
        else:
            min_bits = len(heap) | (len(stats.min) << 32)
            heap += stats.min
            max_bits = len(heap) | (len(stats.max) << 32)
            heap += stats.max
    buf[off] = flags
    _U64.pack_into(buf, off + 8, min_bits)
    _U64.pack_into(buf, off + 16, max_bits)
    _U64.pack_into(buf, off + 24, stats.null_count)


def _padded(n: int) -> int:
    return (n + 7) & ~7


def encode_footer_buf(footer: FileFooter) -> bytes:
    ncols = len(footer.columns)
    nstripes = len(footer.stripes)
    col_table_off = 56
    stripe_table_off = col_table_off + 16 * ncols
    stats_table_off = stripe_table_off + 40 * nstripes
    heap_off = stats_table_off + 32 * ncols

    heap = bytearray()
    name_spans = []
    for name, _ in footer.columns:
        raw = name.encode("utf-8")
        name_spans.append((len(heap), len(raw)))
        heap += raw

    # stats records are packed below, interleaving utf8 bounds into the heap
    stats_area = bytearray(32 * ncols)
    for i, (stats, (_, ctype)) in enumerate(zip(footer.file_stats, footer.columns)):
        _pack_stats_record(stats_area, 32 * i, stats, ctype, heap)

    total = heap_off + _padded(len(heap))
    buf = bytearray(total)
    buf[0:4] = BUF_MAGIC
    buf[4] = 0  # kind
    _U32.pack_into(buf, 8, footer.version)
    _U32.pack_into(buf, 12, ncols)
    _U64.pack_into(buf, 16, footer.num_rows)
    _U32.pack_into(buf, 24, nstripes)
    _U32.pack_into(buf, 32, col_table_off)
    _U32.pack_into(buf, 36, stripe_table_off)
    _U32.pack_into(buf, 40, stats_table_off)
    _U32.pack_into(buf, 44, heap_off)
    _U32.pack_into(buf, 48, len(heap))
    for i, ((name_off, name_len), (_, ctype)) in enumerate(
        zip(name_spans, footer.columns)
    ):
        rec = col_table_off + 16 * i
        buf[rec] = ctype
        _U32.pack_into(buf, rec + 4, name_off)
        _U32.pack_into(buf, rec + 8, name_len)
    for i, s in enumerate(footer.stripes):
        _STRIPE.pack_into(
            buf,
            stripe_table_off + 40 * i,
            s.stripe_offset,
            s.index_len,
            s.data_len,
            s.footer_len,
            s.num_rows,
        )
    buf[stats_table_off : stats_table_off + 32 * ncols] = stats_area
    buf[heap_off : heap_off + len(heap)] = heap
    return bytes(buf)


def encode_stripe_footer_buf(sf: StripeFooter) -> bytes:
    ncols = len(sf.streams)
    buf = bytearray(16 + 24 * ncols)
    buf[0:4] = BUF_MAGIC
    buf[4] = 1  # kind
    _U32.pack_into(buf, 8, ncols)
    for i, s in enumerate(sf.streams):
        rec = 16 + 24 * i
        _U64.pack_into(buf, rec, s.chunk_offset)
        _U64.pack_into(buf, rec + 8, s.chunk_len)
        buf[rec + 16] = s.encoding
    return bytes(buf)


def encode_stripe_index_buf(si: StripeIndex, column_types) -> bytes:
    ncols = len(column_types)
    if len(si.columns) != ncols:
        raise ValueError("index column count != schema column count")
    ngroups = si.num_row_groups
    stride = 32 + 40 * ngroups
    table_off = 32
    heap_off = table_off + ncols * stride

    heap = bytearray()
    body = bytearray(ncols * stride)
    for c, (entry, ctype) in enumerate(zip(si.columns, column_types)):
        if len(entry.groups) != ngroups:
            raise ValueError("row-group count mismatch in index column")
        base = c * stride
        _pack_stats_record(body, base, entry.stripe_stats, ctype, heap)
        for g, group in enumerate(entry.groups):
            rec = base + 32 + 40 * g
            _pack_stats_record(body, rec, group.stats, ctype, heap)
            _U64.pack_into(body, rec + 32, group.byte_offset)

    buf = bytearray(heap_off + _padded(len(heap)))
    buf[0:4] = BUF_MAGIC
    buf[4] = 2  # kind
    _U32.pack_into(buf, 8, ncols)
    _U32.pack_into(buf, 12, ngroups)
    _U32.pack_into(buf, 16, table_off)
    _U32.pack_into(buf, 20, heap_off)
    _U32.pack_into(buf, 24, len(heap))
    buf[table_off:heap_off] = body
    buf[heap_off : heap_off + len(heap)] = heap
    return bytes(buf)

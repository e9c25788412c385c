"""Columnar file writer.

Builds the whole file in memory: fine at the dataset sizes this
library targets. Null rows keep a full-width zero slot (or a
zero-length slot for Utf8) so row-group byte offsets stay simple.
"""

from __future__ import annotations

import struct

from ..errors import EmptyInputError, SchemaError
from .codec import serialize_footer, serialize_stripe_footer, serialize_stripe_index
from .compress import DEFAULT_LEVEL, deflate_section
from .stats import compute_stats, merge_stats
from .types import (
    MAGIC,
    ROW_GROUP_SIZE,
    ColumnIndexEntry,
    ColumnStats,
    ColumnType,
    FileFooter,
    FORMAT_VERSION,
    RowGroupEntry,
    StreamInfo,
    StripeFooter,
    StripeIndex,
    StripeInfo,
)

_I64_MIN = -(1 << 63)
_I64_MAX = (1 << 63) - 1


def _normalize_cell(value, ctype: ColumnType, row: int, col: int):
    if value is None:
        return None
    if ctype == ColumnType.INT64:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"row {row} col {col}: expected int, got {type(value).__name__}")
        if not _I64_MIN <= value <= _I64_MAX:
            raise SchemaError(f"row {row} col {col}: int out of 64-bit range")
        return value
    if ctype == ColumnType.FLOAT64:
        if isinstance(value, bool) or not isinstance(value, float):
            raise SchemaError(f"row {row} col {col}: expected float, got {type(value).__name__}")
        return value
    if isinstance(value, str):
        return value.encode("utf-8")
    if isinstance(value, (bytes, bytearray)):
        return bytes(value)
    raise SchemaError(f"row {row} col {col}: expected str or bytes, got {type(value).__name__}")


def _build_chunk(values: list, ctype: ColumnType) -> tuple[bytes, list[int]]:
    """Return (decompressed chunk bytes, per-group value offsets)."""
    n = len(values)
    bitmap = bytearray((n + 7) // 8)
    for i, v in enumerate(values):
        if v is not None:
            bitmap[i >> 3] |= 1 << (i & 7)

    group_offsets = []
    if ctype == ColumnType.UTF8:
        parts = []
        pos = 0
        for i, v in enumerate(values):
            if i % ROW_GROUP_SIZE == 0:
                group_offsets.append(pos)
            b = v if v is not None else b""
            parts.append(struct.pack("<I", len(b)))
            parts.append(b)
            pos += 4 + len(b)
        body = b"".join(parts)
    else:
        fmt = "<%dq" if ctype == ColumnType.INT64 else "<%dd"
        zero = 0 if ctype == ColumnType.INT64 else 0.0
        body = struct.pack(fmt % n, *(v if v is not None else zero for v in values))
        group_offsets = [g * ROW_GROUP_SIZE * 8 for g in range((n + ROW_GROUP_SIZE - 1) // ROW_GROUP_SIZE)]
    return bytes(bitmap) + body, group_offsets


def write_file(schema, rows, stripe_rows: int = 8192,
               level: int = DEFAULT_LEVEL) -> tuple[bytes, FileFooter]:
    """Serialize ``rows`` under ``schema`` into a complete file.

    Returns the file bytes and the footer that was written. Rows are
    sequences matching the schema; ``None`` cells are nulls. Stripes
    hold ``stripe_rows`` rows apiece, the last one possibly fewer.
    """
    schema = [(name, ColumnType(ctype)) for name, ctype in schema]
    if not schema:
        raise SchemaError("schema must have at least one column")
    if stripe_rows < 1:
        raise ValueError("stripe_rows must be >= 1")
    rows = list(rows)
    if not rows:
        raise EmptyInputError("cannot write a file with zero rows")
    ncols = len(schema)
    for r, row in enumerate(rows):
        if len(row) != ncols:
            raise SchemaError(f"row {r}: expected {ncols} cells, got {len(row)}")

    out = bytearray(MAGIC)
    stripe_infos: list[StripeInfo] = []
    stripe_stats_per_col: list[list[ColumnStats]] = [[] for _ in range(ncols)]

    for start in range(0, len(rows), stripe_rows):
        batch = rows[start : start + stripe_rows]
        n = len(batch)
        ngroups = (n + ROW_GROUP_SIZE - 1) // ROW_GROUP_SIZE

        chunks: list[bytes] = []
        index_cols: list[ColumnIndexEntry] = []
        for c, (_, ctype) in enumerate(schema):
            values = [
                _normalize_cell(batch[i][c], ctype, start + i, c) for i in range(n)
            ]
            chunk, offsets = _build_chunk(values, ctype)
            chunks.append(deflate_section(chunk, level))

            groups = []
            for g in range(ngroups):
                sl = values[g * ROW_GROUP_SIZE : (g + 1) * ROW_GROUP_SIZE]
                groups.append(RowGroupEntry(compute_stats(sl, ctype), offsets[g]))
            col_stats = merge_stats(g.stats for g in groups)
            stripe_stats_per_col[c].append(col_stats)
            index_cols.append(ColumnIndexEntry(col_stats, tuple(groups)))

        index = StripeIndex(ngroups, tuple(index_cols))
        index_comp = deflate_section(
            serialize_stripe_index(index, [t for _, t in schema]), level
        )

        streams = []
        pos = 0
        for comp in chunks:
            streams.append(StreamInfo(pos, len(comp), 0))
            pos += len(comp)
        sfooter_comp = deflate_section(
            serialize_stripe_footer(StripeFooter(tuple(streams))), level
        )

        stripe_infos.append(
            StripeInfo(len(out), len(index_comp), pos, len(sfooter_comp), n)
        )
        out += index_comp
        for comp in chunks:
            out += comp
        out += sfooter_comp

    footer = FileFooter(
        FORMAT_VERSION,
        len(rows),
        tuple(schema),
        tuple(stripe_infos),
        tuple(merge_stats(per_stripe) for per_stripe in stripe_stats_per_col),
    )
    footer_comp = deflate_section(serialize_footer(footer), level)
    out += footer_comp
    out += struct.pack("<I", len(footer_comp))
    out += MAGIC
    return bytes(out), footer

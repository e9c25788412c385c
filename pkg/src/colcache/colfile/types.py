"""Domain types for the columnar file format.

A file is a sequence of stripes followed by a compressed file footer.
Each stripe holds three sections laid out contiguously: an index with
per-row-group statistics, the column-chunk data region, and a stripe
footer listing chunk locations. All multi-byte integers are
little-endian on the wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

MAGIC = b"OCF1"
FORMAT_VERSION = 1
ROW_GROUP_SIZE = 1024


class ColumnType(IntEnum):
    INT64 = 0
    FLOAT64 = 1
    UTF8 = 2


@dataclass(frozen=True)
class ColumnStats:
    """Min/max/null statistics over a run of rows.

    ``has_minmax`` is false when the run has no value eligible for
    min/max (all rows null, or for Float64 all non-null values NaN).
    Utf8 bounds are raw bytes compared in unsigned bytewise order.
    """

    has_minmax: bool
    min: int | float | bytes | None
    max: int | float | bytes | None
    null_count: int

    @classmethod
    def empty(cls, null_count: int) -> "ColumnStats":
        return cls(False, None, None, null_count)


@dataclass(frozen=True)
class StripeInfo:
    """Directory entry for one stripe: section lengths and row count."""

    stripe_offset: int  # absolute offset of the index section
    index_len: int  # compressed
    data_len: int  # compressed, all chunks
    footer_len: int  # compressed
    num_rows: int

    @property
    def data_offset(self) -> int:
        return self.stripe_offset + self.index_len

    @property
    def footer_offset(self) -> int:
        return self.stripe_offset + self.index_len + self.data_len


@dataclass(frozen=True)
class FileFooter:
    """Trailing file metadata: schema, stripe directory, file-level stats."""

    version: int
    num_rows: int
    columns: tuple[tuple[str, ColumnType], ...]
    stripes: tuple[StripeInfo, ...]
    file_stats: tuple[ColumnStats, ...]

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    @property
    def num_stripes(self) -> int:
        return len(self.stripes)

    def column(self, i: int) -> tuple[str, ColumnType]:
        return self.columns[i]

    def stripe(self, i: int) -> StripeInfo:
        return self.stripes[i]

    def stats(self, i: int) -> ColumnStats:
        return self.file_stats[i]

    def column_types(self) -> tuple[ColumnType, ...]:
        return tuple(t for _, t in self.columns)


@dataclass(frozen=True)
class StreamInfo:
    """Location of one column chunk inside a stripe's data region."""

    chunk_offset: int  # relative to the data-region start
    chunk_len: int  # compressed
    encoding: int = 0  # Plain is the only encoding


@dataclass(frozen=True)
class StripeFooter:
    """Per-stripe directory of column-chunk locations."""

    streams: tuple[StreamInfo, ...]

    @property
    def num_columns(self) -> int:
        return len(self.streams)

    def stream(self, i: int) -> StreamInfo:
        return self.streams[i]


@dataclass(frozen=True)
class RowGroupEntry:
    """Statistics plus the group's first-value offset in the values region."""

    stats: ColumnStats
    byte_offset: int


@dataclass(frozen=True)
class ColumnIndexEntry:
    stripe_stats: ColumnStats
    groups: tuple[RowGroupEntry, ...]


@dataclass(frozen=True)
class ColumnChunk:
    """One column of one stripe, decompressed.

    ``values`` has one slot per row; null rows keep a zero slot
    (``0``, ``0.0``, or ``b""``) and are flagged off in the bitmap,
    where bit ``i`` (LSB-first within each byte) marks row ``i``
    non-null.
    """

    null_bitmap: bytes
    values: tuple

    def is_null(self, i: int) -> bool:
        return not (self.null_bitmap[i >> 3] >> (i & 7)) & 1

    def value(self, i: int):
        """Slot value, or ``None`` when row ``i`` is null."""
        return None if self.is_null(i) else self.values[i]


@dataclass(frozen=True)
class StripeIndex:
    """Per-stripe, per-column statistics at stripe and row-group grain."""

    num_row_groups: int
    columns: tuple[ColumnIndexEntry, ...] = field(default=())

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def stripe_stats(self, c: int) -> ColumnStats:
        return self.columns[c].stripe_stats

    def group_stats(self, c: int, g: int) -> ColumnStats:
        return self.columns[c].groups[g].stats

    def group_offset(self, c: int, g: int) -> int:
        return self.columns[c].groups[g].byte_offset

"""Simplified self-contained columnar file format.

Files carry stripes of column chunks framed by three independently
compressed metadata sections (stripe index, stripe footer, file
footer); those sections are what the metadata cache stores.
"""

from __future__ import annotations

from .codec import (
    parse_footer,
    parse_stripe_footer,
    parse_stripe_index,
    serialize_footer,
    serialize_stripe_footer,
    serialize_stripe_index,
)
from .compress import DEFAULT_LEVEL, deflate_section, inflate_section
from .reader import ColFileReader, decode_chunk, locate_footer
from .stats import compute_stats, merge_stats
from .types import (
    FORMAT_VERSION,
    MAGIC,
    ROW_GROUP_SIZE,
    ColumnChunk,
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
from .writer import write_file

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "ROW_GROUP_SIZE",
    "DEFAULT_LEVEL",
    "ColumnType",
    "ColumnStats",
    "StripeInfo",
    "FileFooter",
    "StreamInfo",
    "StripeFooter",
    "RowGroupEntry",
    "ColumnIndexEntry",
    "StripeIndex",
    "ColumnChunk",
    "write_file",
    "ColFileReader",
    "locate_footer",
    "decode_chunk",
    "compute_stats",
    "merge_stats",
    "deflate_section",
    "inflate_section",
    "serialize_footer",
    "parse_footer",
    "serialize_stripe_footer",
    "parse_stripe_footer",
    "serialize_stripe_index",
    "parse_stripe_index",
]

"""Canonical wire serialization of the three metadata section types.

Thin re-exports of the active kernel lane. ``parse(serialize(x)) == x``
and ``serialize(parse(b)) == b`` hold for all three pairs; the index
pair additionally needs the file's column types, since stats widths
depend on them.
"""

from __future__ import annotations

from ..kernels import (
    parse_footer,
    parse_stripe_footer,
    parse_stripe_index,
    serialize_footer,
    serialize_stripe_footer,
    serialize_stripe_index,
)

__all__ = [
    "serialize_footer",
    "parse_footer",
    "serialize_stripe_footer",
    "parse_stripe_footer",
    "serialize_stripe_index",
    "parse_stripe_index",
]

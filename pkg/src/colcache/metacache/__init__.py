"""Worker-side metadata cache.

Two value codecs are supported: raw decompressed section bytes (cheap
to write, re-deserialized on every read) and flat object buffers
(encoded once, then read by offset without deserializing).
"""

from __future__ import annotations

from .keys import KEY_WIRE_LEN, CacheKey, SectionKind, fnv1a64, make_file_id
from .objbuf import (
    BUF_MAGIC,
    FooterView,
    StripeFooterView,
    StripeIndexView,
    decode_footer_view,
    decode_stripe_footer_view,
    decode_stripe_index_view,
    encode_footer_buf,
    encode_stripe_footer_buf,
    encode_stripe_index_buf,
)
from .policy import Bookkeeping, EvictionPolicy, select_victim
from .store import CacheStats, CacheValue, MetadataCache, ValueKind, open_store

__all__ = [
    "CacheKey",
    "SectionKind",
    "KEY_WIRE_LEN",
    "fnv1a64",
    "make_file_id",
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
    "EvictionPolicy",
    "Bookkeeping",
    "select_victim",
    "CacheValue",
    "ValueKind",
    "CacheStats",
    "MetadataCache",
    "open_store",
]

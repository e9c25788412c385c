"""Codec kernel lane selection.

The compiled extension is preferred when it imports cleanly; setting
``COLCACHE_PURE=1`` forces the pure-Python lane. Both lanes produce
byte-identical output and raise the same errors, so the choice only
affects speed.
"""

from __future__ import annotations

import os

from . import pure

ACTIVE_LANE = "pure"
_impl = pure

if os.environ.get("COLCACHE_PURE", "") not in ("", "0"):
    pass
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        ACTIVE_LANE = "native"
    except ImportError:
        pass

serialize_footer = _impl.serialize_footer
parse_footer = _impl.parse_footer
serialize_stripe_footer = _impl.serialize_stripe_footer
parse_stripe_footer = _impl.parse_stripe_footer
serialize_stripe_index = _impl.serialize_stripe_index
parse_stripe_index = _impl.parse_stripe_index
encode_footer_buf = _impl.encode_footer_buf
encode_stripe_footer_buf = _impl.encode_stripe_footer_buf
encode_stripe_index_buf = _impl.encode_stripe_index_buf

BUF_MAGIC = pure.BUF_MAGIC

_KERNEL_NAMES = (
    "serialize_footer",
    "parse_footer",
    "serialize_stripe_footer",
    "parse_stripe_footer",
    "serialize_stripe_index",
    "parse_stripe_index",
    "encode_footer_buf",
    "encode_stripe_footer_buf",
    "encode_stripe_index_buf",
)


def available_lanes() -> dict[str, object]:
    """Return importable lanes by name (for the lane benchmark and tests)."""
    lanes: dict[str, object] = {"pure": pure}
    try:
        from . import _native

        lanes["native"] = _native
    except ImportError:
        pass
    return lanes

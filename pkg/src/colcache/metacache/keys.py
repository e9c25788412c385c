"""Cache keys: one entry per (file, metadata section)."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF

KEY_WIRE_LEN = 13
_KEY = struct.Struct("<QBI")


class SectionKind(IntEnum):
    FOOTER = 0
    STRIPE_FOOTER = 1
    STRIPE_INDEX = 2


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64_MASK
    return h


def make_file_id(path: bytes, size: int, mtime_ns: int) -> int:
    """Fingerprint a file so a rewritten file self-invalidates.

    FNV-1a 64 over ``path || 0x00 || size || mtime_ns`` (both integers
    little-endian u64). ``path`` should be the canonical absolute path.
    """
    if not path:
        raise ValueError("path must be non-empty")
    return fnv1a64(path + b"\x00" + struct.pack("<QQ", size, mtime_ns))


@dataclass(frozen=True)
class CacheKey:
    """13-byte wire key: u64 file id, u8 section kind, u32 stripe ordinal."""

    file_id: int
    section_kind: SectionKind
    stripe_ordinal: int = 0

    def __post_init__(self):
        if self.section_kind == SectionKind.FOOTER and self.stripe_ordinal != 0:
            raise ValueError("footer keys use stripe_ordinal 0")

    def to_bytes(self) -> bytes:
        return _KEY.pack(self.file_id, self.section_kind, self.stripe_ordinal)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CacheKey":
        if len(data) != KEY_WIRE_LEN:
            raise ValueError(f"cache key must be {KEY_WIRE_LEN} bytes")
        file_id, kind, ordinal = _KEY.unpack(data)
        return cls(file_id, SectionKind(kind), ordinal)

"""Vectorized chunk access for the scan path.

Numeric chunks map straight onto numpy arrays; utf8 chunks are walked
lazily per row group, entering at the byte offset the stripe index
stored for that group so skipped groups are never materialized.
"""

from __future__ import annotations

import struct

import numpy as np

from ..colfile.types import ColumnType, ROW_GROUP_SIZE
from ..errors import CorruptFileError


class ChunkCursor:
    """Group-addressable access to one decompressed column chunk."""

    def __init__(self, raw: bytes, num_rows: int, ctype: ColumnType,
                 group_offsets):
        self.ctype = ctype
        self.num_rows = num_rows
        self._raw = raw
        self._group_offsets = group_offsets
        bm_len = (num_rows + 7) // 8
        if len(raw) < bm_len:
            raise CorruptFileError("chunk shorter than its null bitmap")
        bits = np.unpackbits(
            np.frombuffer(raw, dtype=np.uint8, count=bm_len), bitorder="little"
        )
        self.valid = bits[:num_rows].astype(bool)
        self._values_off = bm_len
        if ctype == ColumnType.UTF8:
            self._values = None
        else:
            if len(raw) != bm_len + 8 * num_rows:
                raise CorruptFileError("chunk length disagrees with row count")
            dtype = "<i8" if ctype == ColumnType.INT64 else "<f8"
            self._values = np.frombuffer(raw, dtype=dtype, count=num_rows, offset=bm_len)

    def group_valid(self, start: int, stop: int) -> np.ndarray:
        return self.valid[start:stop]

    def group_values(self, g: int, start: int, stop: int):
        """Values for rows [start, stop) of group ``g``.

        Numeric columns return a numpy slice; utf8 columns decode the
        group's slots on demand, seeking via the stored group offset.
        """
        if self._values is not None:
            return self._values[start:stop]
        raw = self._raw
        pos = self._values_off + self._group_offsets[g]
        out = []
        for _ in range(stop - start):
            if pos + 4 > len(raw):
                raise CorruptFileError("chunk truncated in utf8 slot")
            (n,) = struct.unpack_from("<I", raw, pos)
            pos += 4
            if pos + n > len(raw):
                raise CorruptFileError("chunk truncated in utf8 slot")
            out.append(raw[pos : pos + n])
            pos += n
        return out


def atom_mask(op: str, values, valid: np.ndarray, literal) -> np.ndarray:
    """Row mask for one atom over one group; null rows never match."""
    if isinstance(values, np.ndarray):
        if op == "<":
            m = values < literal
        elif op == "<=":
            m = values <= literal
        elif op == "==":
            m = values == literal
        elif op == ">=":
            m = values >= literal
        elif op == ">":
            m = values > literal
        else:
            m = values != literal
        return m & valid
    compare = {
        "<": lambda v: v < literal,
        "<=": lambda v: v <= literal,
        "==": lambda v: v == literal,
        ">=": lambda v: v >= literal,
        ">": lambda v: v > literal,
        "!=": lambda v: v != literal,
    }[op]
    return np.fromiter(
        (bool(ok) and compare(v) for v, ok in zip(values, valid)),
        dtype=bool,
        count=len(values),
    )


def group_bounds(g: int, num_rows: int) -> tuple[int, int]:
    start = g * ROW_GROUP_SIZE
    return start, min(num_rows, start + ROW_GROUP_SIZE)

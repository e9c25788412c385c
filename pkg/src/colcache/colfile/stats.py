"""Column statistics computation and aggregation."""

from __future__ import annotations

import math

from .types import ColumnStats, ColumnType


def compute_stats(values, ctype: ColumnType) -> ColumnStats:
    """Compute min/max/null stats over one column slice.

    ``None`` entries are nulls. Float64 NaN values never enter min/max
    but still count as non-null; a slice whose only non-null values are
    NaN gets ``has_minmax=False`` like an all-null slice does.
    """
    null_count = 0
    mn = mx = None
    if ctype == ColumnType.FLOAT64:
        for v in values:
            if v is None:
                null_count += 1
            elif not math.isnan(v):
                if mn is None:
                    mn = mx = v
                else:
                    if v < mn:
                        mn = v
                    if v > mx:
                        mx = v
    else:
        for v in values:
            if v is None:
                null_count += 1
            elif mn is None:
                mn = mx = v
            else:
                if v < mn:
                    mn = v
                if v > mx:
                    mx = v
    if mn is None:
        return ColumnStats(False, None, None, null_count)
    return ColumnStats(True, mn, mx, null_count)


def merge_stats(parts) -> ColumnStats:
    """Fold stats over sub-ranges into stats over their union."""
    null_count = 0
    mn = mx = None
    for p in parts:
        null_count += p.null_count
        if p.has_minmax:
            if mn is None:
                mn, mx = p.min, p.max
            else:
                if p.min < mn:
                    mn = p.min
                if p.max > mx:
                    mx = p.max
    if mn is None:
        return ColumnStats(False, None, None, null_count)
    return ColumnStats(True, mn, mx, null_count)

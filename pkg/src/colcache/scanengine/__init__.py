"""Scan engine: split scans, predicate pushdown, cache-mode plumbing."""

from __future__ import annotations

from .chunks import ChunkCursor, atom_mask, group_bounds
from .engine import (
    AGG_KINDS,
    AggSpec,
    CacheMode,
    ColFileHandle,
    ScanResult,
    Split,
    combine_results,
    open_file,
    run_query,
    scan_split,
)
from .predicate import (
    OPS,
    Atom,
    Predicate,
    PushdownResult,
    atom_pushdown,
    eval_pushdown,
)

__all__ = [
    "CacheMode",
    "AggSpec",
    "AGG_KINDS",
    "ScanResult",
    "Split",
    "ColFileHandle",
    "open_file",
    "scan_split",
    "run_query",
    "combine_results",
    "Atom",
    "Predicate",
    "OPS",
    "PushdownResult",
    "atom_pushdown",
    "eval_pushdown",
    "ChunkCursor",
    "atom_mask",
    "group_bounds",
]

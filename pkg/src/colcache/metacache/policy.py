"""Eviction policies over per-entry bookkeeping.

Victim selection is a pure function of three counters kept per entry:
insertion sequence, last-access sequence, and access count. Sequence
numbers are drawn from one strictly increasing counter per cache, so
every selection is total and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class EvictionPolicy(Enum):
    FIFO = "fifo"
    LRU = "lru"
    LFU = "lfu"

    @classmethod
    def parse(cls, value: "EvictionPolicy | str") -> "EvictionPolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown eviction policy {value!r}") from None


@dataclass
class Bookkeeping:
    """Per-entry state the policies rank by."""

    ins_seq: int
    acc_seq: int
    freq: int


def _fifo_rank(b: Bookkeeping):
    return (b.ins_seq,)


def _lru_rank(b: Bookkeeping):
    return (b.acc_seq,)


def _lfu_rank(b: Bookkeeping):
    # ties: least recently used first, then oldest insertion
    return (b.freq, b.acc_seq, b.ins_seq)


_RANKS = {
    EvictionPolicy.FIFO: _fifo_rank,
    EvictionPolicy.LRU: _lru_rank,
    EvictionPolicy.LFU: _lfu_rank,
}


def select_victim(policy: EvictionPolicy, entries, exclude=None):
    """Pick the key to evict from ``entries`` ({key: Bookkeeping}).

    ``exclude`` protects the key just inserted. Raises ``ValueError``
    when nothing is evictable.
    """
    rank = _RANKS[policy]
    best_key = None
    best_rank = None
    for key, book in entries.items():
        if key == exclude:
            continue
        r = rank(book)
        if best_rank is None or r < best_rank:
            best_key = key
            best_rank = r
    if best_key is None:
        raise ValueError("no evictable entries")
    return best_key

"""Byte-budgeted metadata cache with memory and on-disk backends.

A cache maps 13-byte section keys to tagged payloads and evicts by
FIFO, LRU, or LFU once the sum of payload charges would exceed the
capacity. The handle is shareable across threads; payloads handed out
are immutable bytes.

The on-disk backend keeps one file per key, named as the 26-hex-char
key, holding ``u64 insertion_seq || u64 last_access_seq || u8 kind ||
payload``. Reopening a directory reconstructs FIFO/LRU order from the
stored sequences; LFU counts restart at 1 (persisting them would write
on every hit).
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass, replace
from enum import IntEnum
from pathlib import Path

from ..errors import BackendError, OversizeValueError
from .keys import KEY_WIRE_LEN, CacheKey
from .policy import Bookkeeping, EvictionPolicy, select_victim

logger = logging.getLogger(__name__)

_SEQ_HEADER_LEN = 17  # two u64 sequences + kind byte


class ValueKind(IntEnum):
    RAW_DECOMPRESSED = 0
    OBJECT_BUFFER = 1


@dataclass(frozen=True)
class CacheValue:
    kind: ValueKind
    payload: bytes

    @property
    def charge(self) -> int:
        return len(self.payload)


@dataclass
class CacheStats:
    """Deterministic counters; monotone within a cache's lifetime."""

    hits: int = 0
    misses: int = 0
    puts: int = 0
    evictions: int = 0
    bytes_cached: int = 0
    inflate_count: int = 0
    deserialize_count: int = 0
    encode_count: int = 0
    decode_count: int = 0

    def copy(self) -> "CacheStats":
        return replace(self)

    def delta(self, earlier: "CacheStats") -> "CacheStats":
        """Counter movement since ``earlier``; bytes_cached stays absolute."""
        return CacheStats(
            hits=self.hits - earlier.hits,
            misses=self.misses - earlier.misses,
            puts=self.puts - earlier.puts,
            evictions=self.evictions - earlier.evictions,
            bytes_cached=self.bytes_cached,
            inflate_count=self.inflate_count - earlier.inflate_count,
            deserialize_count=self.deserialize_count - earlier.deserialize_count,
            encode_count=self.encode_count - earlier.encode_count,
            decode_count=self.decode_count - earlier.decode_count,
        )


class _MemoryBackend:
    kind = "memory"

    def __init__(self):
        self._data: dict[CacheKey, tuple[int, bytes]] = {}

    def write(self, key, kind, ins_seq, acc_seq, payload):
        self._data[key] = (kind, payload)

    def read(self, key) -> tuple[int, bytes]:
        return self._data[key]

    def touch(self, key, acc_seq):
        pass

    def delete(self, key):
        self._data.pop(key, None)

    def scan(self):
        return iter(())


class _DiskBackend:
    kind = "disk"

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise BackendError(f"cannot create cache directory {self.dir}: {exc}") from exc
        if not os.access(self.dir, os.W_OK | os.X_OK):
            raise BackendError(f"cache directory {self.dir} is not writable")

    def _path(self, key: CacheKey) -> Path:
        return self.dir / key.to_bytes().hex()

    def write(self, key, kind, ins_seq, acc_seq, payload):
        header = ins_seq.to_bytes(8, "little") + acc_seq.to_bytes(8, "little") + bytes([kind])
        try:
            self._path(key).write_bytes(header + payload)
        except OSError as exc:
            raise BackendError(f"cache write failed for {key}: {exc}") from exc

    def read(self, key) -> tuple[int, bytes]:
        try:
            data = self._path(key).read_bytes()
        except OSError as exc:
            raise BackendError(f"cache read failed for {key}: {exc}") from exc
        if len(data) < _SEQ_HEADER_LEN:
            raise BackendError(f"cache file for {key} is truncated")
        return data[16], data[_SEQ_HEADER_LEN:]

    def touch(self, key, acc_seq):
        try:
            with open(self._path(key), "r+b") as f:
                f.seek(8)
                f.write(acc_seq.to_bytes(8, "little"))
        except OSError as exc:
            logger.warning("could not persist access sequence for %s: %s", key, exc)

    def delete(self, key):
        try:
            self._path(key).unlink(missing_ok=True)
        except OSError as exc:
            logger.warning("could not delete cache file for %s: %s", key, exc)

    def scan(self):
        """Yield (key, kind, ins_seq, acc_seq, charge) for stored entries."""
        for path in sorted(self.dir.iterdir()):
            name = path.name
            if len(name) != 2 * KEY_WIRE_LEN:
                continue
            try:
                key = CacheKey.from_bytes(bytes.fromhex(name))
            except ValueError:
                continue
            try:
                data = path.read_bytes()
            except OSError as exc:
                logger.warning("skipping unreadable cache file %s: %s", path, exc)
                continue
            if len(data) < _SEQ_HEADER_LEN:
                logger.warning("skipping truncated cache file %s", path)
                continue
            ins_seq = int.from_bytes(data[0:8], "little")
            acc_seq = int.from_bytes(data[8:16], "little")
            yield key, data[16], ins_seq, acc_seq, len(data) - _SEQ_HEADER_LEN


class _Entry:
    __slots__ = ("kind", "charge", "book")

    def __init__(self, kind: int, charge: int, book: Bookkeeping):
        self.kind = kind
        self.charge = charge
        self.book = book


class MetadataCache:
    """Thread-safe key/value cache for decoded metadata sections."""

    def __init__(self, backend, capacity_bytes: int, policy: EvictionPolicy):
        if capacity_bytes <= 0:
            raise ValueError("capacity_bytes must be positive")
        self._backend = backend
        self.capacity = capacity_bytes
        self.policy = policy
        self._entries: dict[CacheKey, _Entry] = {}
        self._seq = 0
        self._stats = CacheStats()
        self._lock = threading.RLock()
        self._trace: list | None = None
        self._reload()

    # -- lifecycle ------------------------------------------------------

    def _reload(self) -> None:
        found = sorted(self._backend.scan(), key=lambda row: row[2])
        for key, kind, ins_seq, acc_seq, charge in found:
            self._entries[key] = _Entry(kind, charge, Bookkeeping(ins_seq, acc_seq, 1))
            self._stats.bytes_cached += charge
            self._seq = max(self._seq, ins_seq, acc_seq)
        while self._stats.bytes_cached > self.capacity:
            self._evict_one(exclude=None)

    @property
    def backend_kind(self) -> str:
        return self._backend.kind

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, key: CacheKey) -> bool:
        # membership probe; does not touch policy bookkeeping
        with self._lock:
            return key in self._entries

    # -- core operations --------------------------------------------------

    def get(self, key: CacheKey) -> CacheValue | None:
        with self._lock:
            self._seq += 1
            seq = self._seq
            if self._trace is not None:
                self._trace.append(("get", key))
            entry = self._entries.get(key)
            if entry is None:
                self._stats.misses += 1
                return None
            try:
                kind, payload = self._backend.read(key)
            except BackendError:
                # drop the unreadable entry so the caller's storage
                # fallback repopulates it
                self._drop(key, entry)
                raise
            entry.book.acc_seq = seq
            entry.book.freq += 1
            self._backend.touch(key, seq)
            self._stats.hits += 1
            return CacheValue(ValueKind(kind), payload)

    def put(self, key: CacheKey, value: CacheValue) -> list[CacheKey]:
        charge = value.charge
        if charge > self.capacity:
            raise OversizeValueError(
                f"value of {charge} bytes exceeds capacity {self.capacity}"
            )
        with self._lock:
            self._seq += 1
            seq = self._seq
            if self._trace is not None:
                self._trace.append(("put", key, charge))
            old = self._entries.get(key)
            self._backend.write(key, value.kind, seq, seq, value.payload)
            if old is not None:
                self._stats.bytes_cached -= old.charge
            self._entries[key] = _Entry(value.kind, charge, Bookkeeping(seq, seq, 1))
            self._stats.bytes_cached += charge
            self._stats.puts += 1
            evicted = []
            while self._stats.bytes_cached > self.capacity:
                evicted.append(self._evict_one(exclude=key))
            return evicted

    def _evict_one(self, exclude: CacheKey | None) -> CacheKey:
        victim = select_victim(
            self.policy, {k: e.book for k, e in self._entries.items()}, exclude
        )
        self._drop(victim, self._entries[victim])
        self._stats.evictions += 1
        return victim

    def _drop(self, key: CacheKey, entry: _Entry) -> None:
        del self._entries[key]
        self._stats.bytes_cached -= entry.charge
        self._backend.delete(key)

    # -- statistics -------------------------------------------------------

    def stats_snapshot(self) -> CacheStats:
        with self._lock:
            return self._stats.copy()

    def note_inflate(self) -> None:
        with self._lock:
            self._stats.inflate_count += 1

    def note_deserialize(self) -> None:
        with self._lock:
            self._stats.deserialize_count += 1

    def note_encode(self) -> None:
        with self._lock:
            self._stats.encode_count += 1

    def note_decode(self) -> None:
        with self._lock:
            self._stats.decode_count += 1

    # -- introspection ------------------------------------------------------

    def resident_entries(self) -> dict[CacheKey, int]:
        """Copy of {key: charge}; lets tests recount bytes_cached."""
        with self._lock:
            return {k: e.charge for k, e in self._entries.items()}

    def set_trace(self, sink: list | None) -> None:
        """Record ("get", key) / ("put", key, charge) events into ``sink``."""
        with self._lock:
            self._trace = sink


def open_store(capacity_bytes: int, policy: EvictionPolicy | str = EvictionPolicy.LRU,
               directory: str | Path | None = None) -> MetadataCache:
    """Open a cache: in-memory, or persistent when ``directory`` is given."""
    pol = EvictionPolicy.parse(policy)
    backend = _MemoryBackend() if directory is None else _DiskBackend(directory)
    return MetadataCache(backend, capacity_bytes, pol)

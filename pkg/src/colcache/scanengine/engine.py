"""Split-based scanning with cache-backed metadata loading.

Every metadata read goes through one of three modes: ``NONE`` re-reads
and re-parses from storage, ``BYTES`` caches the decompressed section
bytes and re-parses them on each hit, ``OBJECTS`` caches an encoded
object buffer and only decodes a view on each hit. Scan results are
identical across modes; only the cost counters move differently.
"""

from __future__ import annotations

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..colfile.codec import parse_footer, parse_stripe_footer, parse_stripe_index
from ..colfile.reader import ColFileReader
from ..colfile.types import ColumnType
from ..errors import (
    BackendError,
    BufferFormatError,
    ColCacheError,
    OversizeValueError,
    ParseError,
    SchemaError,
    ScanError,
)
from ..metacache.keys import CacheKey, SectionKind, make_file_id
from ..metacache.objbuf import (
    decode_footer_view,
    decode_stripe_footer_view,
    decode_stripe_index_view,
    encode_footer_buf,
    encode_stripe_footer_buf,
    encode_stripe_index_buf,
)
from ..metacache.store import CacheStats, CacheValue, MetadataCache, ValueKind
from .chunks import ChunkCursor, atom_mask, group_bounds
from .predicate import Predicate, PushdownResult, eval_pushdown

logger = logging.getLogger(__name__)

AGG_KINDS = ("count", "sum", "min", "max")


class CacheMode(Enum):
    NONE = "none"
    BYTES = "bytes"
    OBJECTS = "objects"

    @classmethod
    def parse(cls, value: "CacheMode | str") -> "CacheMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown cache mode {value!r}") from None


@dataclass(frozen=True)
class AggSpec:
    """One aggregate over one projected column (None = count(*))."""

    kind: str
    column: int | None = None

    def __post_init__(self):
        if self.kind not in AGG_KINDS:
            raise ValueError(f"unknown aggregate {self.kind!r}")
        if self.kind != "count" and self.column is None:
            raise ValueError(f"{self.kind} needs a column")

    def validate(self, column_types) -> None:
        if self.column is None:
            return
        if not 0 <= self.column < len(column_types):
            raise SchemaError(f"aggregate column {self.column} out of range")
        if self.kind == "sum" and column_types[self.column] == ColumnType.UTF8:
            raise SchemaError("sum requires a numeric column")


@dataclass(frozen=True)
class ScanResult:
    agg_kind: str
    agg_column: int | None
    value: int | float | bytes | None
    rows_scanned: int
    row_groups_skipped: int
    stripes_skipped: int


@dataclass
class Split:
    """One stripe of one open file; the unit of parallel scanning."""

    handle: "ColFileHandle"
    stripe: int


class _LocalCounters:
    """Cost-counter sink used when no cache is attached (mode NONE)."""

    def __init__(self):
        self._stats = CacheStats()
        self._lock = threading.Lock()

    def stats_snapshot(self) -> CacheStats:
        with self._lock:
            return self._stats.copy()

    def note_inflate(self):
        with self._lock:
            self._stats.inflate_count += 1

    def note_deserialize(self):
        with self._lock:
            self._stats.deserialize_count += 1

    def note_encode(self):
        with self._lock:
            self._stats.encode_count += 1

    def note_decode(self):
        with self._lock:
            self._stats.decode_count += 1


class ColFileHandle:
    """Open file plus the mode-dependent metadata access path."""

    def __init__(self, path: str | Path, cache: MetadataCache | None = None,
                 mode: CacheMode = CacheMode.NONE, counters=None):
        mode = CacheMode.parse(mode)
        if mode is not CacheMode.NONE and cache is None:
            raise ValueError(f"cache mode {mode.value} needs a cache handle")
        self.path = str(path)
        self.cache = cache
        self.mode = mode
        self.counters = cache if cache is not None else (counters or _LocalCounters())
        st = os.stat(path)
        self.file_id = make_file_id(
            os.fsencode(Path(path).resolve()), st.st_size, st.st_mtime_ns
        )
        self.reader = ColFileReader.open(path)
        try:
            self.footer = self.load_footer()
            self._column_types = self.footer.column_types()
        except Exception:
            self.reader.close()
            raise

    def close(self) -> None:
        self.reader.close()

    def __enter__(self) -> "ColFileHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def num_stripes(self) -> int:
        return self.footer.num_stripes

    # -- cache plumbing -------------------------------------------------

    def _cache_get(self, key: CacheKey) -> CacheValue | None:
        try:
            return self.cache.get(key)
        except BackendError as exc:
            logger.warning("cache get degraded to storage for %s: %s", self.path, exc)
            return None

    def _cache_put(self, key: CacheKey, value: CacheValue) -> None:
        try:
            self.cache.put(key, value)
        except (BackendError, OversizeValueError) as exc:
            logger.warning("could not cache section for %s: %s", self.path, exc)

    def _load_section(self, kind: SectionKind, ordinal: int, read_raw,
                      parse_fn, encode_fn, decode_view):
        c = self.counters
        if self.mode is CacheMode.NONE:
            raw = read_raw()
            c.note_inflate()
            obj = parse_fn(raw)
            c.note_deserialize()
            return obj

        key = CacheKey(self.file_id, kind, ordinal)
        hit = self._cache_get(key)
        if self.mode is CacheMode.BYTES:
            if hit is not None and hit.kind == ValueKind.RAW_DECOMPRESSED:
                try:
                    obj = parse_fn(hit.payload)
                    c.note_deserialize()
                    return obj
                except ParseError as exc:
                    logger.warning("discarding unparsable cached bytes: %s", exc)
            raw = read_raw()
            c.note_inflate()
            self._cache_put(key, CacheValue(ValueKind.RAW_DECOMPRESSED, raw))
            obj = parse_fn(raw)
            c.note_deserialize()
            return obj

        if hit is not None and hit.kind == ValueKind.OBJECT_BUFFER:
            try:
                view = decode_view(hit.payload)
                c.note_decode()
                return view
            except BufferFormatError as exc:
                logger.warning("discarding invalid cached buffer: %s", exc)
        raw = read_raw()
        c.note_inflate()
        obj = parse_fn(raw)
        c.note_deserialize()
        buf = encode_fn(obj)
        c.note_encode()
        self._cache_put(key, CacheValue(ValueKind.OBJECT_BUFFER, buf))
        return obj

    # -- metadata access ----------------------------------------------------

    def load_footer(self):
        """Footer via the mode path: FileFooter, or FooterView on warm hits."""
        return self._load_section(
            SectionKind.FOOTER,
            0,
            self.reader.read_footer_raw,
            parse_footer,
            encode_footer_buf,
            decode_footer_view,
        )

    def load_stripe_metadata(self, ordinal: int):
        """(stripe footer, stripe index) for one stripe via the mode path."""
        if not 0 <= ordinal < self.footer.num_stripes:
            raise IndexError(f"stripe {ordinal} out of range")
        info = self.footer.stripe(ordinal)
        sf = self._load_section(
            SectionKind.STRIPE_FOOTER,
            ordinal,
            lambda: self.reader.read_stripe_footer_raw(info),
            parse_stripe_footer,
            encode_stripe_footer_buf,
            decode_stripe_footer_view,
        )
        types = self._column_types
        si = self._load_section(
            SectionKind.STRIPE_INDEX,
            ordinal,
            lambda: self.reader.read_stripe_index_raw(info),
            lambda raw: parse_stripe_index(raw, types),
            lambda obj: encode_stripe_index_buf(obj, types),
            decode_stripe_index_view,
        )
        return sf, si


def open_file(path: str | Path, cache: MetadataCache | None = None,
              mode: CacheMode | str = CacheMode.NONE, counters=None) -> ColFileHandle:
    return ColFileHandle(path, cache, CacheMode.parse(mode), counters)


# ---------------------------------------------------------------------------
# scanning


def _empty_value(agg: AggSpec):
    return 0 if agg.kind == "count" else None


def scan_split(split: Split, predicate: Predicate, agg: AggSpec) -> ScanResult:
    """Scan one stripe; equals a full scan filtered row-by-row.

    Row groups (and whole stripes) whose statistics refute the
    predicate are skipped without touching their chunk bytes.
    """
    handle = split.handle
    footer = handle.footer
    info = footer.stripe(split.stripe)
    n = info.num_rows
    sf, si = handle.load_stripe_metadata(split.stripe)
    ngroups = si.num_row_groups

    pred_cols = sorted(predicate.columns())
    stripe_stats = {c: si.stripe_stats(c) for c in pred_cols}
    if eval_pushdown(predicate, stripe_stats, n) is PushdownResult.MUST_SKIP:
        return ScanResult(agg.kind, agg.column, _empty_value(agg), 0, ngroups, 1)

    surviving = []
    skipped = 0
    for g in range(ngroups):
        a, b = group_bounds(g, n)
        gstats = {c: si.group_stats(c, g) for c in pred_cols}
        if eval_pushdown(predicate, gstats, b - a) is PushdownResult.MUST_SKIP:
            skipped += 1
        else:
            surviving.append(g)
    if not surviving:
        return ScanResult(agg.kind, agg.column, _empty_value(agg), 0, skipped, 0)

    needed = set(pred_cols)
    if agg.column is not None:
        needed.add(agg.column)
    cursors = {}
    for c in sorted(needed):
        raw = handle.reader.read_chunk_raw(info, sf.stream(c))
        offsets = [si.group_offset(c, g) for g in range(ngroups)]
        cursors[c] = ChunkCursor(raw, n, footer.column(c)[1], offsets)

    count = 0
    total = None
    best = None
    rows_scanned = 0
    agg_cursor = cursors.get(agg.column) if agg.column is not None else None
    for g in surviving:
        a, b = group_bounds(g, n)
        rows_scanned += b - a
        mask = None
        for atom in predicate.atoms:
            cur = cursors[atom.column]
            m = atom_mask(
                atom.op, cur.group_values(g, a, b), cur.group_valid(a, b), atom.value
            )
            mask = m if mask is None else mask & m
        if agg.kind == "count":
            count += int(mask.sum()) if mask is not None else b - a
            continue
        values = agg_cursor.group_values(g, a, b)
        valid = agg_cursor.group_valid(a, b)
        sel = valid if mask is None else (mask & valid)
        if isinstance(values, list):
            chosen = [v for v, m in zip(values, sel) if m]
        else:
            chosen = values[sel]
        if len(chosen) == 0:
            continue
        if agg.kind == "sum":
            s = chosen.sum()
            s = int(s) if footer.column(agg.column)[1] == ColumnType.INT64 else float(s)
            total = s if total is None else total + s
        else:
            lo = min(chosen) if isinstance(chosen, list) else chosen.min()
            hi = max(chosen) if isinstance(chosen, list) else chosen.max()
            lo, hi = _to_python(lo), _to_python(hi)
            if best is None:
                best = (lo, hi)
            else:
                best = (min(best[0], lo), max(best[1], hi))

    if agg.kind == "count":
        value = count
    elif agg.kind == "sum":
        value = total
    elif agg.kind == "min":
        value = best[0] if best else None
    else:
        value = best[1] if best else None
    return ScanResult(agg.kind, agg.column, value, rows_scanned, skipped, 0)


def _to_python(v):
    if hasattr(v, "item"):
        return v.item()
    return v


def combine_results(a: ScanResult, b: ScanResult) -> ScanResult:
    if (a.agg_kind, a.agg_column) != (b.agg_kind, b.agg_column):
        raise ValueError("cannot combine results of different aggregates")
    if a.agg_kind == "count":
        value = a.value + b.value
    elif a.agg_kind == "sum":
        if a.value is None:
            value = b.value
        elif b.value is None:
            value = a.value
        else:
            value = a.value + b.value
    else:
        choices = [v for v in (a.value, b.value) if v is not None]
        if not choices:
            value = None
        else:
            value = min(choices) if a.agg_kind == "min" else max(choices)
    return ScanResult(
        a.agg_kind,
        a.agg_column,
        value,
        a.rows_scanned + b.rows_scanned,
        a.row_groups_skipped + b.row_groups_skipped,
        a.stripes_skipped + b.stripes_skipped,
    )


def run_query(paths, predicate: Predicate, agg: AggSpec,
              mode: CacheMode | str = CacheMode.NONE,
              cache: MetadataCache | None = None,
              workers: int = 1) -> tuple[ScanResult, CacheStats]:
    """Fold an aggregate over every stripe of every file.

    Returns the result plus the cost-counter delta of the whole pass.
    The fold order is fixed (file order, then stripe order), so results
    are deterministic for any worker count.
    """
    paths = [os.fspath(p) for p in paths]
    if not paths:
        raise ValueError("dataset must name at least one file")
    mode = CacheMode.parse(mode)
    local = _LocalCounters() if cache is None else None
    handles: list[ColFileHandle] = []
    try:
        for p in paths:
            try:
                handles.append(open_file(p, cache, mode, counters=local))
            except (ColCacheError, OSError) as exc:
                raise ScanError(f"{p}: {exc}") from exc
        counters = handles[0].counters
        for h in handles:
            predicate.validate(h._column_types)
            agg.validate(h._column_types)
        splits = [Split(h, s) for h in handles for s in range(h.num_stripes)]

        def scan_one(split: Split) -> ScanResult:
            try:
                return scan_split(split, predicate, agg)
            except ColCacheError as exc:
                raise ScanError(f"{split.handle.path}: {exc}") from exc

        before = counters.stats_snapshot()
        if workers <= 1:
            results = [scan_one(s) for s in splits]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(scan_one, splits))
        after = counters.stats_snapshot()

        result = results[0]
        for r in results[1:]:
            result = combine_results(result, r)
        return result, after.delta(before)
    finally:
        for h in handles:
            h.close()

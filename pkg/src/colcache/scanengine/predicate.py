"""Conjunctive filter predicates and min/max pushdown.

Pushdown is sound but deliberately incomplete: ``MUST_SKIP`` is
returned only when the statistics prove no row in the range can
satisfy the predicate. Null comparisons are false, so an all-null
range is skippable under any atom; ``!=`` never skips on min/max
alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..colfile.types import ColumnStats, ColumnType
from ..errors import SchemaError

OPS = ("<", "<=", "==", ">=", ">", "!=")


@dataclass(frozen=True)
class Atom:
    column: int
    op: str
    value: int | float | bytes

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown operator {self.op!r}")
        if isinstance(self.value, str):
            object.__setattr__(self, "value", self.value.encode("utf-8"))


@dataclass(frozen=True)
class Predicate:
    """Conjunction of atoms; no atoms means always-true."""

    atoms: tuple[Atom, ...] = ()

    @classmethod
    def always_true(cls) -> "Predicate":
        return cls(())

    @classmethod
    def of(cls, *atoms) -> "Predicate":
        """Build from Atom instances or (column, op, value) triples."""
        return cls(tuple(a if isinstance(a, Atom) else Atom(*a) for a in atoms))

    def columns(self) -> set[int]:
        return {a.column for a in self.atoms}

    def validate(self, column_types) -> None:
        """Check ordinals and literal types against a schema."""
        n = len(column_types)
        for a in self.atoms:
            if not 0 <= a.column < n:
                raise SchemaError(f"predicate column {a.column} out of range")
            ctype = column_types[a.column]
            v = a.value
            if ctype == ColumnType.INT64:
                ok = isinstance(v, int) and not isinstance(v, bool)
            elif ctype == ColumnType.FLOAT64:
                ok = isinstance(v, float)
            else:
                ok = isinstance(v, bytes)
            if not ok:
                raise SchemaError(
                    f"literal {v!r} does not match column type {ctype.name}"
                )


class PushdownResult(Enum):
    MUST_SKIP = "must_skip"
    MAY_MATCH = "may_match"


def atom_pushdown(atom: Atom, stats: ColumnStats, rows: int) -> PushdownResult:
    """Decide one atom against one range's statistics."""
    if stats.null_count == rows:
        return PushdownResult.MUST_SKIP
    if not stats.has_minmax or atom.op == "!=":
        return PushdownResult.MAY_MATCH
    v = atom.value
    mn, mx = stats.min, stats.max
    op = atom.op
    if (
        (op == "<" and mn >= v)
        or (op == "<=" and mn > v)
        or (op == "==" and (v < mn or v > mx))
        or (op == ">=" and mx < v)
        or (op == ">" and mx <= v)
    ):
        return PushdownResult.MUST_SKIP
    return PushdownResult.MAY_MATCH


def eval_pushdown(pred: Predicate, stats_by_column, rows: int) -> PushdownResult:
    """Decide a conjunction; one skippable atom skips the range.

    ``stats_by_column`` maps column ordinal to that range's
    ``ColumnStats`` (a mapping or an indexable sequence).
    """
    for atom in pred.atoms:
        stats = stats_by_column[atom.column]
        if atom_pushdown(atom, stats, rows) is PushdownResult.MUST_SKIP:
            return PushdownResult.MUST_SKIP
    return PushdownResult.MAY_MATCH

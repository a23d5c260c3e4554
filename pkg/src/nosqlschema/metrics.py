"""Schema-evolution measurements over a sequence of schema snapshots."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .differ import CHANGED_KINDS, ChangeKind, SchemaChange, SchemaSnapshot
from .entities import DenormVerdict

# top-level categories of the change distribution, in report order
CATEGORIES = ("entity_add", "entity_remove", "attribute_add", "attribute_remove", "attribute_change")
CATEGORY_OF = {
    ChangeKind.ENTITY_ADDED: "entity_add",
    ChangeKind.ENTITY_REMOVED: "entity_remove",
    ChangeKind.ATTRIBUTE_ADDED: "attribute_add",
    ChangeKind.ATTRIBUTE_REMOVED: "attribute_remove",
    ChangeKind.ATTRIBUTE_TYPE_CHANGED: "attribute_change",
    ChangeKind.ATTRIBUTE_INITIALIZATION_CHANGED: "attribute_change",
    ChangeKind.ATTRIBUTE_ANNOTATION_CHANGED: "attribute_change",
}


class DegenerateSeries(ValueError):
    """Correlation is undefined for the given series."""


@dataclass(frozen=True)
class TrendPoint:
    commit_index: int
    commit_hash: str
    pct_progress: float
    n_entities: int
    schema_loc: int
    n_entities_norm_pct: float
    schema_loc_norm_pct: float


@dataclass(frozen=True)
class ChangeDistribution:
    kind_counts: Mapping[str, int]
    category_counts: Mapping[str, int]

    @property
    def total(self) -> int:
        return sum(self.category_counts.values())

    @property
    def shares(self) -> dict[str, float]:
        total = self.total
        return {c: (100.0 * self.category_counts[c] / total if total else 0.0) for c in CATEGORIES}

    def __add__(self, other: "ChangeDistribution") -> "ChangeDistribution":
        kinds = Counter(self.kind_counts) + Counter(other.kind_counts)
        cats = Counter(self.category_counts) + Counter(other.category_counts)
        return ChangeDistribution(
            {k.value: kinds.get(k.value, 0) for k in ChangeKind},
            {c: cats.get(c, 0) for c in CATEGORIES},
        )


@dataclass(frozen=True)
class ChurnStats:
    total_commits: int
    schema_relevant_commits: int

    @property
    def churn_rate_pct(self) -> float:
        if not self.total_commits:
            return 0.0
        return 100.0 * self.schema_relevant_commits / self.total_commits


@dataclass(frozen=True)
class EntityChurn:
    qualified_name: str
    change_count: int
    schema_loc: int
    verdict: DenormVerdict = field(default_factory=DenormVerdict)
    relative_frequency: float = 0.0  # change_count / max change_count of the project


def _norm(value: float, peak: float) -> float:
    return 100.0 * value / peak if peak > 0 else 0.0


def trend_series(snapshots: Sequence[SchemaSnapshot]) -> list[TrendPoint]:
    n = len(snapshots)
    counts = [len(s.entities) for s in snapshots]
    locs = [s.schema_loc for s in snapshots]
    max_count = max(counts, default=0)
    max_loc = max(locs, default=0)
    return [
        TrendPoint(
            commit_index=s.index,
            commit_hash=s.commit.hash,
            pct_progress=100.0 * (i + 1) / n,
            n_entities=count,
            schema_loc=loc,
            n_entities_norm_pct=_norm(count, max_count),
            schema_loc_norm_pct=_norm(loc, max_loc),
        )
        for i, (s, count, loc) in enumerate(zip(snapshots, counts, locs))
    ]


def change_distribution(changes: Iterable[SchemaChange]) -> ChangeDistribution:
    kinds = Counter(c.kind for c in changes)
    cats = Counter()
    for kind, count in kinds.items():
        cats[CATEGORY_OF[kind]] += count
    return ChangeDistribution(
        {k.value: kinds.get(k, 0) for k in ChangeKind},
        {c: cats.get(c, 0) for c in CATEGORIES},
    )


def churn_rate(changes_by_commit: Mapping[int, Sequence[SchemaChange]], total_commits: int) -> ChurnStats:
    """A commit is schema-relevant iff its diff is non-empty."""
    if total_commits < 0:
        raise ValueError("total_commits must be nonnegative")
    relevant = sum(1 for changes in changes_by_commit.values() if changes)
    return ChurnStats(total_commits, relevant)


def attribute_change_drilldown(changes: Iterable[SchemaChange]) -> dict[str, int]:
    counts = Counter(c.kind for c in changes if c.kind in CHANGED_KINDS)
    return {
        "type": counts[ChangeKind.ATTRIBUTE_TYPE_CHANGED],
        "initialization": counts[ChangeKind.ATTRIBUTE_INITIALIZATION_CHANGED],
        "annotations": counts[ChangeKind.ATTRIBUTE_ANNOTATION_CHANGED],
    }


def entity_churn(changes: Iterable[SchemaChange], snapshots: Sequence[SchemaSnapshot]) -> list[EntityChurn]:
    """One record per entity ever observed, sized and classified as of its
    last appearance."""
    counts = Counter(c.entity for c in changes)
    last = {}
    for snap in snapshots:
        for name, entity in snap.entities.items():
            last[name] = entity
    peak = max(counts.values(), default=0)
    return [
        EntityChurn(
            name,
            counts.get(name, 0),
            last[name].schema_loc if name in last else 0,
            last[name].verdict if name in last else DenormVerdict(),
            counts.get(name, 0) / peak if peak else 0.0,
        )
        for name in sorted(last.keys() | counts.keys())
    ]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise ValueError("series differ in length")
    n = len(xs)
    if n < 2:
        raise DegenerateSeries("need at least two samples")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise DegenerateSeries("zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))

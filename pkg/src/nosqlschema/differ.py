"""Per-commit schema snapshots and the diff between consecutive ones."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Union

from .entities import ClassIndex, EntityClass, MapperDialect, detected_mappers, extract_entities
from .history import CommitRef, Snapshot
from .javaparse import ParseFailure, SourceFile, parse_source


class ChangeKind(str, Enum):
    ENTITY_ADDED = "entityAdded"
    ENTITY_REMOVED = "entityRemoved"
    ATTRIBUTE_ADDED = "attributeAdded"
    ATTRIBUTE_REMOVED = "attributeRemoved"
    ATTRIBUTE_TYPE_CHANGED = "attributeTypeChanged"
    ATTRIBUTE_INITIALIZATION_CHANGED = "attributeInitializationChanged"
    ATTRIBUTE_ANNOTATION_CHANGED = "attributeAnnotationChanged"

    @property
    def attribute_level(self) -> bool:
        return self not in (ChangeKind.ENTITY_ADDED, ChangeKind.ENTITY_REMOVED)


KIND_ORDER = {kind: i for i, kind in enumerate(ChangeKind)}
CHANGED_KINDS = (
    ChangeKind.ATTRIBUTE_TYPE_CHANGED,
    ChangeKind.ATTRIBUTE_INITIALIZATION_CHANGED,
    ChangeKind.ATTRIBUTE_ANNOTATION_CHANGED,
)

EMPTY_COMMIT = CommitRef("", "", "")


@dataclass(frozen=True)
class SchemaChange:
    commit_hash: str
    commit_index: int
    kind: ChangeKind
    entity: str
    attribute: Optional[str] = None
    detail_before: Optional[str] = None
    detail_after: Optional[str] = None
    committer_date: str = ""

    def sort_key(self):
        return (
            self.commit_index,
            self.entity,
            self.attribute or "",
            KIND_ORDER[self.kind],
            self.detail_before or "",
            self.detail_after or "",
        )


@dataclass(frozen=True)
class SchemaSnapshot:
    commit: CommitRef
    index: int
    entities: Mapping[str, EntityClass]
    diagnostics: tuple[str, ...] = ()
    sources: Mapping[str, SourceFile] = field(default_factory=dict, compare=False, repr=False)
    dialects: frozenset = frozenset()  # mappers in use; empty when none detected
    java_loc: int = 0
    extraction_diagnostics: tuple[str, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def empty(cls) -> "SchemaSnapshot":
        return cls(EMPTY_COMMIT, -1, {})

    @property
    def schema_loc(self) -> int:
        return sum(e.schema_loc for e in self.entities.values())


# --------------------------------------------------------------------------
# parsing with memoization

ParseResult = Union[SourceFile, ParseFailure]


def _parse_one(item: tuple[str, str]) -> ParseResult:
    path, text = item
    try:
        return parse_source(text, path)
    except ParseFailure as exc:
        return exc
    except RecursionError as exc:  # pathological nesting
        return ParseFailure(f"{path}: nesting too deep ({exc})")


class ParseCache:
    """Memoizes parse results by (path, text); unchanged files across
    commits are parsed once."""

    def __init__(self) -> None:
        self._results: dict[tuple[str, str], ParseResult] = {}

    def get(self, path: str, text: str) -> ParseResult:
        key = (path, text)
        result = self._results.get(key)
        if result is None:
            result = self._results[key] = _parse_one(key)
        return result

    def prefetch(self, items: Iterable[tuple[str, str]], jobs: int = 1) -> None:
        missing = list(dict.fromkeys(k for k in items if k not in self._results))
        if jobs <= 1 or len(missing) < 2:
            for key in missing:
                self._results[key] = _parse_one(key)
            return
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, result in zip(missing, pool.map(_parse_one, missing, chunksize=16)):
                self._results[key] = result

    def forget_except(self, keep: Iterable[tuple[str, str]]) -> None:
        keep = set(keep)
        self._results = {k: v for k, v in self._results.items() if k in keep}


def build_schema_snapshot(
    snapshot: Snapshot,
    dialect: MapperDialect = MapperDialect.AUTO,
    previous: Optional[SchemaSnapshot] = None,
    cache: Optional[ParseCache] = None,
) -> SchemaSnapshot:
    """Parse a snapshot and extract its implicit schema.

    A file that fails to parse is replaced by its parsed version from
    ``previous`` when there is one.
    """
    cache = cache or ParseCache()
    diagnostics: list[str] = []
    sources: dict[str, SourceFile] = {}
    prev_sources = previous.sources if previous is not None else {}
    for path, text in sorted(snapshot.files.items()):
        result = cache.get(path, text)
        if isinstance(result, ParseFailure):
            if path in prev_sources:
                sources[path] = prev_sources[path]
                diagnostics.append(f"parse failure, carried forward previous version: {result}")
            else:
                diagnostics.append(f"parse failure, file skipped: {result}")
            continue
        sources[path] = result
        diagnostics.extend(result.diagnostics)

    if (
        previous is not None
        and previous.sources.keys() == sources.keys()
        and all(previous.sources[p] is s for p, s in sources.items())
    ):
        # same parsed inputs, same schema
        return SchemaSnapshot(
            snapshot.commit,
            snapshot.index,
            previous.entities,
            tuple(diagnostics) + previous.extraction_diagnostics,
            sources,
            previous.dialects,
            previous.java_loc,
            previous.extraction_diagnostics,
        )
    index = ClassIndex.build(sources.values())
    entities, extract_diags = extract_entities(index, dialect)
    extraction_diagnostics = tuple(index.diagnostics) + tuple(extract_diags)
    return SchemaSnapshot(
        commit=snapshot.commit,
        index=snapshot.index,
        entities=entities,
        diagnostics=tuple(diagnostics) + extraction_diagnostics,
        sources=sources,
        dialects=(
            detected_mappers(index.imports()) if dialect is MapperDialect.AUTO else frozenset({dialect})
        ),
        java_loc=sum(s.code_line_total for s in sources.values()),
        extraction_diagnostics=extraction_diagnostics,
    )


# --------------------------------------------------------------------------
# diffing


def _annotation_groups(attr) -> dict[str, tuple[str, ...]]:
    groups: dict[str, list[str]] = {}
    for ann in attr.annotations:
        groups.setdefault(ann.simple_name, []).append(ann.render())
    return {name: tuple(sorted(renders)) for name, renders in groups.items()}


def diff_snapshots(prev: SchemaSnapshot, next: SchemaSnapshot) -> list[SchemaChange]:
    """Schema changes that turn ``prev`` into ``next``.

    Attributes of entities added or removed in this step produce no events
    of their own.
    """
    changes: list[SchemaChange] = []

    def emit(kind, entity, attribute=None, before=None, after=None):
        changes.append(
            SchemaChange(
                next.commit.hash, next.index, kind, entity, attribute, before, after,
                next.commit.committer_date,
            )
        )

    old, new = prev.entities, next.entities
    for name in old.keys() - new.keys():
        emit(ChangeKind.ENTITY_REMOVED, name)
    for name in new.keys() - old.keys():
        emit(ChangeKind.ENTITY_ADDED, name)
    for name in old.keys() & new.keys():
        if old[name] is new[name]:
            continue
        before = {a.name: a for a in old[name].attributes}
        after = {a.name: a for a in new[name].attributes}
        for attr in before.keys() - after.keys():
            emit(ChangeKind.ATTRIBUTE_REMOVED, name, attr)
        for attr in after.keys() - before.keys():
            emit(ChangeKind.ATTRIBUTE_ADDED, name, attr)
        for attr in before.keys() & after.keys():
            a, b = before[attr], after[attr]
            if a.canonical_type != b.canonical_type:
                emit(ChangeKind.ATTRIBUTE_TYPE_CHANGED, name, attr, a.canonical_type, b.canonical_type)
            if a.initializer_text != b.initializer_text:
                emit(
                    ChangeKind.ATTRIBUTE_INITIALIZATION_CHANGED, name, attr,
                    a.initializer_text, b.initializer_text,
                )
            if a.annotations != b.annotations:
                ga, gb = _annotation_groups(a), _annotation_groups(b)
                for ann in ga.keys() | gb.keys():
                    if ga.get(ann) != gb.get(ann):
                        emit(
                            ChangeKind.ATTRIBUTE_ANNOTATION_CHANGED, name, attr,
                            " ".join(ga[ann]) if ann in ga else None,
                            " ".join(gb[ann]) if ann in gb else None,
                        )
    changes.sort(key=SchemaChange.sort_key)
    return changes

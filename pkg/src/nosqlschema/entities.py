"""Mapper semantics over the classes of one snapshot.

Entity-classes are found via ``@Entity`` (own or inherited) or, when the
snapshot imports Objectify or Morphia, via an ``@Id`` field. Attributes are
resolved across the in-snapshot superclass chain, transient ones dropped,
and each entity is classified as normalized or denormalized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

from .javaparse import AnnotationUse, ClassDecl, ClassKind, SourceFile


class MapperDialect(str, Enum):
    OBJECTIFY = "objectify"
    MORPHIA = "morphia"
    AUTO = "auto"


class DetectionBasis(str, Enum):
    ENTITY_ANNOTATION = "entityAnnotation"
    INHERITED_ENTITY_ANNOTATION = "inheritedEntityAnnotation"
    ID_FALLBACK = "idFallback"


class DenormReason(str, Enum):
    CONTAINER_TYPE = "containerType"
    NESTED_ENTITY_TYPE = "nestedEntityType"
    UNKNOWN_TYPE = "unknownType"


PRIMITIVE_TYPES = frozenset(
    "boolean byte short int long float double char "
    "Boolean Byte Short Integer Long Float Double Character String".split()
)
CONTAINER_HEADS = frozenset(
    "List Set Map Collection Queue Deque ArrayList HashSet HashMap "
    "LinkedList TreeMap TreeSet Iterable".split()
)
EXCLUSION_MARKERS = {
    MapperDialect.OBJECTIFY: "Ignore",
    MapperDialect.MORPHIA: "Transient",
}
EXCLUDING_MODIFIERS = frozenset({"static", "transient"})


@dataclass(frozen=True)
class SchemaAttribute:
    name: str
    canonical_type: str
    annotations: tuple[AnnotationUse, ...] = ()
    initializer_text: Optional[str] = None
    inherited_from: Optional[str] = None  # None: declared by the entity itself

    @property
    def origin(self) -> str:
        return "declared" if self.inherited_from is None else f"inherited({self.inherited_from})"


@dataclass(frozen=True)
class DenormVerdict:
    reasons: frozenset = frozenset()

    @property
    def classification(self) -> str:
        return "denormalized" if self.reasons else "normalized"

    @property
    def denormalized(self) -> bool:
        return bool(self.reasons)


@dataclass(frozen=True)
class EntityClass:
    qualified_name: str
    source_path: str
    detection_basis: DetectionBasis
    super_chain: tuple[str, ...] = ()
    attributes: tuple[SchemaAttribute, ...] = ()
    verdict: DenormVerdict = DenormVerdict()
    schema_loc: int = 0


# --------------------------------------------------------------------------
# snapshot-wide class index


_ANNOTATION_RE = re.compile(r"@[\w$.]+(?:\([^)]*\))?\s*")


def erase_type(type_text: str) -> str:
    """Strip type annotations, generic arguments and array suffixes."""
    text = _ANNOTATION_RE.sub("", type_text)
    return text.split("<", 1)[0].replace("[]", "").strip()


@dataclass
class ClassIndex:
    """All class declarations of one snapshot, keyed by qualified name."""

    classes: dict[str, ClassDecl] = field(default_factory=dict)
    files: dict[str, SourceFile] = field(default_factory=dict)
    owner: dict[str, str] = field(default_factory=dict)  # qualified name -> path
    diagnostics: list[str] = field(default_factory=list)
    _by_simple: dict[str, list[str]] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, sources: Iterable[SourceFile]) -> "ClassIndex":
        index = cls()
        for source in sorted(sources, key=lambda s: s.path):
            index.files[source.path] = source
            for decl in source.all_classes():
                name = decl.qualified_name
                if name in index.classes:
                    index.diagnostics.append(
                        f"duplicate class {name} in {index.owner[name]} and "
                        f"{source.path}; keeping {index.owner[name]}"
                    )
                    continue
                index.classes[name] = decl
                index.owner[name] = source.path
        for name, decl in index.classes.items():
            index._by_simple.setdefault(decl.simple_name, []).append(name)
        return index

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def __getitem__(self, name: str) -> ClassDecl:
        return self.classes[name]

    def imports(self) -> Iterable[str]:
        for source in self.files.values():
            yield from source.imports

    def resolve(self, type_text: str, context: str) -> Optional[str]:
        """Qualified name of the snapshot class that ``type_text`` denotes
        when written inside class ``context``, or None."""
        name = erase_type(type_text)
        if not name:
            return None
        if "." in name:
            if name in self.classes:
                return name
            head, rest = name.split(".", 1)
            base = self._resolve_simple(head, context)
            if base is not None and f"{base}.{rest}" in self.classes:
                return f"{base}.{rest}"
            return None
        return self._resolve_simple(name, context)

    def _resolve_simple(self, name: str, context: str) -> Optional[str]:
        # member classes of the enclosing scopes
        scope = context
        while scope:
            if scope in self.classes and f"{scope}.{name}" in self.classes:
                return f"{scope}.{name}"
            scope = scope.rpartition(".")[0]
        source = self.files.get(self.owner.get(context, ""))
        package = source.package_name if source else ""
        same_package = f"{package}.{name}" if package else name
        if same_package in self.classes:
            return same_package
        if source is not None:
            for imp in source.imports:
                if imp.rsplit(".", 1)[-1] == name:
                    # explicit import wins even when it points outside the snapshot
                    return imp if imp in self.classes else None
            for imp in source.imports:
                if imp.endswith(".*") and f"{imp[:-2]}.{name}" in self.classes:
                    return f"{imp[:-2]}.{name}"
        candidates = self._by_simple.get(name, [])
        if len(candidates) == 1:
            return candidates[0]
        return None

    def is_ambiguous(self, type_text: str) -> bool:
        return len(self._by_simple.get(erase_type(type_text).rsplit(".", 1)[-1], [])) > 1


def detected_mappers(imports: Iterable[str]) -> frozenset:
    """Mapper libraries named by any of the import statements."""
    found = set()
    for imp in imports:
        low = imp.lower()
        if "objectify" in low:
            found.add(MapperDialect.OBJECTIFY)
        if "morphia" in low:
            found.add(MapperDialect.MORPHIA)
    return frozenset(found)


def mapper_vocabularies(dialect: MapperDialect, imports: Iterable[str]) -> frozenset:
    """Concrete mapper dialects whose annotations are honored; ``auto``
    with no mapper imports honors both."""
    if dialect is not MapperDialect.AUTO:
        return frozenset({dialect})
    return detected_mappers(imports) or frozenset({MapperDialect.OBJECTIFY, MapperDialect.MORPHIA})


def imports_mapper(imports: Iterable[str]) -> bool:
    return any("objectify" in imp.lower() or "morphia" in imp.lower() for imp in imports)


def _has_annotation(annotations: Iterable[AnnotationUse], simple: str) -> bool:
    return any(a.simple_name == simple for a in annotations)


def super_chain(qualified_name: str, index: ClassIndex) -> tuple[tuple[str, ...], list[str]]:
    """Superclasses of a class resolvable within the snapshot, nearest
    first, with diagnostics for unresolved, ambiguous or cyclic links."""
    chain: list[str] = []
    diags: list[str] = []
    seen = {qualified_name}
    current = qualified_name
    while True:
        decl = index.classes[current]
        if decl.superclass_name is None:
            break
        parent = index.resolve(decl.superclass_name, current)
        if parent is None:
            what = "ambiguous" if index.is_ambiguous(decl.superclass_name) else "unresolved"
            diags.append(f"{what} superclass {decl.superclass_name} of {current}")
            break
        if parent in seen:
            diags.append(f"inheritance cycle through {parent}; chain of {qualified_name} cut")
            break
        seen.add(parent)
        chain.append(parent)
        current = parent
    return tuple(chain), diags


# --------------------------------------------------------------------------
# operations


def detect_entity_classes(
    index: ClassIndex, dialect: MapperDialect = MapperDialect.AUTO
) -> tuple[list[EntityClass], list[str]]:
    """Select the entity-classes of a snapshot.

    Returns the entities (attributes, verdict and Schema-LoC not yet filled)
    sorted by qualified name, and diagnostics.
    """
    id_fallback = imports_mapper(index.imports())
    entities: list[EntityClass] = []
    diags: list[str] = []
    for name in sorted(index.classes):
        decl = index.classes[name]
        if decl.kind in (ClassKind.INTERFACE, ClassKind.ENUM):
            continue
        chain, chain_diags = super_chain(name, index)
        if _has_annotation(decl.annotations, "Entity"):
            basis = DetectionBasis.ENTITY_ANNOTATION
        elif any(_has_annotation(index[s].annotations, "Entity") for s in chain):
            basis = DetectionBasis.INHERITED_ENTITY_ANNOTATION
        elif id_fallback and any(
            _has_annotation(f.annotations, "Id")
            for c in (name, *chain)
            for f in index[c].fields
        ):
            basis = DetectionBasis.ID_FALLBACK
        else:
            continue
        diags.extend(chain_diags)
        entities.append(EntityClass(name, index.owner[name], basis, chain))
    return entities, diags


def resolve_schema_attributes(
    entity: EntityClass, index: ClassIndex, dialect: MapperDialect = MapperDialect.AUTO
) -> list[SchemaAttribute]:
    vocab = mapper_vocabularies(dialect, index.imports())
    markers = {EXCLUSION_MARKERS[v] for v in vocab}
    seen: set[str] = set()
    result: list[SchemaAttribute] = []
    for owner in (entity.qualified_name, *entity.super_chain):
        for fdecl in index[owner].fields:
            if fdecl.name in seen:
                continue  # shadowed by a more derived declaration
            seen.add(fdecl.name)
            if fdecl.modifiers & EXCLUDING_MODIFIERS:
                continue
            if any(a.simple_name in markers for a in fdecl.annotations):
                continue
            result.append(
                SchemaAttribute(
                    name=fdecl.name,
                    canonical_type=fdecl.type_text,
                    annotations=fdecl.annotations,
                    initializer_text=fdecl.initializer_text,
                    inherited_from=None if owner == entity.qualified_name else owner,
                )
            )
    return result


def attribute_reason(
    attr: SchemaAttribute, context: str, index: ClassIndex, entity_names: set[str]
) -> Optional[DenormReason]:
    """Why an attribute type is non-atomic, or None when it is atomic."""
    type_text = _ANNOTATION_RE.sub("", attr.canonical_type).strip()
    if type_text.endswith("]"):
        return DenormReason.CONTAINER_TYPE
    head = erase_type(type_text)
    simple = head.rsplit(".", 1)[-1]
    if simple in CONTAINER_HEADS:
        return DenormReason.CONTAINER_TYPE
    if head in PRIMITIVE_TYPES or (head.startswith("java.lang.") and simple in PRIMITIVE_TYPES):
        return None
    target = index.resolve(head, context)
    if target is not None and (target in entity_names or index[target].fields):
        return DenormReason.NESTED_ENTITY_TYPE
    return DenormReason.UNKNOWN_TYPE


def classify_denormalization(
    entity: EntityClass, index: ClassIndex, entity_names: set[str]
) -> DenormVerdict:
    reasons = set()
    for attr in entity.attributes:
        context = attr.inherited_from or entity.qualified_name
        reason = attribute_reason(attr, context, index, entity_names)
        if reason is not None:
            reasons.add(reason)
    return DenormVerdict(frozenset(reasons))


def compute_schema_loc(entity: EntityClass, index: ClassIndex) -> int:
    """Code lines of the entity's declaration plus its in-snapshot superclasses."""
    return sum(index[name].code_line_count for name in (entity.qualified_name, *entity.super_chain))


def extract_entities(
    index: ClassIndex, dialect: MapperDialect = MapperDialect.AUTO
) -> tuple[dict[str, EntityClass], list[str]]:
    """Run detection, attribute resolution, classification and Schema-LoC."""
    found, diags = detect_entity_classes(index, dialect)
    names = {e.qualified_name for e in found}
    entities: dict[str, EntityClass] = {}
    for entity in found:
        entity = replace(entity, attributes=tuple(resolve_schema_attributes(entity, index, dialect)))
        entity = replace(
            entity,
            verdict=classify_denormalization(entity, index, names),
            schema_loc=compute_schema_loc(entity, index),
        )
        entities[entity.qualified_name] = entity
    return entities, diags

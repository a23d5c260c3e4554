"""Small builders shared by the unit tests."""

from types import MappingProxyType

from nosqlschema import ClassIndex, CommitRef, Snapshot, build_schema_snapshot, parse_source


def index_of(files: dict) -> ClassIndex:
    return ClassIndex.build(parse_source(text, path) for path, text in files.items())


def snapshot(files: dict, i: int = 0) -> Snapshot:
    commit = CommitRef(f"c{i:03d}", f"2020-01-01T00:00:{i % 60:02d}+00:00", f"2020-01-01T00:00:{i % 60:02d}+00:00")
    return Snapshot(commit, i, MappingProxyType(dict(sorted(files.items()))))


def schema(files: dict, i: int = 0, previous=None, **kw):
    return build_schema_snapshot(snapshot(files, i), previous=previous, **kw)

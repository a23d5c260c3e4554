"""Linearized commit histories from a git repository or a snapshot directory.

A snapshot directory holds one subdirectory per version, named
``<NNN>_<label>`` and walked in ascending ``NNN``; an optional
``meta.json`` per version may supply ``hash``, ``author_date``,
``committer_date`` and ``parents``.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import subprocess
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping, Optional

from .javaparse import decode_source

GIT_ENV_VAR = "NOSQLSCHEMA_GIT"
LOG_FORMAT = "%H;%aI;%cI;%P"

_SNAPSHOT_DIR_RE = re.compile(r"^(\d+)_(.*)$")
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class RepoAccessError(Exception):
    """The repository or snapshot directory is missing or unreadable."""


class ToolInvocationError(Exception):
    """The version-control executable is unavailable or failed."""


@dataclass(frozen=True)
class CommitRef:
    hash: str
    author_date: str
    committer_date: str
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class Snapshot:
    commit: CommitRef
    index: int
    files: Mapping[str, str] = field(default_factory=lambda: MappingProxyType({}))


@dataclass(frozen=True)
class HistorySource:
    kind: str  # "vcsRepo" | "snapshotDir"
    path: Path
    before_date: Optional[str] = None

    @classmethod
    def repo(cls, path, before_date: Optional[str] = None) -> "HistorySource":
        return cls("vcsRepo", Path(path), before_date)

    @classmethod
    def snapshots(cls, path, before_date: Optional[str] = None) -> "HistorySource":
        return cls("snapshotDir", Path(path), before_date)


def git_executable() -> str:
    exe = os.environ.get(GIT_ENV_VAR) or shutil.which("git")
    if not exe:
        raise ToolInvocationError(f"git not found (set {GIT_ENV_VAR} to override)")
    return exe


def _git(repo: Path, *args: str, stdin: Optional[bytes] = None) -> bytes:
    cmd = [git_executable(), "-C", str(repo), *args]
    try:
        proc = subprocess.run(cmd, input=stdin, capture_output=True, check=False)
    except OSError as exc:
        raise ToolInvocationError(f"cannot run {cmd[0]}: {exc}") from exc
    if proc.returncode != 0:
        raise ToolInvocationError(
            f"{' '.join(cmd[3:5])} exited with {proc.returncode}: "
            f"{proc.stderr.decode(errors='replace').strip()}"
        )
    return proc.stdout


def parse_log_line(line: str) -> CommitRef:
    commit_hash, author_date, committer_date, parents = line.split(";", 3)
    return CommitRef(commit_hash, author_date, committer_date, tuple(parents.split()))


def _iso(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)


class HistoryWalker:
    """Walks a HistorySource, caching decoded blobs between snapshots."""

    def __init__(self, source: HistorySource):
        self.source = source
        self._blobs: dict[str, str] = {}
        self._dirs: dict[str, Path] = {}
        if not source.path.exists():
            raise RepoAccessError(f"{source.path} does not exist")
        if source.kind == "vcsRepo":
            try:
                _git(source.path, "rev-parse", "--git-dir")
            except ToolInvocationError as exc:
                if "not a git repository" in str(exc):
                    raise RepoAccessError(f"{source.path} is not a git repository") from exc
                raise
        elif source.kind != "snapshotDir":
            raise ValueError(f"unknown history kind {source.kind!r}")

    # -- linearization -------------------------------------------------------
    def commits(self) -> list[CommitRef]:
        if self.source.kind == "vcsRepo":
            return self._git_commits()
        return self._dir_commits()

    def _git_commits(self) -> list[CommitRef]:
        try:
            _git(self.source.path, "rev-parse", "--verify", "--quiet", "HEAD")
        except ToolInvocationError:
            return []  # no commits yet
        args = ["log"]
        if self.source.before_date:
            args.append(f"--before={self.source.before_date}")
        args += ["--cherry-pick", "--date-order", f"--pretty=format:{LOG_FORMAT}"]
        out = _git(self.source.path, *args).decode("utf-8", errors="replace")
        refs = [parse_log_line(line) for line in out.splitlines() if line.strip()]
        refs.reverse()
        return refs

    def _dir_commits(self) -> list[CommitRef]:
        root = self.source.path
        if not root.is_dir():
            raise RepoAccessError(f"{root} is not a directory")
        numbered: dict[int, Path] = {}
        for child in root.iterdir():
            if not child.is_dir() or child.name.startswith("."):
                continue
            m = _SNAPSHOT_DIR_RE.match(child.name)
            if m is None:
                raise RepoAccessError(f"snapshot directory {child.name!r} lacks an NNN_ prefix")
            number = int(m.group(1))
            if number in numbered:
                raise RepoAccessError(
                    f"snapshot number {number} used by {numbered[number].name} and {child.name}"
                )
            numbered[number] = child
        refs: list[CommitRef] = []
        cutoff = _iso(self.source.before_date) if self.source.before_date else None
        prev: tuple[str, ...] = ()
        for number in sorted(numbered):
            directory = numbered[number]
            prefix = _SNAPSHOT_DIR_RE.match(directory.name).group(1)
            stamp = (_EPOCH + timedelta(seconds=number)).isoformat()
            meta = {}
            meta_path = directory / "meta.json"
            if meta_path.is_file():
                try:
                    meta = json.loads(meta_path.read_text(encoding="utf-8"))
                except (OSError, ValueError) as exc:
                    raise RepoAccessError(f"bad {meta_path}: {exc}") from exc
            ref = CommitRef(
                hash=str(meta.get("hash", f"fix-{prefix}")),
                author_date=str(meta.get("author_date", stamp)),
                committer_date=str(meta.get("committer_date", meta.get("author_date", stamp))),
                parents=tuple(meta.get("parents", prev)),
            )
            if cutoff is not None and _iso(ref.committer_date) > cutoff:  # inclusive, like git log --before
                continue
            self._dirs[ref.hash] = directory
            refs.append(ref)
            prev = (ref.hash,)
        if len({r.hash for r in refs}) != len(refs):
            raise RepoAccessError(f"duplicate snapshot hashes under {root}")
        return refs

    # -- materialization -------------------------------------------------------
    def snapshot(self, commit: CommitRef, index: int) -> Snapshot:
        if self.source.kind == "vcsRepo":
            files = self._git_files(commit)
        else:
            files = self._dir_files(commit)
        return Snapshot(commit, index, MappingProxyType(dict(sorted(files.items()))))

    def _git_files(self, commit: CommitRef) -> dict[str, str]:
        listing = _git(self.source.path, "ls-tree", "-r", "-z", "--full-tree", commit.hash)
        wanted: dict[str, str] = {}
        for entry in listing.split(b"\0"):
            if not entry:
                continue
            meta, _, raw_path = entry.partition(b"\t")
            _mode, kind, oid = meta.decode().split()
            path = raw_path.decode("utf-8", errors="replace")
            if kind == "blob" and path.endswith(".java"):
                wanted[path] = oid
        missing = sorted({oid for oid in wanted.values() if oid not in self._blobs})
        if missing:
            self._blobs.update(self._cat_blobs(missing))
        files = {path: self._blobs[oid] for path, oid in wanted.items()}
        live = set(wanted.values())
        self._blobs = {oid: text for oid, text in self._blobs.items() if oid in live}
        return files

    def _cat_blobs(self, oids: list[str]) -> dict[str, str]:
        out = _git(self.source.path, "cat-file", "--batch", stdin="\n".join(oids).encode() + b"\n")
        blobs: dict[str, str] = {}
        pos = 0
        for oid in oids:
            header_end = out.index(b"\n", pos)
            header = out[pos:header_end].decode()
            if header.endswith("missing"):
                raise RepoAccessError(f"blob {oid} missing from {self.source.path}")
            size = int(header.split()[2])
            start = header_end + 1
            blobs[oid] = decode_source(out[start : start + size])
            pos = start + size + 1
        return blobs

    def _dir_files(self, commit: CommitRef) -> dict[str, str]:
        if commit.hash not in self._dirs:
            self._dir_commits()
        directory = self._dirs.get(commit.hash)
        if directory is None:
            raise RepoAccessError(f"no snapshot directory for {commit.hash}")
        files = {}
        for path in directory.rglob("*.java"):
            if path.is_file():
                try:
                    files[path.relative_to(directory).as_posix()] = decode_source(path.read_bytes())
                except OSError as exc:
                    raise RepoAccessError(str(exc)) from exc
        return files

    def walk(self) -> Iterator[Snapshot]:
        for i, commit in enumerate(self.commits()):
            yield self.snapshot(commit, i)


def linearize_history(source: HistorySource) -> list[CommitRef]:
    """Commits of ``source``, oldest first."""
    return HistoryWalker(source).commits()


def materialize_snapshot(source: HistorySource, commit: CommitRef, index: int) -> Snapshot:
    return HistoryWalker(source).snapshot(commit, index)

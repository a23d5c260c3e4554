"""Command-line entry point: ``nosqlschema analyze``.

Drives history walking, schema extraction, diffing, metrics and report
emission for one repository or snapshot directory.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence

from .differ import ParseCache, SchemaChange, SchemaSnapshot, build_schema_snapshot, diff_snapshots
from .entities import MapperDialect
from .history import HistorySource, HistoryWalker, RepoAccessError, ToolInvocationError
from .javaparse import ParseFailure
from .report import AnalysisResult, ReportBundle, ReportIoError, emit_report_bundle

log = logging.getLogger("nosqlschema")

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2
TINKER_WARNING = (
    "history has only {n} commits (< {m}); projects this small were treated as "
    "tinker projects when selecting study subjects"
)


class ConfigError(Exception):
    pass


class AnalysisError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    source: HistorySource
    output_dir: Path
    dialect: MapperDialect = MapperDialect.AUTO
    min_commits_warn: int = 20
    parallelism: int = 1
    deterministic_manifest: bool = False
    project: str = ""

    def validate(self) -> None:
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1")
        if self.source.before_date:
            try:
                datetime.fromisoformat(self.source.before_date.replace("Z", "+00:00"))
            except ValueError as exc:
                raise ConfigError(f"--before is not ISO-8601: {self.source.before_date}") from exc
        src = self.source.path.resolve()
        out = self.output_dir.resolve()
        if out == src or src in out.parents:
            raise ConfigError(f"output directory {self.output_dir} lies inside the analyzed source")


def analyze_history(config: RunConfig, chunk_size: int = 64) -> AnalysisResult:
    """Walk, extract and diff a whole history. Parsing runs on
    ``config.parallelism`` processes; everything else is sequential so the
    result does not depend on the worker count."""
    walker = HistoryWalker(config.source)
    commits = walker.commits()
    total = len(commits)
    result = AnalysisResult(
        snapshots=[], changes=[], project=config.project, dialect=config.dialect.value
    )
    if total < config.min_commits_warn:
        message = TINKER_WARNING.format(n=total, m=config.min_commits_warn)
        log.warning(message)
        result.run_diagnostics.append(message)

    cache = ParseCache()
    prev = SchemaSnapshot.empty()
    files_seen = files_failed = 0
    snapshots: list[SchemaSnapshot] = []
    changes: list[SchemaChange] = []
    for start in range(0, total, chunk_size):
        batch = [walker.snapshot(commit, i) for i, commit in enumerate(commits[start : start + chunk_size], start)]
        if config.parallelism > 1:
            cache.prefetch(((p, t) for snap in batch for p, t in snap.files.items()), config.parallelism)
        for snap in batch:
            for path, text in snap.files.items():
                files_seen += 1
                files_failed += isinstance(cache.get(path, text), ParseFailure)
            schema = build_schema_snapshot(snap, config.dialect, prev, cache)
            step = diff_snapshots(prev, schema)
            changes.extend(step)
            snapshots.append(replace(schema, sources={}))
            log.info(
                "[%d/%d] %s: %d entities, %d schema changes",
                snap.index + 1, total, snap.commit.hash[:12], len(schema.entities), len(step),
            )
            prev = schema
        cache.forget_except(batch[-1].files.items())
    if files_seen and files_seen == files_failed:
        raise AnalysisError("no source file in the history could be parsed")
    result.snapshots = snapshots
    result.changes = changes
    return result


def run_analyze(config: RunConfig) -> tuple[int, Optional[ReportBundle]]:
    try:
        config.validate()
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG, None
    try:
        result = analyze_history(config)
        bundle = emit_report_bundle(result, config.output_dir, config.deterministic_manifest)
    except (RepoAccessError, ToolInvocationError, AnalysisError, ReportIoError) as exc:
        log.error("%s", exc)
        return EXIT_FAILURE, None
    log.info("report written to %s", bundle.output_dir)
    return EXIT_OK, bundle


def _jobs(value: str) -> int:
    if value == "auto":
        return os.cpu_count() or 1
    try:
        jobs = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {value!r}")
    if jobs < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nosqlschema",
        description="Reconstruct and track the implicit NoSQL schema of Objectify/Morphia projects.",
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress per-commit progress")
    sub = parser.add_subparsers(dest="command", required=True)
    analyze = sub.add_parser("analyze", help="analyze a history and write a report bundle")
    src = analyze.add_mutually_exclusive_group(required=True)
    src.add_argument("--repo", type=Path, help="local git repository")
    src.add_argument("--snapshots", type=Path, help="directory of NNN_label snapshot folders")
    analyze.add_argument("--before", help="ignore commits committed after this ISO-8601 date")
    analyze.add_argument(
        "--mapper", choices=[d.value for d in MapperDialect], default="auto",
        help="annotation vocabulary (default: detect from imports)",
    )
    analyze.add_argument("--out", type=Path, required=True, help="report output directory")
    analyze.add_argument("--jobs", type=_jobs, default=1, help="parser processes, or 'auto'")
    analyze.add_argument(
        "--deterministic", action="store_true", help="omit the timestamp from manifest.json"
    )
    analyze.add_argument("--label", help="project label for the report (default: source dir name)")
    analyze.add_argument(
        "--min-commits-warn", type=int, default=20, help="warn below this many commits (default 20)"
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if args.repo is not None:
        source = HistorySource.repo(args.repo, args.before)
    else:
        source = HistorySource.snapshots(args.snapshots, args.before)
    config = RunConfig(
        source=source,
        output_dir=args.out,
        dialect=MapperDialect(args.mapper),
        min_commits_warn=args.min_commits_warn,
        parallelism=args.jobs,
        deterministic_manifest=args.deterministic,
        project=args.label or source.path.resolve().name,
    )
    code, _ = run_analyze(config)
    return code


if __name__ == "__main__":
    sys.exit(main())

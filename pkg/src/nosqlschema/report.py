"""Chart-ready report files for one analyzed history.

A bundle consists of ``trend.csv``, ``changes.csv``, ``dotmatrix.json``,
``treemap.json``, ``distribution.json``, ``drilldown.json``,
``summary.json`` and ``diagnostics.txt``, plus ``manifest.json`` listing
their SHA-256 digests. Bundles are written all-or-nothing.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import metrics
from .differ import ChangeKind, SchemaChange, SchemaSnapshot

FORMAT_VERSION = "1"
BUNDLE_FILES = (
    "trend.csv",
    "changes.csv",
    "dotmatrix.json",
    "treemap.json",
    "distribution.json",
    "drilldown.json",
    "summary.json",
    "diagnostics.txt",
)
MANIFEST = "manifest.json"

TREND_HEADER = (
    "commit_index", "hash", "pct_progress", "n_entities", "schema_loc",
    "n_entities_norm_pct", "schema_loc_norm_pct",
)
CHANGES_HEADER = (
    "commit_index", "hash", "committer_date", "kind", "entity", "attribute",
    "detail_before", "detail_after",
)


class ReportIoError(OSError):
    """A bundle file could not be written."""


@dataclass
class AnalysisResult:
    """Everything the emitter needs about one analyzed history."""

    snapshots: Sequence[SchemaSnapshot]
    changes: Sequence[SchemaChange]
    project: str = ""
    dialect: str = "auto"
    run_diagnostics: list[str] = field(default_factory=list)

    @property
    def total_commits(self) -> int:
        return len(self.snapshots)

    def changes_by_commit(self) -> dict[int, list[SchemaChange]]:
        grouped: dict[int, list[SchemaChange]] = {s.index: [] for s in self.snapshots}
        for change in self.changes:
            grouped.setdefault(change.commit_index, []).append(change)
        return grouped

    def project_dialect(self) -> str:
        """Label used to aggregate distributions by mapper library."""
        if self.dialect != "auto":
            return self.dialect
        used = set()
        for snap in self.snapshots:
            used.update(d.value for d in snap.dialects)
        return "+".join(sorted(used)) or "none"


@dataclass(frozen=True)
class ReportBundle:
    output_dir: Path
    manifest: dict
    project: str
    dialect: str
    generated_at: Optional[str]


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _pct(value: float) -> str:
    return f"{value:.4f}"


def rounded_shares(counts: dict[str, int]) -> dict[str, float]:
    """One-decimal percentages that sum to exactly 100 (largest remainder)."""
    total = sum(counts.values())
    if not total:
        return {k: 0.0 for k in counts}
    tenths = {k: 1000 * v / total for k, v in counts.items()}
    floors = {k: int(t) for k, t in tenths.items()}
    spare = 1000 - sum(floors.values())
    by_remainder = sorted(counts, key=lambda k: (floors[k] - tenths[k], list(counts).index(k)))
    for k in by_remainder[:spare]:
        floors[k] += 1
    return {k: floors[k] / 10 for k in counts}


def distribution_payload(dist: metrics.ChangeDistribution) -> dict:
    return {
        "kind_counts": dict(dist.kind_counts),
        "category_counts": dict(dist.category_counts),
        "shares_pct": rounded_shares(dict(dist.category_counts)),
        "total": dist.total,
    }


def render_bundle(result: AnalysisResult) -> dict[str, str]:
    """File name -> text for the eight bundle files."""
    snaps = list(result.snapshots)
    changes = sorted(result.changes, key=SchemaChange.sort_key)
    trend = metrics.trend_series(snaps) if snaps else []
    dist = metrics.change_distribution(changes)
    churn = metrics.churn_rate(result.changes_by_commit(), result.total_commits)
    drill = metrics.attribute_change_drilldown(changes)
    churn_records = metrics.entity_churn(changes, snaps)
    final = snaps[-1] if snaps else SchemaSnapshot.empty()

    files: dict[str, str] = {}
    files["trend.csv"] = _csv(
        TREND_HEADER,
        (
            (p.commit_index, p.commit_hash, _pct(p.pct_progress), p.n_entities, p.schema_loc,
             _pct(p.n_entities_norm_pct), _pct(p.schema_loc_norm_pct))
            for p in trend
        ),
    )
    files["changes.csv"] = _csv(
        CHANGES_HEADER,
        (
            (c.commit_index, c.commit_hash, c.committer_date, c.kind.value, c.entity,
             c.attribute or "", c.detail_before or "", c.detail_after or "")
            for c in changes
        ),
    )
    dots = [
        {
            "qualified_name": name,
            "classification": entity.verdict.classification,
            "reasons": sorted(r.value for r in entity.verdict.reasons),
        }
        for name, entity in sorted(final.entities.items())
    ]
    files["dotmatrix.json"] = _json(
        {
            "entities": dots,
            "n_entities": len(dots),
            "n_denormalized": sum(1 for d in dots if d["reasons"]),
        }
    )
    files["treemap.json"] = _json(
        {
            "entities": [
                {
                    "qualified_name": r.qualified_name,
                    "schema_loc": r.schema_loc,
                    "change_count": r.change_count,
                    "relative_frequency": round(r.relative_frequency, 6),
                    "present_at_end": r.qualified_name in final.entities,
                }
                for r in churn_records
            ],
            "max_change_count": max((r.change_count for r in churn_records), default=0),
        }
    )
    files["distribution.json"] = _json(
        {**distribution_payload(dist), "by_dialect": {result.project_dialect(): distribution_payload(dist)}}
    )
    files["drilldown.json"] = _json(drill)

    counts = [p.n_entities for p in trend]
    locs = [p.schema_loc for p in trend]
    try:
        correlation = round(metrics.pearson(counts, locs), 12)
    except metrics.DegenerateSeries:
        correlation = None

    def commit_info(snap):
        return {
            "hash": snap.commit.hash,
            "author_date": snap.commit.author_date,
            "committer_date": snap.commit.committer_date,
        }

    files["summary.json"] = _json(
        {
            "format_version": FORMAT_VERSION,
            "project": result.project,
            "dialect": result.project_dialect(),
            "first_commit": commit_info(snaps[0]) if snaps else None,
            "last_commit": commit_info(snaps[-1]) if snaps else None,
            "total_commits": result.total_commits,
            "entity_classes": {"min": min(counts, default=0), "max": max(counts, default=0)},
            "schema_loc": {
                "min": min(locs, default=0),
                "max": max(locs, default=0),
                "first": locs[0] if locs else 0,
                "last": locs[-1] if locs else 0,
            },
            "java_loc": {
                "first": snaps[0].java_loc if snaps else 0,
                "last": snaps[-1].java_loc if snaps else 0,
            },
            "churn": {
                "total_commits": churn.total_commits,
                "schema_relevant_commits": churn.schema_relevant_commits,
                "churn_rate_pct": round(churn.churn_rate_pct, 4),
            },
            "correlation": {"method": "pearson", "n_entities_vs_schema_loc": correlation},
            "total_changes": len(changes),
            "final_entities": len(final.entities),
            "final_denormalized": sum(1 for e in final.entities.values() if e.verdict.denormalized),
        }
    )

    seen: set[str] = set()
    lines = []
    for message in result.run_diagnostics:
        if message not in seen:
            seen.add(message)
            lines.append(f"run\t{message}")
    for snap in snaps:
        for message in snap.diagnostics:
            if message not in seen:
                seen.add(message)
                lines.append(f"{snap.index}\t{message}")
    files["diagnostics.txt"] = "".join(line.replace("\n", " ") + "\n" for line in lines)
    return files


def emit_report_bundle(
    result: AnalysisResult, output_dir, deterministic: bool = False
) -> ReportBundle:
    """Write the bundle into ``output_dir``.

    With ``deterministic`` the manifest carries no generation timestamp, so
    identical inputs give byte-identical bundles.
    """
    output_dir = Path(output_dir)
    files = render_bundle(result)
    generated_at = None if deterministic else datetime.now(timezone.utc).isoformat(timespec="seconds")
    manifest = {
        "format_version": FORMAT_VERSION,
        "project": result.project,
        "dialect": result.project_dialect(),
        "generated_at": generated_at,
        "files": [
            {
                "name": name,
                "sha256": hashlib.sha256(files[name].encode("utf-8")).hexdigest(),
                "bytes": len(files[name].encode("utf-8")),
            }
            for name in BUNDLE_FILES
        ],
    }
    files[MANIFEST] = _json(manifest)

    try:
        output_dir.parent.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".bundle-", dir=output_dir.parent))
    except OSError as exc:
        raise ReportIoError(f"cannot stage bundle next to {output_dir}: {exc}") from exc
    try:
        for name, text in files.items():
            (staging / name).write_text(text, encoding="utf-8", newline="")
        output_dir.mkdir(parents=True, exist_ok=True)
        for name in files:
            os.replace(staging / name, output_dir / name)
    except OSError as exc:
        for name in files:
            try:
                (output_dir / name).unlink()
            except OSError:
                pass
        raise ReportIoError(f"writing bundle to {output_dir} failed: {exc}") from exc
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return ReportBundle(output_dir, manifest, result.project, result.project_dialect(), generated_at)


def read_changes_csv(path) -> list[SchemaChange]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            SchemaChange(
                commit_hash=row["hash"],
                commit_index=int(row["commit_index"]),
                kind=ChangeKind(row["kind"]),
                entity=row["entity"],
                attribute=row["attribute"] or None,
                detail_before=row["detail_before"] or None,
                detail_after=row["detail_after"] or None,
                committer_date=row["committer_date"],
            )
            for row in reader
        ]


def verify_bundle(output_dir) -> list[str]:
    """Problems found when checking a bundle against its manifest."""
    output_dir = Path(output_dir)
    problems = []
    try:
        manifest = json.loads((output_dir / MANIFEST).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        return [f"manifest unreadable: {exc}"]
    for entry in manifest["files"]:
        path = output_dir / entry["name"]
        if not path.is_file():
            problems.append(f"missing {entry['name']}")
        elif hashlib.sha256(path.read_bytes()).hexdigest() != entry["sha256"]:
            problems.append(f"digest mismatch for {entry['name']}")
    return problems

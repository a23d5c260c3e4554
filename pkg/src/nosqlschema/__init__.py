"""Implicit NoSQL schema extraction and evolution analysis for Java
projects using the Objectify or Morphia object mappers."""

from .differ import (
    ChangeKind,
    ParseCache,
    SchemaChange,
    SchemaSnapshot,
    build_schema_snapshot,
    diff_snapshots,
)
from .entities import (
    ClassIndex,
    DenormReason,
    DenormVerdict,
    DetectionBasis,
    EntityClass,
    MapperDialect,
    SchemaAttribute,
    classify_denormalization,
    compute_schema_loc,
    detect_entity_classes,
    extract_entities,
    resolve_schema_attributes,
)
from .history import (
    CommitRef,
    HistorySource,
    HistoryWalker,
    RepoAccessError,
    Snapshot,
    ToolInvocationError,
    linearize_history,
    materialize_snapshot,
)
from .javaparse import (
    AnnotationUse,
    ClassDecl,
    ClassKind,
    FieldDecl,
    ParseFailure,
    SourceFile,
    count_code_lines,
    parse_source,
)
from .metrics import (
    ChangeDistribution,
    ChurnStats,
    DegenerateSeries,
    EntityChurn,
    TrendPoint,
    attribute_change_drilldown,
    change_distribution,
    churn_rate,
    entity_churn,
    pearson,
    trend_series,
)
from .report import AnalysisResult, ReportBundle, emit_report_bundle, read_changes_csv

__version__ = "0.1.0"

"""Snapshots, run traces and trace comparison for replication studies."""

from .diff import (
    CROSS_IMPLEMENTATION_TOLERANCE,
    SAME_ENGINE_TOLERANCE,
    DiffReport,
    Discrepancy,
    diff_traces,
    load_tolerances,
    tolerances,
)
from .replay import replay_check
from .snapshot import SNAPSHOT_SCHEMA, export_snapshot, import_snapshot, read_snapshot_file
from .trace import (
    TRACE_SCHEMA,
    RunTrace,
    TraceHeader,
    TraceRecord,
    read_trace,
    trace_from,
    write_metrics_csv,
    write_trace,
    write_trace_csv,
)

__all__ = [
    "CROSS_IMPLEMENTATION_TOLERANCE", "SAME_ENGINE_TOLERANCE", "SNAPSHOT_SCHEMA", "TRACE_SCHEMA",
    "DiffReport", "Discrepancy", "RunTrace", "TraceHeader", "TraceRecord",
    "diff_traces", "export_snapshot", "import_snapshot", "load_tolerances", "read_snapshot_file",
    "read_trace", "replay_check", "tolerances", "trace_from", "write_metrics_csv", "write_trace",
    "write_trace_csv",
]

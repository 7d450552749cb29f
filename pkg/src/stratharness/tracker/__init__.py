"""Decision trajectories: recording, reading, classification and export."""

from __future__ import annotations

from .classify import classify_action
from .ingest import export_counters, ingest_external, match_records, parse_counter_lines
from .records import (
    ACTION_TYPES,
    FORMAT_VERSION,
    StepRecord,
    apply_delta,
    counter_delta,
    flatten_counters,
    text_digest,
    unflatten_counters,
)
from .replay import render_replay
from .store import (
    MemorySink,
    Trajectory,
    TrajectoryWriter,
    batch_digest,
    file_digest,
    parse_lines,
    read_trajectory,
)
from .timeseries import (
    DEFAULT_STRIDE,
    TimeSeriesPoint,
    export_timeseries,
    read_timeseries,
    write_timeseries,
)

__all__ = [
    "ACTION_TYPES",
    "DEFAULT_STRIDE",
    "FORMAT_VERSION",
    "MemorySink",
    "StepRecord",
    "TimeSeriesPoint",
    "Trajectory",
    "TrajectoryWriter",
    "apply_delta",
    "batch_digest",
    "classify_action",
    "counter_delta",
    "export_counters",
    "export_timeseries",
    "file_digest",
    "flatten_counters",
    "ingest_external",
    "match_records",
    "parse_counter_lines",
    "parse_lines",
    "read_timeseries",
    "read_trajectory",
    "render_replay",
    "text_digest",
    "unflatten_counters",
    "write_timeseries",
]

"""Capability scoring: weighted min-max aggregation of per-game metrics."""

from __future__ import annotations

from .config import (
    CapabilityConfig,
    Dimension,
    MetricRef,
    ScenarioRef,
    config_from_dict,
    load_capability_config,
    validate_config,
)
from .engine import (
    CapabilityReport,
    DimensionReport,
    RunMetrics,
    ScenarioReport,
    dimension_score,
    normalize,
    overall_score,
    runs_from_records,
    score,
    select_runs,
)

__all__ = [
    "CapabilityConfig",
    "CapabilityReport",
    "Dimension",
    "DimensionReport",
    "MetricRef",
    "RunMetrics",
    "ScenarioRef",
    "ScenarioReport",
    "config_from_dict",
    "dimension_score",
    "load_capability_config",
    "normalize",
    "overall_score",
    "runs_from_records",
    "score",
    "select_runs",
    "validate_config",
]

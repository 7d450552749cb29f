"""Metric formulas over named counters."""

from __future__ import annotations

from .counters import CounterRecord
from .bounds import DEFAULT_CAPS, TPCV_MAX, metric_bounds
from .formulas import (
    COUNT,
    GAMES,
    KNOWN_COUNTERS,
    PER_MINUTE,
    PERCENT,
    PIECE_COUNTERS,
    POINTS,
    REGISTRY,
    TPCV_WEIGHTS,
    MetricSpec,
    MetricValue,
    civ_metrics,
    compute_metric,
    diplomacy_metrics,
    game_metrics,
    metric_ids,
    metric_spec,
    sc2_metrics,
    sf3_metrics,
    stratego_metrics,
    werewolf_metrics,
)

__all__ = [
    "COUNT",
    "CounterRecord",
    "DEFAULT_CAPS",
    "GAMES",
    "KNOWN_COUNTERS",
    "PER_MINUTE",
    "PERCENT",
    "PIECE_COUNTERS",
    "POINTS",
    "REGISTRY",
    "TPCV_MAX",
    "TPCV_WEIGHTS",
    "MetricSpec",
    "MetricValue",
    "civ_metrics",
    "compute_metric",
    "diplomacy_metrics",
    "game_metrics",
    "metric_bounds",
    "metric_ids",
    "metric_spec",
    "sc2_metrics",
    "sf3_metrics",
    "stratego_metrics",
    "werewolf_metrics",
]

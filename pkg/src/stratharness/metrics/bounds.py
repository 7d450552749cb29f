"""Theoretical bounds used for min-max normalization.

Only the percent metrics and TPCV/CCC have natural bounds. Rate metrics
need a configured cap; the defaults below are harness choices, not
published values, and any of them can be overridden from the scoring
config.
"""

from __future__ import annotations

from typing import Mapping

from .formulas import PERCENT, metric_spec

TPCV_MAX = 148.0
# 34 supply centres on the standard Diplomacy map.
CCC_MAX = 34.0

DEFAULT_CAPS: dict[str, tuple[float, float]] = {
    "RPM": (0.0, 2000.0),
    "APM": (0.0, 60.0),
    "EPM": (0.0, 60.0),
    "EGR": (0.0, 100.0),
    "CER": (0.0, 1.0),
    "MGR": (0.0, 5.0),
    "HCR": (-10.0, 10.0),
    "AD": (0.0, 40.0),
    "TPCV": (0.0, TPCV_MAX),
    "CCC": (0.0, CCC_MAX),
}


def metric_bounds(metric_id: str, caps: Mapping[str, tuple[float, float]] | None = None) -> tuple[float, float]:
    """(theoretical_min, theoretical_max) for ``metric_id``.

    ``caps`` entries win over the defaults, so a configured cap is echoed
    back verbatim.
    """
    if caps and metric_id in caps:
        lo, hi = caps[metric_id]
        return float(lo), float(hi)
    if metric_id in DEFAULT_CAPS:
        return DEFAULT_CAPS[metric_id]
    spec = metric_spec(metric_id)
    if spec.unit == PERCENT:
        return (0.0, 100.0)
    raise KeyError(f"no bounds known for metric {metric_id!r}; set a cap in the scoring config")

"""Metric values over time, evaluated on cumulative counters."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..errors import UndefinedMetricError
from ..metrics.formulas import metric_spec
from .records import unflatten_counters
from .store import Trajectory

DEFAULT_STRIDE = 25


@dataclass(frozen=True)
class TimeSeriesPoint:
    step_index: int
    metric_id: str
    value: float


def cumulative_counters(trajectory: Trajectory, seat: str) -> list[dict[str, float]]:
    """Counters of ``seat`` after each recorded step.

    End-of-match bookkeeping (a step-limit adjudication, say) happens after
    the last step, so the final snapshot comes from the result record when
    one is present.
    """
    out = []
    for step in trajectory.steps:
        per_seat = unflatten_counters(step.counters_after)
        out.append(per_seat.get(seat, {}))
    final = (trajectory.result or {}).get("final_counters") or {}
    if out and seat in final:
        out[-1] = {k: float(v) for k, v in final[seat].items()}
    return out


def default_seat(trajectory: Trajectory) -> str:
    header = trajectory.header or {}
    if header.get("evaluated_seat"):
        return header["evaluated_seat"]
    seats = header.get("seats") or []
    if not seats:
        raise ValueError("trajectory header names no seats; pass seat explicitly")
    return seats[0]


def export_timeseries(
    source: Trajectory | Sequence[Mapping[str, float]],
    metric_id: str,
    stride: int = DEFAULT_STRIDE,
    seat: str | None = None,
    game_id: str | None = None,
) -> list[TimeSeriesPoint]:
    """Evaluate ``metric_id`` every ``stride`` steps plus the final step.

    ``source`` is a trajectory or a list of cumulative counter snapshots
    (one per step). Step numbers count applied steps, so a point at step
    100 uses the counters after the hundredth action. Points where the
    metric is undefined are skipped; missing counters raise.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if isinstance(source, Trajectory):
        game_id = game_id or source.game_id
        snapshots = cumulative_counters(source, seat or default_seat(source))
    else:
        snapshots = [dict(s) for s in source]
    try:
        spec = metric_spec(metric_id, game_id)
    except KeyError:
        spec = metric_spec(metric_id)
    n = len(snapshots)
    steps = list(range(stride, n + 1, stride))
    if n and (not steps or steps[-1] != n):
        steps.append(n)
    points = []
    for step in steps:
        try:
            value = spec.fn(snapshots[step - 1])
        except UndefinedMetricError:
            continue
        if not math.isnan(value):
            points.append(TimeSeriesPoint(step, metric_id, value))
    return points


def write_timeseries(points: Sequence[TimeSeriesPoint], path: str | Path, delimiter: str = ",") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["step", "metric", "value"])
        for p in points:
            writer.writerow([p.step_index, p.metric_id, repr(p.value)])
    return path


def read_timeseries(path: str | Path, delimiter: str = ",") -> list[TimeSeriesPoint]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        return [TimeSeriesPoint(int(r["step"]), r["metric"], float(r["value"])) for r in reader]

"""Capability scores: run averaging, min-max normalization and weighting.

For each scenario the raw value of every metric is averaged over the
scenario's runs, normalized against its bounds, and the scenario's
metrics are combined by their sub-weights. A dimension is beta times the
w-weighted sum of its scenarios, on a 0-100 scale. The overall score is
the W-weighted sum of the dimensions.

Undefined metric values (NaN) are skipped when averaging. A metric that is
undefined in every run, or a scenario with no defined metric, is dropped
and the remaining weights are renormalized; each drop adds a warning.
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from ..errors import ConfigError, IncompleteDataError
from ..metrics.counters import CounterRecord
from ..metrics.formulas import game_metrics
from .config import CapabilityConfig, Dimension, ScenarioRef, validate_config

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunMetrics:
    """Raw metric values of one run of one scenario (NaN = undefined)."""

    game_id: str
    scenario: str
    run: int
    values: Mapping[str, float]


def normalize(value: float, lo: float, hi: float, warnings: list[str] | None = None,
              label: str = "value") -> float:
    """Clamp ``value`` to [lo, hi] and map it onto [0, 1]."""
    if not hi > lo:
        raise ConfigError(f"bounds for {label} are invalid: max {hi} must exceed min {lo}")
    if value < lo or value > hi:
        msg = f"{label} = {value:.6g} is outside [{lo:.6g}, {hi:.6g}] and was clamped"
        log.warning(msg)
        if warnings is not None:
            warnings.append(msg)
        value = min(max(value, lo), hi)
    return (value - lo) / (hi - lo)


def runs_from_records(records: Iterable[CounterRecord],
                      seats: Mapping[str, str] | None = None) -> list[RunMetrics]:
    """Evaluate every metric of each record's game.

    ``seats`` maps a scenario name to the seat being scored; records of
    other seats in that scenario are ignored.
    """
    out = []
    for r in records:
        if seats and r.scenario in seats and r.seat != seats[r.scenario]:
            continue
        values = {k: v.value for k, v in game_metrics(r.game_id, r.counters).items()}
        out.append(RunMetrics(r.game_id, r.scenario, r.run, values))
    return out


def _group(runs: Iterable[RunMetrics]) -> dict[tuple[str, str], dict[int, RunMetrics]]:
    grouped: dict[tuple[str, str], dict[int, RunMetrics]] = {}
    for r in runs:
        bucket = grouped.setdefault((r.game_id, r.scenario), {})
        if r.run in bucket:
            raise IncompleteDataError(f"duplicate run {r.run} for scenario {r.game_id}/{r.scenario}")
        bucket[r.run] = r
    return grouped


def select_runs(config: CapabilityConfig, runs: Iterable[RunMetrics],
                warnings: list[str] | None = None) -> dict[tuple[str, str], list[RunMetrics]]:
    """Pick each configured scenario's runs, enforcing k where set."""
    grouped = _group(runs)
    missing: list[tuple[str, int]] = []
    selected: dict[tuple[str, str], list[RunMetrics]] = {}
    for s in config.scenarios():
        key = (s.game_id, s.scenario_ref)
        if key in selected:
            continue
        bucket = grouped.get(key, {})
        label = f"{s.game_id}/{s.scenario_ref}"
        if s.k is None:
            if not bucket:
                missing.append((label, 0))
            selected[key] = [bucket[i] for i in sorted(bucket)]
            continue
        missing.extend((label, i) for i in range(s.k) if i not in bucket)
        extra = sorted(i for i in bucket if i >= s.k)
        if extra and warnings is not None:
            warnings.append(f"{label}: ignoring runs {extra} beyond k={s.k}")
        selected[key] = [bucket[i] for i in range(s.k) if i in bucket]
    if missing:
        listing = ", ".join(f"({name}, run {i})" for name, i in missing)
        raise IncompleteDataError(f"missing run records: {listing}", missing)
    return selected


@dataclass
class MetricReport:
    metric_id: str
    bounds: tuple[float, float]
    weight: float
    raw_mean: float
    normalized: float
    defined_runs: int


@dataclass
class ScenarioReport:
    game_id: str
    scenario: str
    w: float
    runs: int
    normalized_mean: float
    metrics: list[MetricReport] = field(default_factory=list)

    @property
    def defined(self) -> bool:
        return not math.isnan(self.normalized_mean)


def _mean_defined(values: Sequence[float]) -> tuple[float, int]:
    good = [v for v in values if not math.isnan(v)]
    return (math.fsum(good) / len(good), len(good)) if good else (math.nan, 0)


def scenario_score(config: CapabilityConfig, s: ScenarioRef, runs: Sequence[RunMetrics],
                   warnings: list[str]) -> ScenarioReport:
    report = ScenarioReport(s.game_id, s.scenario_ref, s.w, len(runs), math.nan)
    num = den = 0.0
    for m in s.metrics:
        lo, hi = config.bounds_for(m)
        raw, n = _mean_defined([r.values.get(m.metric_id, math.nan) for r in runs])
        label = f"{s.game_id}/{s.scenario_ref}/{m.metric_id}"
        if n == 0:
            warnings.append(f"{label}: undefined in every run; excluded and sub-weights renormalized")
            report.metrics.append(MetricReport(m.metric_id, (lo, hi), m.weight, math.nan, math.nan, 0))
            continue
        norm = normalize(raw, lo, hi, warnings, label)
        report.metrics.append(MetricReport(m.metric_id, (lo, hi), m.weight, raw, norm, n))
        num += m.weight * norm
        den += m.weight
    if den > 0:
        report.normalized_mean = num / den
    return report


def _combine(dim: Dimension, scenario_values: Sequence[tuple[float, float]]) -> float:
    """beta * sum(w * s) / sum(w) * 100 over defined scenarios."""
    pairs = [(w, v) for w, v in scenario_values if not math.isnan(v)]
    total_w = math.fsum(w for w, _ in pairs)
    if not pairs or total_w <= 0:
        return math.nan
    return dim.beta * math.fsum(w * v for w, v in pairs) / total_w * 100.0


@dataclass
class DimensionReport:
    name: str
    W: float
    beta: float
    score: float
    run_scores: list[float] = field(default_factory=list)
    scenarios: list[ScenarioReport] = field(default_factory=list)

    @property
    def run_mean(self) -> float:
        good = [v for v in self.run_scores if not math.isnan(v)]
        return statistics.fmean(good) if good else math.nan

    @property
    def run_std(self) -> float:
        good = [v for v in self.run_scores if not math.isnan(v)]
        return statistics.stdev(good) if len(good) > 1 else 0.0 if good else math.nan


def dimension_score(config: CapabilityConfig, dim: Dimension,
                    runs: Mapping[tuple[str, str], Sequence[RunMetrics]],
                    warnings: list[str] | None = None) -> DimensionReport:
    warnings = warnings if warnings is not None else []
    reports = []
    for s in dim.scenarios:
        key = (s.game_id, s.scenario_ref)
        if key not in runs:
            raise IncompleteDataError(f"no runs for scenario {s.game_id}/{s.scenario_ref}",
                                      [(f"{s.game_id}/{s.scenario_ref}", 0)])
        rep = scenario_score(config, s, runs[key], warnings)
        if not rep.defined:
            warnings.append(f"{dim.name}: scenario {s.game_id}/{s.scenario_ref} has no defined metric; "
                            "excluded and scenario weights renormalized")
        reports.append(rep)
    score = _combine(dim, [(r.w, r.normalized_mean) for r in reports])

    # Per-run scores: the p-th run of every scenario stands in for the mean.
    depth = min(len(runs[(s.game_id, s.scenario_ref)]) for s in dim.scenarios)
    run_scores = []
    for p in range(depth):
        scratch: list[str] = []
        vals = []
        for s in dim.scenarios:
            one = runs[(s.game_id, s.scenario_ref)][p]
            vals.append((s.w, scenario_score(config, s, [one], scratch).normalized_mean))
        run_scores.append(_combine(dim, vals))
    return DimensionReport(dim.name, dim.W, dim.beta, score, run_scores, reports)


def overall_score(config: CapabilityConfig, dimension_scores: Mapping[str, float],
                  warnings: list[str] | None = None) -> float:
    """Sum of W_i times each dimension score (beta is already inside)."""
    total_w = math.fsum(d.W for d in config.dimensions)
    if abs(total_w - 1.0) > 1e-9:
        raise ConfigError(f"dimension weights sum to {total_w}, expected 1")
    pairs = []
    for d in config.dimensions:
        if d.name not in dimension_scores:
            raise IncompleteDataError(f"dimension {d.name!r} has not been scored")
        v = dimension_scores[d.name]
        if math.isnan(v):
            if warnings is not None:
                warnings.append(f"dimension {d.name!r} is undefined; dimension weights renormalized")
            continue
        pairs.append((d.W, v))
    if not pairs:
        return math.nan
    used = math.fsum(w for w, _ in pairs)
    return math.fsum(w * v for w, v in pairs) / used


@dataclass
class CapabilityReport:
    dimensions: list[DimensionReport]
    overall: float
    overall_runs: list[float]
    runs: list[RunMetrics]
    warnings: list[str] = field(default_factory=list)

    @property
    def overall_mean(self) -> float:
        good = [v for v in self.overall_runs if not math.isnan(v)]
        return statistics.fmean(good) if good else math.nan

    @property
    def overall_std(self) -> float:
        good = [v for v in self.overall_runs if not math.isnan(v)]
        return statistics.stdev(good) if len(good) > 1 else 0.0 if good else math.nan

    def dimension(self, name: str) -> DimensionReport:
        for d in self.dimensions:
            if d.name == name:
                return d
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        def num(x: float) -> float | None:
            return None if math.isnan(x) else x

        return {
            "overall": num(self.overall),
            "overall_run_mean": num(self.overall_mean),
            "overall_run_std": num(self.overall_std),
            "dimensions": [
                {
                    "name": d.name,
                    "W": d.W,
                    "beta": d.beta,
                    "score": num(d.score),
                    "run_mean": num(d.run_mean),
                    "run_std": num(d.run_std),
                    "run_scores": [num(v) for v in d.run_scores],
                    "scenarios": [
                        {
                            "game": s.game_id,
                            "scenario": s.scenario,
                            "w": s.w,
                            "runs": s.runs,
                            "normalized_mean": num(s.normalized_mean),
                            "metrics": [
                                {
                                    "metric": m.metric_id,
                                    "bounds": list(m.bounds),
                                    "weight": m.weight,
                                    "raw_mean": num(m.raw_mean),
                                    "normalized": num(m.normalized),
                                    "defined_runs": m.defined_runs,
                                }
                                for m in s.metrics
                            ],
                        }
                        for s in d.scenarios
                    ],
                }
                for d in self.dimensions
            ],
            "runs": [
                {"game": r.game_id, "scenario": r.scenario, "run": r.run,
                 "values": {k: num(v) for k, v in sorted(r.values.items())}}
                for r in self.runs
            ],
            "warnings": list(self.warnings),
        }

    def format_table(self) -> str:
        def f(x: float) -> str:
            return "   n/a" if math.isnan(x) else f"{x:6.2f}"

        width = max([len(d.name) for d in self.dimensions] + [len("Overall")])
        lines = [
            f"{'Dimension':<{width}}  {'W':>5}  {'beta':>5}  {'score':>6}  {'mean':>6}  {'std':>6}",
            "-" * (width + 42),
        ]
        for d in self.dimensions:
            lines.append(f"{d.name:<{width}}  {d.W:5.2f}  {d.beta:5.2f}  {f(d.score)}  "
                         f"{f(d.run_mean)}  {f(d.run_std)}")
        lines.append("-" * (width + 42))
        lines.append(f"{'Overall':<{width}}  {'':>5}  {'':>5}  {f(self.overall)}  "
                     f"{f(self.overall_mean)}  {f(self.overall_std)}")
        return "\n".join(lines)


def score(config: CapabilityConfig, runs: Sequence[RunMetrics]) -> CapabilityReport:
    """Full report for ``runs`` under ``config``."""
    problems = validate_config(config)
    if problems:
        raise ConfigError("scoring config is invalid:\n  " + "\n  ".join(problems))
    warnings: list[str] = []
    selected = select_runs(config, runs, warnings)
    dims = [dimension_score(config, d, selected, warnings) for d in config.dimensions]
    overall = overall_score(config, {d.name: d.score for d in dims}, warnings)
    depth = min((len(d.run_scores) for d in dims), default=0)
    scratch: list[str] = []
    overall_runs = [
        overall_score(config, {d.name: d.run_scores[p] for d in dims}, scratch) for p in range(depth)
    ]
    used = sorted(
        (r for rs in selected.values() for r in rs),
        key=lambda r: (r.game_id, r.scenario, r.run),
    )
    seen: list[str] = []
    for w in warnings:
        if w not in seen:
            seen.append(w)
    return CapabilityReport(dims, overall, overall_runs, used, seen)

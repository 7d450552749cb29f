"""Capability scoring configuration: schema, loading and validation.

Schema (YAML)::

    caps: {RPM: [0, 2000]}          # optional bound overrides per metric
    dimensions:
      - name: Strategic Planning
        W: 0.2                       # dimension weight, all W sum to 1
        beta: 1.0                    # adjustment factor in (0, 1]
        scenarios:
          - game: stratego
            scenario: stratego_random   # scenario name in the run records
            w: 1.0                   # scenario weight, per-dimension sum 1
            k: 10                    # optional: exact number of runs
            metrics: [CPR, {id: TPCV, bounds: [0, 148], weight: 1}]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..data import default_scoring_text
from ..errors import ConfigError
from ..metrics.bounds import metric_bounds
from ..metrics.formulas import REGISTRY

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class MetricRef:
    metric_id: str
    bounds: tuple[float, float] | None = None
    weight: float = 1.0


@dataclass(frozen=True)
class ScenarioRef:
    game_id: str
    scenario_ref: str
    w: float
    metrics: tuple[MetricRef, ...]
    k: int | None = None


@dataclass(frozen=True)
class Dimension:
    name: str
    W: float
    beta: float
    scenarios: tuple[ScenarioRef, ...]


@dataclass(frozen=True)
class CapabilityConfig:
    dimensions: tuple[Dimension, ...]
    caps: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def bounds_for(self, metric: MetricRef) -> tuple[float, float]:
        if metric.bounds is not None:
            return metric.bounds
        return metric_bounds(metric.metric_id, self.caps)

    def scenarios(self) -> list[ScenarioRef]:
        return [s for d in self.dimensions for s in d.scenarios]

    def to_dict(self) -> dict[str, Any]:
        return {
            "caps": {k: list(v) for k, v in sorted(self.caps.items())},
            "dimensions": [
                {
                    "name": d.name,
                    "W": d.W,
                    "beta": d.beta,
                    "scenarios": [
                        {
                            "game": s.game_id,
                            "scenario": s.scenario_ref,
                            "w": s.w,
                            **({"k": s.k} if s.k is not None else {}),
                            "metrics": [
                                {"id": m.metric_id, "weight": m.weight,
                                 **({"bounds": list(m.bounds)} if m.bounds else {})}
                                for m in s.metrics
                            ],
                        }
                        for s in d.scenarios
                    ],
                }
                for d in self.dimensions
            ],
        }


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _pair(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected [min, max]")
    return _num(value[0], where), _num(value[1], where)


def _metric(raw: Any, where: str) -> MetricRef:
    if isinstance(raw, str):
        return MetricRef(raw)
    if not isinstance(raw, Mapping) or "id" not in raw:
        raise ConfigError(f"{where}: metric must be an id or a mapping with 'id'")
    extra = set(raw) - {"id", "bounds", "weight"}
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(sorted(extra))}")
    bounds = _pair(raw["bounds"], f"{where}.bounds") if raw.get("bounds") is not None else None
    return MetricRef(str(raw["id"]), bounds, _num(raw.get("weight", 1.0), f"{where}.weight"))


def config_from_dict(data: Any) -> CapabilityConfig:
    if not isinstance(data, Mapping) or not isinstance(data.get("dimensions"), list):
        raise ConfigError("scoring config must be a mapping with a 'dimensions' list")
    caps = {}
    for metric_id, pair in (data.get("caps") or {}).items():
        caps[str(metric_id)] = _pair(pair, f"caps.{metric_id}")
    dims = []
    for i, d in enumerate(data["dimensions"]):
        where = f"dimensions[{i}]"
        if not isinstance(d, Mapping):
            raise ConfigError(f"{where}: must be a mapping")
        for key in ("name", "W", "beta", "scenarios"):
            if key not in d:
                raise ConfigError(f"{where}.{key}: required")
        scenarios = []
        for j, s in enumerate(d["scenarios"] or []):
            sw = f"{where}.scenarios[{j}]"
            if not isinstance(s, Mapping):
                raise ConfigError(f"{sw}: must be a mapping")
            for key in ("game", "scenario", "w", "metrics"):
                if key not in s:
                    raise ConfigError(f"{sw}.{key}: required")
            k = s.get("k")
            if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
                raise ConfigError(f"{sw}.k: expected an integer")
            metrics = tuple(_metric(m, f"{sw}.metrics[{n}]") for n, m in enumerate(s["metrics"] or []))
            scenarios.append(ScenarioRef(str(s["game"]), str(s["scenario"]), _num(s["w"], f"{sw}.w"),
                                         metrics, k))
        dims.append(Dimension(str(d["name"]), _num(d["W"], f"{where}.W"),
                              _num(d["beta"], f"{where}.beta"), tuple(scenarios)))
    return CapabilityConfig(tuple(dims), caps)


def validate_config(config: CapabilityConfig) -> list[str]:
    """All broken invariants, each naming its path; empty when valid."""
    problems = []
    if not config.dimensions:
        problems.append("dimensions: at least one dimension is required")
    total_w = sum(d.W for d in config.dimensions)
    if abs(total_w - 1.0) > WEIGHT_TOL:
        problems.append(f"dimensions.W: weights sum to {total_w:.12g}, expected 1")
    names = [d.name for d in config.dimensions]
    for name in sorted({n for n in names if names.count(n) > 1}):
        problems.append(f"dimensions[{name}]: duplicate dimension name")
    for metric_id, (lo, hi) in config.caps.items():
        if not hi > lo:
            problems.append(f"caps.{metric_id}: max must exceed min")
    for i, d in enumerate(config.dimensions):
        where = f"dimensions[{i}] ({d.name})"
        if not 0.0 <= d.W <= 1.0:
            problems.append(f"{where}.W: {d.W} is outside [0, 1]")
        if not (0.0 < d.beta <= 1.0):
            problems.append(f"{where}.beta: {d.beta} is outside (0, 1]")
        if not d.scenarios:
            problems.append(f"{where}.scenarios: at least one scenario is required")
            continue
        sw_total = sum(s.w for s in d.scenarios)
        if abs(sw_total - 1.0) > WEIGHT_TOL:
            problems.append(f"{where}.scenarios.w: weights sum to {sw_total:.12g}, expected 1")
        for j, s in enumerate(d.scenarios):
            sw = f"{where}.scenarios[{j}] ({s.game_id}/{s.scenario_ref})"
            if not 0.0 <= s.w <= 1.0:
                problems.append(f"{sw}.w: {s.w} is outside [0, 1]")
            if s.k is not None and s.k < 1:
                problems.append(f"{sw}.k: must be >= 1")
            if s.game_id not in REGISTRY:
                problems.append(f"{sw}.game: no metrics registered for {s.game_id!r}")
                continue
            if not s.metrics:
                problems.append(f"{sw}.metrics: at least one metric is required")
            for m in s.metrics:
                mw = f"{sw}.metrics.{m.metric_id}"
                if m.metric_id not in REGISTRY[s.game_id]:
                    problems.append(f"{mw}: not a {s.game_id} metric")
                    continue
                if not (m.weight > 0 and math.isfinite(m.weight)):
                    problems.append(f"{mw}.weight: must be positive")
                try:
                    lo, hi = config.bounds_for(m)
                except KeyError as exc:
                    problems.append(f"{mw}.bounds: {exc.args[0]}")
                    continue
                if not hi > lo:
                    problems.append(f"{mw}.bounds: max must exceed min")
    return problems


def load_capability_config(path: str | Path | None = None, validate: bool = True) -> CapabilityConfig:
    """Load a scoring config; with no path, the packaged default."""
    if path is None:
        text = default_scoring_text()
        where = "default scoring config"
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"scoring config {path} not found") from None
        where = str(path)
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    config = config_from_dict(data)
    if validate:
        problems = validate_config(config)
        if problems:
            raise ConfigError(f"{where} is invalid:\n  " + "\n  ".join(problems))
    return config

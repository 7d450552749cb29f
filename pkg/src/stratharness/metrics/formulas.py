"""Per-game metric formulas over named counters.

Every metric is a pure function of a counter mapping. Missing counters
raise MissingCounterError; a zero denominator raises UndefinedMetricError
and is never reported as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

from ..errors import MissingCounterError, UndefinedMetricError
from ..games.stratego.pieces import Rank

PERCENT = "percent"
PER_MINUTE = "per_minute"
COUNT = "count"
POINTS = "points"

Counters = Mapping[str, float]


@dataclass(frozen=True)
class MetricSpec:
    """A registered metric.

    ``increasing`` and ``decreasing`` list the counters the metric is
    non-decreasing / non-increasing in; counters in neither set have a
    sign-dependent effect.
    """

    metric_id: str
    unit: str
    fn: Callable[[Counters], float]
    counters: tuple[str, ...]
    increasing: tuple[str, ...]
    decreasing: tuple[str, ...]
    description: str


@dataclass(frozen=True)
class MetricValue:
    metric_id: str
    value: float
    unit: str

    @property
    def defined(self) -> bool:
        return not math.isnan(self.value)


def _get(c: Counters, name: str, metric_id: str) -> float:
    try:
        v = c[name]
    except KeyError:
        raise MissingCounterError(name, metric_id) from None
    return float(v)


def _ratio(c: Counters, metric_id: str, num: tuple[str, ...], den: tuple[str, ...], scale: float) -> float:
    n = sum(_get(c, k, metric_id) for k in num)
    d = sum(_get(c, k, metric_id) for k in den)
    if d == 0:
        raise UndefinedMetricError(metric_id, f"{' + '.join(den)} is zero")
    return n / d * scale


REGISTRY: dict[str, dict[str, MetricSpec]] = {}


def _register(game: str, spec: MetricSpec) -> None:
    REGISTRY.setdefault(game, {})[spec.metric_id] = spec


def _ratio_metric(game: str, metric_id: str, unit: str, num: tuple[str, ...], den: tuple[str, ...],
                  description: str) -> None:
    scale = 100.0 if unit == PERCENT else 1.0
    _register(game, MetricSpec(
        metric_id, unit,
        lambda c, m=metric_id: _ratio(c, m, num, den, scale),
        num + den, num, den, description,
    ))


def _identity_metric(game: str, metric_id: str, unit: str, counter: str, description: str) -> None:
    _register(game, MetricSpec(
        metric_id, unit,
        lambda c, m=metric_id: _get(c, counter, m),
        (counter,), (counter,), (), description,
    ))


def _shared(game: str) -> None:
    _ratio_metric(game, "WR", PERCENT, ("matches_won",), ("total_matches",), "win rate")
    _ratio_metric(game, "GA", PERCENT, ("successful_groundings",), ("total_grounding_attempts",),
                  "grounding accuracy")


# -- StarCraft II -------------------------------------------------------------
_ratio_metric("sc2", "RPM", PER_MINUTE, ("collected_minerals", "collected_vespene"),
              ("game_time_minutes",), "resources gathered per minute")
_ratio_metric("sc2", "EER", PERCENT, ("spent_minerals", "spent_vespene"),
              ("collected_minerals", "collected_vespene"), "share of gathered resources spent")
_ratio_metric("sc2", "SUR", PERCENT, ("supply_used",), ("supply_cap",), "supply in use")
_ratio_metric("sc2", "TCR", PERCENT, ("available_technologies",), ("total_technologies",),
              "technologies unlocked")
_ratio_metric("sc2", "APM", PER_MINUTE, ("model_outputs",), ("game_time_minutes",),
              "model outputs per minute")
_ratio_metric("sc2", "EPM", PER_MINUTE, ("effective_actions",), ("game_time_minutes",),
              "effective actions per minute")
_shared("sc2")

# -- Civilization ---------------------------------------------------------------
_ratio_metric("civ", "EGR", PER_MINUTE, ("economics",), ("game_time",), "economy growth per time unit")
_ratio_metric("civ", "CER", PER_MINUTE, ("cities",), ("game_time",), "cities founded per time unit")
_ratio_metric("civ", "TRP", PERCENT, ("researched_techs",), ("total_techs",), "technologies researched")
_ratio_metric("civ", "LUR", PERCENT, ("settled_area",), ("land_area",), "land settled")
_ratio_metric("civ", "MGR", PER_MINUTE, ("military_units",), ("game_time",), "military growth per time unit")
_shared("civ")

# -- Street Fighter III ---------------------------------------------------------


def _hcr(c: Counters) -> float:
    final = _get(c, "final_health", "HCR")
    initial = _get(c, "initial_health", "HCR")
    t = _get(c, "total_fight_time", "HCR")
    if t == 0:
        raise UndefinedMetricError("HCR", "total_fight_time is zero")
    return (final - initial) / t


_ratio_metric("sf3", "AHR", PERCENT, ("successful_hits",), ("total_attacks",), "attacks that landed")
_ratio_metric("sf3", "SMHR", PERCENT, ("successful_super_moves",), ("total_super_moves",),
              "super moves that landed")
_register("sf3", MetricSpec(
    "HCR", PER_MINUTE, _hcr,
    ("final_health", "initial_health", "total_fight_time"),
    ("final_health",), ("initial_health",),
    "signed health change per time unit",
))
_shared("sf3")

# -- Diplomacy ------------------------------------------------------------------
_identity_metric("diplomacy", "CCC", COUNT, "control_centers", "supply centres held")
_ratio_metric("diplomacy", "WS", PERCENT, ("player_welfare_score",), ("total_welfare_score",),
              "share of all welfare points")
_ratio_metric("diplomacy", "BIR", PERCENT, ("betrayal_actions",), ("total_actions",),
              "actions that broke an agreement")
_ratio_metric("diplomacy", "ASR", PERCENT, ("alliance_duration",), ("total_game_duration",),
              "share of the game spent allied")
_identity_metric("diplomacy", "AD", COUNT, "alliance_duration", "turns spent allied")

# -- Werewolf -------------------------------------------------------------------
_ratio_metric("werewolf", "IRP", PERCENT, ("correct_identifications",),
              ("total_identification_attempts",), "votes aimed at a werewolf")
_ratio_metric("werewolf", "KSR", PERCENT, ("key_role_survived",), ("total_key_role_games",),
              "key-role games survived")
_ratio_metric("werewolf", "VSS", PERCENT, ("successful_votes",), ("total_critical_votes",),
              "decisive votes against the other team")

# -- Stratego -------------------------------------------------------------------
PIECE_COUNTERS = tuple(f"total_pieces_{r.title}" for r in Rank)
TPCV_WEIGHTS = {f"total_pieces_{r.title}": r.points for r in Rank if r.points}


def _tpcv(c: Counters) -> float:
    return float(sum(w * _get(c, k, "TPCV") for k, w in TPCV_WEIGHTS.items()))


_ratio_metric("stratego", "CPR", PERCENT, ("critical_pieces_alive",), ("total_critical_pieces",),
              "critical pieces still on the board")
_register("stratego", MetricSpec(
    "TPCV", POINTS, _tpcv, tuple(TPCV_WEIGHTS), tuple(TPCV_WEIGHTS), (),
    "rank-weighted value of surviving pieces",
))
_shared("stratego")


GAMES = tuple(REGISTRY)

KNOWN_COUNTERS: frozenset[str] = frozenset(
    {k for specs in REGISTRY.values() for s in specs.values() for k in s.counters}
    | set(PIECE_COUNTERS)
    | {"model_outputs", "effective_actions", "live_pieces_num", "live_pieces_score"}
)


def metric_spec(metric_id: str, game_id: str | None = None) -> MetricSpec:
    if game_id is not None:
        try:
            return REGISTRY[game_id][metric_id]
        except KeyError:
            raise KeyError(f"no metric {metric_id!r} for game {game_id!r}") from None
    for specs in REGISTRY.values():
        if metric_id in specs:
            return specs[metric_id]
    raise KeyError(f"unknown metric {metric_id!r}")


def metric_ids(game_id: str) -> list[str]:
    if game_id not in REGISTRY:
        raise KeyError(f"no metrics registered for game {game_id!r}")
    return list(REGISTRY[game_id])


def compute_metric(metric_id: str, counters: Counters, game_id: str | None = None) -> MetricValue:
    """Evaluate one metric; raises on missing counters or zero denominators."""
    spec = metric_spec(metric_id, game_id)
    return MetricValue(metric_id, spec.fn(counters), spec.unit)


def game_metrics(game_id: str, counters: Counters) -> dict[str, MetricValue]:
    """Evaluate every metric of ``game_id``.

    Undefined metrics come back with a NaN value so callers can exclude
    them; missing counters still raise.
    """
    out = {}
    for metric_id, spec in REGISTRY[game_id].items():
        try:
            out[metric_id] = MetricValue(metric_id, spec.fn(counters), spec.unit)
        except UndefinedMetricError:
            out[metric_id] = MetricValue(metric_id, math.nan, spec.unit)
    return out


def sc2_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("sc2", c)


def civ_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("civ", c)


def sf3_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("sf3", c)


def diplomacy_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("diplomacy", c)


def werewolf_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("werewolf", c)


def stratego_metrics(c: Counters) -> dict[str, MetricValue]:
    return game_metrics("stratego", c)

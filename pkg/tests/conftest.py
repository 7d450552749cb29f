from __future__ import annotations

import random as _random

import pytest

from stratharness.agents.base import Agent
from stratharness.agents.types import AgentKind, AgentSpec
from stratharness.core.config import ScenarioConfig
from stratharness.core.types import Decision
from stratharness.errors import AgentFailure

# Red's view from a recorded game, red on top rows, blue pieces hidden.
BOARD_RED_TOP = """
  ,  c0 ,  c1 ,  c2 ,  c3 ,  c4 ,  c5 ,  c6 ,  c7 ,  c8 ,  c9
r0, R(²), R(¹), R(6), R(¹), R(¹), R(o), R(6), R(²), R(o), R(¶)
r1, R(o), R(o), R(4), R(s), R(4), R(3), R(4), R(5), R(9), R(o)
r2, R(3), R(¹), R(²), R(4), R(7), R(¹), R(¹), R(¹), R(6), R(¹)
r3, R(o), ...., R(7), R(²), R(3), R(5), R(8), R(²), R(3), R(5)
r4, ...., R(5), ~~~~, ~~~~, ...., ...., ~~~~, ~~~~, ...., ....
r5, ...., ...., ~~~~, ~~~~, ...., ...., ~~~~, ~~~~, B(#), ....
r6, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), ...., B(#)
r7, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#)
r8, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#)
r9, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#)
"""

LISTING_RED_TOP = """
Scout 'R(¹)' at position 2,1  could move to: 3 1
Colonel 'R(7)' at position 3,2  could move to: 3 1
Sergeant  'R(3) ' at position 3,4  could move to: 4 4
Captain  'R(5) ' at position 3,5  could move to: 4 5
Sergeant  'R(3) ' at position 3,8  could move to: 4 8
Captain  'R(5) ' at position 3,9  could move to: 4 9
Captain  'R(5) ' at position 4,1  could move to any of: 3 1, 5 1, 4 0
"""

# Red's view, red on the bottom rows, one blue bomb revealed at (3,0).
BOARD_RED_BOTTOM = """
  ,  c0 ,  c1 ,  c2 ,  c3 ,  c4 ,  c5 ,  c6 ,  c7 ,  c8 ,  c9
r0, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#)
r1, B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#), B(#)
r2, B(#), B(#), B(#), B(#), ...., B(#), B(#), B(#), B(#), B(#)
r3, B(o), ...., B(#), B(#), B(#), B(#), B(#), B(#), ...., B(#)
r4, R(5), ...., ~~~~, ~~~~, ...., ...., ~~~~, ~~~~, ...., ....
r5, ...., ...., ~~~~, ~~~~, ...., ...., ~~~~, ~~~~, ...., ....
r6, R(7), ...., R(s), R(5), R(4), R(6), R(6), R(²), R(3), R(7)
r7, ...., R(9), R(o), R(4), R(5), R(¹), R(8), R(5), R(o), R(¹)
r8, R(¹), R(o), R(¶), R(o), R(¹), R(¹), R(6), R(²), R(4), R(¹)
r9, R(¹), R(3), R(o), R(3), R(²), R(4), R(²), R(o), R(3), R(²)
"""

LISTING_RED_BOTTOM = """
Captain  'R(5) ' at position  '4,0 '  could move to any of: 3 0, 5 0, 4 1
Colonel  'R(7) ' at position  '6,0 '  could move to any of: 5 0, 7 0, 6 1
Spy  'R(s) ' at position  '6,2 '  could move to: 6 1
Lieutenant  'R(4) ' at position  '6,4 '  could move to: 5 4
Major  'R(6) ' at position  '6,5 '  could move to: 5 5
Sergeant  'R(3) ' at position  '6,8 '  could move to: 5 8
Colonel  'R(7) ' at position  '6,9 '  could move to: 5 9
Marshall  'R(9) ' at position  '7,1 '  could move to any of: 6 1, 7 0
Scout  'R(¹) ' at position  '8,0 '  could move to: 7 0
"""


def scenario(game: str = "stratego", name: str | None = None, seed: int = 7, runs: int = 1,
             max_steps: int = 200, agents: dict | None = None, **scene) -> ScenarioConfig:
    """Small scenario builder; every seat defaults to a seeded random agent."""
    bindings = agents if agents is not None else {"*": AgentSpec(AgentKind.RANDOM)}
    return ScenarioConfig(
        name=name or f"{game}_test",
        game_id=game,
        seed=seed,
        runs=runs,
        max_steps=max_steps,
        scene_variables=scene,
        agent_bindings=bindings,
    )


@pytest.fixture
def make_scenario():
    return scenario


# -- scoring fuzz helpers ------------------------------------------------------

FUZZ_METRICS = {
    "werewolf": ("IRP", "KSR", "VSS"),
    "stratego": ("CPR", "TPCV", "WR", "GA"),
    "sc2": ("RPM", "SUR", "APM"),
    "sf3": ("AHR", "HCR"),
}


def _split(rng, n: int) -> list[float]:
    """n weights summing to exactly 1 (the last absorbs rounding)."""
    raw = [rng.uniform(0.05, 1.0) for _ in range(n)]
    total = sum(raw)
    ws = [r / total for r in raw[:-1]]
    ws.append(1.0 - sum(ws))
    return ws


def fuzz_case(rng, max_dims: int = 4, max_scen: int = 3, max_k: int = 3):
    """A random valid scoring config (as a dict) and matching raw run values.

    Returns ``(config_dict, runs)`` where runs is a list of
    ``(game, scenario, run, {metric: value})``; values may fall outside
    their bounds so clamping is exercised.
    """
    n_dims = rng.randint(1, max_dims)
    dims, runs = [], []
    for di, W in enumerate(_split(rng, n_dims)):
        n_sc = rng.randint(1, max_scen)
        scenarios = []
        for si, w in enumerate(_split(rng, n_sc)):
            game = rng.choice(sorted(FUZZ_METRICS))
            ids = rng.sample(FUZZ_METRICS[game], rng.randint(1, len(FUZZ_METRICS[game])))
            metrics, bounds = [], {}
            for m in ids:
                lo = rng.uniform(-50, 50)
                hi = lo + rng.uniform(1, 200)
                bounds[m] = (lo, hi)
                metrics.append({"id": m, "bounds": [lo, hi], "weight": rng.uniform(0.2, 2.0)})
            name = f"s{di}_{si}"
            k = rng.randint(1, max_k)
            scenarios.append({"game": game, "scenario": name, "w": w, "k": k, "metrics": metrics})
            for run in range(k):
                values = {}
                for m, (lo, hi) in bounds.items():
                    span = hi - lo
                    values[m] = rng.uniform(lo - 0.2 * span, hi + 0.2 * span)
                runs.append((game, name, run, values))
        dims.append({"name": f"D{di}", "W": W, "beta": rng.uniform(0.05, 1.0), "scenarios": scenarios})
    return {"dimensions": dims}, runs


def oracle_scores(config: dict, runs) -> tuple[dict[str, float], float]:
    """Straight transcription of the weighted capability formula.

    Per scenario: mean raw value over its k runs, clamp to bounds,
    min-max normalize, weighted mean over the scenario's metrics. Per
    dimension: beta times the w-weighted sum, on a 0-100 scale. Overall:
    W-weighted sum of dimension scores.
    """
    table: dict[tuple[str, str], list[dict[str, float]]] = {}
    for game, name, _run, values in runs:
        table.setdefault((game, name), []).append(values)
    dim_scores = {}
    for d in config["dimensions"]:
        total = 0.0
        for s in d["scenarios"]:
            rows = table[(s["game"], s["scenario"])][: s["k"]]
            num = den = 0.0
            for m in s["metrics"]:
                lo, hi = m["bounds"]
                mean = sum(r[m["id"]] for r in rows) / len(rows)
                clamped = min(max(mean, lo), hi)
                num += m["weight"] * (clamped - lo) / (hi - lo)
                den += m["weight"]
            total += s["w"] * num / den
        dim_scores[d["name"]] = 100.0 * d["beta"] * total
    overall = sum(d["W"] * dim_scores[d["name"]] for d in config["dimensions"])
    return dim_scores, overall


# -- test agents -------------------------------------------------------------------


class NoisyAgent(Agent):
    """Each model output is an invalid action with probability ``p_invalid``."""

    kind = "noisy"

    def __init__(self, seed: int, p_invalid: float = 0.3):
        super().__init__()
        self.rng = _random.Random(seed)
        self.p_invalid = p_invalid
        self.outputs = 0
        self.invalid = 0

    def decide(self, observation, feedback=None):
        self.outputs += 1
        if self.rng.random() < self.p_invalid:
            self.invalid += 1
            return Decision.single("not a legal action")
        return Decision.single(self.rng.choice(observation.legal_actions))


class FailingAgent(Agent):
    """Raises AgentFailure on every query, as a dead endpoint would."""

    kind = "failing"

    def decide(self, observation, feedback=None):
        raise AgentFailure("endpoint unreachable")

"""Regenerate configs/external_demo.jsonl: synthetic counter logs for the
games that have no built-in engine, ten runs per default scoring scenario."""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path


def sc2(rng: random.Random) -> dict[str, float]:
    minutes = rng.randint(12, 30)
    minerals = rng.randint(600, 1100) * minutes
    vespene = rng.randint(150, 450) * minutes
    attempts = rng.randint(300, 900)
    ok = int(attempts * rng.uniform(0.8, 0.99))
    return {
        "collected_minerals": minerals, "collected_vespene": vespene,
        "spent_minerals": int(minerals * rng.uniform(0.5, 0.95)),
        "spent_vespene": int(vespene * rng.uniform(0.4, 0.9)),
        "supply_used": rng.randint(40, 190), "supply_cap": 200,
        "available_technologies": rng.randint(4, 30), "total_technologies": 40,
        "game_time_minutes": minutes,
        "model_outputs": rng.randint(5, 40) * minutes, "effective_actions": rng.randint(3, 30) * minutes,
        "matches_won": rng.random() < 0.5, "total_matches": 1,
        "successful_groundings": ok, "total_grounding_attempts": attempts,
    }


def civ(rng: random.Random) -> dict[str, float]:
    t = rng.randint(100, 300)
    attempts = rng.randint(200, 600)
    return {
        "economics": rng.randint(20, 80) * t, "cities": int(t * rng.uniform(0.02, 0.5)),
        "researched_techs": rng.randint(10, 70), "total_techs": 80,
        "settled_area": rng.randint(50, 600), "land_area": 1000,
        "military_units": int(t * rng.uniform(0.2, 3.5)), "game_time": t,
        "matches_won": rng.random() < 0.4, "total_matches": 1,
        "successful_groundings": int(attempts * rng.uniform(0.7, 0.98)), "total_grounding_attempts": attempts,
    }


def sf3(rng: random.Random) -> dict[str, float]:
    attacks = rng.randint(40, 160)
    supers = rng.randint(2, 12)
    attempts = rng.randint(100, 400)
    return {
        "successful_hits": int(attacks * rng.uniform(0.2, 0.7)), "total_attacks": attacks,
        "successful_super_moves": rng.randint(0, supers), "total_super_moves": supers,
        "initial_health": 160, "final_health": rng.randint(0, 160), "total_fight_time": rng.randint(20, 99),
        "matches_won": rng.random() < 0.5, "total_matches": 1,
        "successful_groundings": int(attempts * rng.uniform(0.75, 1.0)), "total_grounding_attempts": attempts,
    }


def diplomacy(rng: random.Random) -> dict[str, float]:
    total = rng.randint(20, 40)
    actions = rng.randint(50, 200)
    welfare = rng.randint(100, 300)
    return {
        "control_centers": rng.randint(2, 18), "player_welfare_score": int(welfare * rng.uniform(0.05, 0.4)),
        "total_welfare_score": welfare, "betrayal_actions": int(actions * rng.uniform(0.0, 0.2)),
        "total_actions": actions, "alliance_duration": rng.randint(0, total), "total_game_duration": total,
    }


SCENARIOS = [
    ("sc2", "Macro", sc2), ("sc2", "Rush", sc2), ("sc2", "Random", sc2),
    ("civ", "World", civ), ("civ", "Small-Scale", civ),
    ("sf3", "Fast-Paced", sf3), ("sf3", "Sync", sf3),
    ("diplomacy", "Negotiation", diplomacy),
]


def main(path: str) -> None:
    rng = random.Random(20240611)
    lines = []
    for game, scenario, make in SCENARIOS:
        for run in range(10):
            counters = {k: float(v) for k, v in make(rng).items()}
            lines.append(json.dumps({"game_id": game, "scenario": scenario, "run": run,
                                     "seat": "player", "counters": counters}, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "configs/external_demo.jsonl")

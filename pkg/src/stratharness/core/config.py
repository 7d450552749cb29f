"""Scenario configuration: dataclass, YAML batch loading and validation.

A batch file holds a ``scenarios`` list; each entry looks like::

    name: stratego_random
    game: stratego
    seed: 7
    runs: 10
    max_steps: 400
    evaluated_seat: red
    scene_variables: {placement: random}
    agents:
      red: {kind: random}
      "*": {kind: scripted, script: []}

``"*"`` binds every seat not named explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..agents.types import AgentSpec
from ..errors import ConfigError
from .env import env_class, registered_games

MAX_SEED = (1 << 64) - 1
WILDCARD = "*"

_FIELDS = {
    "name", "game", "seed", "runs", "max_steps", "evaluated_seat",
    "scene_variables", "agents", "description",
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    game_id: str
    seed: int
    runs: int = 1
    max_steps: int = 1000
    scene_variables: Mapping[str, Any] = field(default_factory=dict)
    agent_bindings: Mapping[str, AgentSpec] = field(default_factory=dict)
    evaluated_seat: str | None = None
    description: str = ""

    def seats(self) -> tuple[str, ...]:
        return env_class(self.game_id).seats_for(self.scene_variables)

    def resolved_bindings(self) -> dict[str, AgentSpec]:
        """Seat -> spec with the wildcard expanded."""
        seats = self.seats()
        out = {}
        for seat in seats:
            if seat in self.agent_bindings:
                out[seat] = self.agent_bindings[seat]
            elif WILDCARD in self.agent_bindings:
                out[seat] = self.agent_bindings[WILDCARD]
        return out

    @property
    def scored_seat(self) -> str:
        return self.evaluated_seat or self.seats()[0]

    def validate(self) -> list[str]:
        """Every broken invariant as ``<scenario>.<field>: <problem>``."""
        where = self.name or "<unnamed>"
        problems = []
        if not self.name or any(ch in self.name for ch in "/\\ "):
            problems.append(f"{where}.name: must be non-empty without spaces or slashes")
        if self.game_id not in registered_games():
            problems.append(
                f"{where}.game: {self.game_id!r} is not a registered game "
                f"({', '.join(registered_games())})"
            )
            return problems
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            problems.append(f"{where}.seed: must be an unsigned 64-bit integer")
        if not isinstance(self.runs, int) or self.runs < 1:
            problems.append(f"{where}.runs: must be >= 1")
        if not isinstance(self.max_steps, int) or self.max_steps < 1:
            problems.append(f"{where}.max_steps: must be >= 1")
        try:
            seats = self.seats()
        except ConfigError as exc:
            problems.append(f"{where}.scene_variables: {exc}")
            return problems
        for seat in self.agent_bindings:
            if seat != WILDCARD and seat not in seats:
                problems.append(f"{where}.agents.{seat}: not a seat of {self.game_id} ({', '.join(seats)})")
        bound = self.resolved_bindings()
        for seat in seats:
            if seat not in bound:
                problems.append(f"{where}.agents.{seat}: seat has no agent binding")
        if self.evaluated_seat is not None and self.evaluated_seat not in seats:
            problems.append(f"{where}.evaluated_seat: {self.evaluated_seat!r} is not a seat")
        if not problems:
            try:
                env_class(self.game_id)(self.scene_variables, 0)
            except ConfigError as exc:
                problems.append(f"{where}.scene_variables: {exc}")
        return problems

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "game": self.game_id,
            "seed": self.seed,
            "runs": self.runs,
            "max_steps": self.max_steps,
            "scene_variables": dict(self.scene_variables),
            "agents": {seat: spec.to_dict() for seat, spec in self.agent_bindings.items()},
        }
        if self.evaluated_seat is not None:
            out["evaluated_seat"] = self.evaluated_seat
        if self.description:
            out["description"] = self.description
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], index: int = 0) -> ScenarioConfig:
        where = f"scenarios[{index}]"
        if not isinstance(data, Mapping):
            raise ConfigError(f"{where}: must be a mapping")
        extra = set(data) - _FIELDS
        if extra:
            raise ConfigError(f"{where}: unknown field(s) {', '.join(sorted(extra))}")
        for required in ("name", "game", "seed"):
            if required not in data:
                raise ConfigError(f"{where}.{required}: required")
        agents = data.get("agents") or {}
        if not isinstance(agents, Mapping):
            raise ConfigError(f"{where}.agents: must be a mapping of seat to agent spec")
        bindings = {}
        for seat, spec in agents.items():
            if not isinstance(spec, Mapping):
                raise ConfigError(f"{where}.agents.{seat}: must be a mapping")
            try:
                bindings[str(seat)] = AgentSpec.from_dict(spec)
            except (ConfigError, TypeError) as exc:
                raise ConfigError(f"{where}.agents.{seat}: {exc}") from None
        scene = data.get("scene_variables") or {}
        if not isinstance(scene, Mapping):
            raise ConfigError(f"{where}.scene_variables: must be a mapping")
        return cls(
            name=str(data["name"]),
            game_id=str(data["game"]),
            seed=data["seed"],
            runs=data.get("runs", 1),
            max_steps=data.get("max_steps", 1000),
            scene_variables=dict(scene),
            agent_bindings=bindings,
            evaluated_seat=data.get("evaluated_seat"),
            description=str(data.get("description", "")),
        )


def parse_override(text: str) -> tuple[list[str], Any]:
    """``a.b=value`` -> (["a", "b"], yaml-parsed value)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not key=value")
    key, _, raw = text.partition("=")
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"override {text!r} has an empty key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else ""
    except yaml.YAMLError as exc:
        raise ConfigError(f"override {text!r}: {exc}") from None
    return path, value


def _set_path(target: dict, path: list[str], value: Any) -> None:
    node = target
    for part in path[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[path[-1]] = value


def apply_overrides(raw_scenarios: list[dict], overrides: list[str]) -> None:
    """Apply ``--set`` overrides in place.

    ``key=value`` hits every scenario; ``<scenario>.key=value`` only the
    named one.
    """
    names = {s.get("name") for s in raw_scenarios}
    for text in overrides:
        path, value = parse_override(text)
        if path[0] in names and len(path) > 1:
            for s in raw_scenarios:
                if s.get("name") == path[0]:
                    _set_path(s, path[1:], value)
        else:
            for s in raw_scenarios:
                _set_path(s, path, value)


def load_batch_data(data: Any, overrides: list[str] | None = None, seed: int | None = None,
                    runs: int | None = None) -> list[ScenarioConfig]:
    if not isinstance(data, Mapping) or not isinstance(data.get("scenarios"), list):
        raise ConfigError("batch config must be a mapping with a 'scenarios' list")
    raw = [dict(s) if isinstance(s, Mapping) else s for s in data["scenarios"]]
    if not raw:
        raise ConfigError("batch config has no scenarios")
    if overrides:
        apply_overrides(raw, overrides)
    configs = [ScenarioConfig.from_dict(s, i) for i, s in enumerate(raw)]
    if seed is not None:
        configs = [replace(c, seed=seed) for c in configs]
    if runs is not None:
        configs = [replace(c, runs=runs) for c in configs]
    problems = validate_batch(configs)
    if problems:
        raise ConfigError("invalid scenario config:\n  " + "\n  ".join(problems))
    return configs


def validate_batch(configs: list[ScenarioConfig]) -> list[str]:
    problems = []
    seen = set()
    for c in configs:
        if c.name in seen:
            problems.append(f"{c.name}.name: duplicate scenario name")
        seen.add(c.name)
        problems.extend(c.validate())
    return problems


def load_batch(path: str | Path, overrides: list[str] | None = None, seed: int | None = None,
               runs: int | None = None) -> list[ScenarioConfig]:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return load_batch_data(data, overrides, seed, runs)

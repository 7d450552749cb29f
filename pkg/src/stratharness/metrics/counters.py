"""CounterRecord: the named counters one seat accumulated in one match."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..errors import SchemaError


@dataclass(frozen=True)
class CounterRecord:
    game_id: str
    scenario: str
    run: int
    counters: Mapping[str, float]
    seat: str = ""
    match_id: str | None = None
    step_index: int | None = None
    labels: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for name, value in self.counters.items():
            v = float(value)
            if math.isnan(v) or math.isinf(v) or v < 0:
                raise SchemaError(f"counter {name!r} must be a finite non-negative number, got {value!r}")
            clean[name] = v
        object.__setattr__(self, "counters", dict(sorted(clean.items())))
        object.__setattr__(self, "labels", dict(self.labels))

    @property
    def key(self) -> tuple[str, str, int, str]:
        return (self.game_id, self.scenario, self.run, self.seat)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "game_id": self.game_id,
            "scenario": self.scenario,
            "run": self.run,
            "seat": self.seat,
            "counters": dict(self.counters),
        }
        if self.match_id is not None:
            out["match_id"] = self.match_id
        if self.step_index is not None:
            out["step_index"] = self.step_index
        if self.labels:
            out["labels"] = dict(self.labels)
        return out

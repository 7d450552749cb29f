"""Data contracts flowing through the episode loop."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

DRAW = "draw"


class EndReason(str, enum.Enum):
    OBJECTIVE_MET = "objective_met"
    ELIMINATION = "elimination"
    STEP_LIMIT = "step_limit"
    FORFEIT = "forfeit"


@dataclass(frozen=True)
class Observation:
    """What one seat sees before deciding.

    ``text_view`` is the prompt payload and must depend only on information
    the seat is entitled to. ``extras`` carries named fields used by prompt
    templates (player name, role, round number, ...).
    """

    actor: str
    step_index: int
    text_view: str
    legal_actions: tuple[str, ...]
    phase_tag: str
    counters: dict[str, float] = field(default_factory=dict)
    extras: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Decision:
    actions: tuple[str, ...]
    reasoning: str = ""
    messages: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError("a decision needs at least one action")
        object.__setattr__(self, "actions", tuple(self.actions))

    @classmethod
    def single(cls, action: str, reasoning: str = "") -> Decision:
        return cls(actions=(action,), reasoning=reasoning)


@dataclass
class StepOutcome:
    """Result of applying one grounded action to an environment."""

    seat: str
    action: str
    action_type: str
    terminal: bool = False
    events: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class MatchResult:
    match_id: str
    winner: str
    end_reason: EndReason
    steps_taken: int
    final_counters: dict[str, dict[str, float]]
    trajectory_ref: str | None = None
    forfeited_by: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "match_id": self.match_id,
            "winner": self.winner,
            "end_reason": self.end_reason.value,
            "steps_taken": self.steps_taken,
            "final_counters": self.final_counters,
            "trajectory_ref": self.trajectory_ref,
            "forfeited_by": self.forfeited_by,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MatchResult:
        return cls(
            match_id=data["match_id"],
            winner=data["winner"],
            end_reason=EndReason(data["end_reason"]),
            steps_taken=int(data["steps_taken"]),
            final_counters={s: dict(c) for s, c in data["final_counters"].items()},
            trajectory_ref=data.get("trajectory_ref"),
            forfeited_by=data.get("forfeited_by"),
        )

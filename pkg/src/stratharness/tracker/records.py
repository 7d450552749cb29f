"""Step records and the trajectory file layout.

A trajectory is a JSON Lines file: one ``header`` record, one ``step``
record per applied action, then one ``result`` record. Counter snapshots
are flattened to ``"<seat>/<counter>"`` keys so a single mapping covers
every seat.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..errors import SchemaError

FORMAT_VERSION = 1

ACTION_TYPES = (
    "produce", "build", "research", "scout", "combat",
    "move", "vote", "night_action", "debate", "other",
)


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def flatten_counters(per_seat: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    return {
        f"{seat}/{name}": float(value)
        for seat, counters in sorted(per_seat.items())
        for name, value in sorted(counters.items())
    }


def unflatten_counters(flat: Mapping[str, float]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for key, value in flat.items():
        seat, _, name = key.partition("/")
        out.setdefault(seat, {})[name] = value
    return out


def counter_delta(before: Mapping[str, float], after: Mapping[str, float]) -> dict[str, float]:
    """Keys whose value changed, mapped to ``after - before``."""
    delta = {}
    for key in sorted(set(before) | set(after)):
        d = after.get(key, 0.0) - before.get(key, 0.0)
        if d != 0:
            delta[key] = d
    return delta


def apply_delta(context: Mapping[str, float], delta: Mapping[str, float]) -> dict[str, float]:
    out = dict(context)
    for key, d in delta.items():
        out[key] = out.get(key, 0.0) + d
    return out


@dataclass
class StepRecord:
    match_id: str
    step_index: int
    phase_tag: str
    actor: str
    observation_digest: str
    parsed_action: str | None
    action_type: str
    legality: dict[str, Any]
    decision_context: dict[str, float]
    outcome: dict[str, float]
    prompt_text: str | None = None
    raw_response: str | None = None
    prompt_digest: str | None = None
    reasoning: str | None = None
    events: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.step_index < 0:
            raise ValueError("step_index must be non-negative")
        if self.action_type not in ACTION_TYPES:
            raise ValueError(f"unknown action type {self.action_type!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "record": "step",
            "match_id": self.match_id,
            "step_index": self.step_index,
            "phase_tag": self.phase_tag,
            "actor": self.actor,
            "observation_digest": self.observation_digest,
            "parsed_action": self.parsed_action,
            "action_type": self.action_type,
            "legality": self.legality,
            "decision_context": self.decision_context,
            "outcome": self.outcome,
            "prompt_text": self.prompt_text,
            "raw_response": self.raw_response,
            "prompt_digest": self.prompt_digest,
            "reasoning": self.reasoning,
            "events": self.events,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], line: int | None = None) -> StepRecord:
        required = (
            "match_id", "step_index", "phase_tag", "actor", "observation_digest",
            "parsed_action", "action_type", "legality", "decision_context", "outcome",
        )
        for name in required:
            if name not in data:
                raise SchemaError("missing field", line=line, field=name)
        try:
            return cls(
                match_id=str(data["match_id"]),
                step_index=int(data["step_index"]),
                phase_tag=str(data["phase_tag"]),
                actor=str(data["actor"]),
                observation_digest=str(data["observation_digest"]),
                parsed_action=data["parsed_action"],
                action_type=str(data["action_type"]),
                legality=dict(data["legality"]),
                decision_context={k: float(v) for k, v in data["decision_context"].items()},
                outcome={k: float(v) for k, v in data["outcome"].items()},
                prompt_text=data.get("prompt_text"),
                raw_response=data.get("raw_response"),
                prompt_digest=data.get("prompt_digest"),
                reasoning=data.get("reasoning"),
                events=list(data.get("events") or []),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(str(exc), line=line) from None

    @property
    def counters_after(self) -> dict[str, float]:
        return apply_delta(self.decision_context, self.outcome)

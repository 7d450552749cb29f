"""Human-readable replay of a recorded trajectory.

The default view is what a spectator could know. Stratego hides the
identity of a piece that merely moves; Werewolf hides night actions,
votes cast before the tally and any event addressed to specific players.
``omniscient=True`` shows everything that was recorded.
"""

from __future__ import annotations

from typing import Any, Iterator

from .records import StepRecord
from .store import Trajectory

_HIDDEN_WEREWOLF_TYPES = ("night_action", "vote")


def _stratego_detail(event: dict[str, Any], omniscient: bool) -> str:
    kind = event.get("kind", "move")
    if kind == "move":
        return f"({event.get('piece', '?')})" if omniscient else ""
    result = str(event.get("result", "")).replace("_", " ")
    return f"({event.get('piece', '?')} attacks {event.get('defender', '?')}: {result})"


def _werewolf_event(event: dict[str, Any], omniscient: bool) -> str | None:
    private = event.get("visible_to") is not None
    if private and not omniscient:
        return None
    text = str(event.get("text", ""))
    if private:
        return f"[to {', '.join(event['visible_to'])}] {text}"
    return text


def _legality(step: StepRecord) -> str:
    leg = step.legality
    if step.parsed_action is None:
        return "forfeit"
    if leg.get("substituted"):
        return "substituted"
    tag = "ok" if leg.get("succeeded") else "fallback" if leg.get("fallback_used") else "failed"
    return f"{tag} {leg.get('successes', 0)}/{leg.get('attempts', 0)}"


def _deltas(step: StepRecord) -> str:
    if not step.outcome:
        return ""
    return " ".join(f"{k}{v:+g}" for k, v in sorted(step.outcome.items()))


def _public_events(step: StepRecord, indent: str) -> Iterator[str]:
    for event in step.events:
        text = _werewolf_event(event, omniscient=False)
        if text is not None:
            yield f"{indent}{text}"


def _step_lines(game_id: str | None, step: StepRecord, omniscient: bool) -> Iterator[str]:
    prefix = f"{step.step_index:5d} {step.phase_tag:<10} {step.actor:<8}"
    indent = " " * (len(prefix) + 1) + "> "
    hidden = (game_id == "werewolf" and not omniscient
              and step.action_type in _HIDDEN_WEREWOLF_TYPES)
    if hidden:
        yield f"{prefix} (hidden {step.action_type})"
        yield from _public_events(step, indent)
        return
    if step.parsed_action is None:
        yield f"{prefix} - other [forfeit] {step.legality.get('failure', '')}".rstrip()
        return
    detail = ""
    if game_id == "stratego":
        detail = " ".join(filter(None, (_stratego_detail(e, omniscient) for e in step.events)))
    line = f"{prefix} {step.parsed_action} {step.action_type} [{_legality(step)}]"
    if detail:
        line += f" {detail}"
    yield line
    deltas = _deltas(step)
    if deltas:
        yield f"{indent}{deltas}"
    if game_id == "werewolf":
        for event in step.events:
            text = _werewolf_event(event, omniscient)
            if text is not None:
                yield f"{indent}{text}"


def render_replay(trajectory: Trajectory, omniscient: bool = False) -> list[str]:
    """Lines describing the match from the header to the result."""
    header = trajectory.header or {}
    lines = [
        f"match {header.get('match_id', '?')}  game {header.get('game_id', '?')}  "
        f"scenario {header.get('scenario', '?')}  run {header.get('run', '?')}",
        f"seats: {', '.join(header.get('seats', []))}",
    ]
    env_header = header.get("env") or {}
    if omniscient and env_header.get("roles"):
        lines.append("roles: " + ", ".join(f"{k}={v}" for k, v in sorted(env_header["roles"].items())))
    for step in trajectory.steps:
        lines.extend(_step_lines(trajectory.game_id, step, omniscient))
    result = trajectory.result
    if result is None:
        lines.append(f"(incomplete trajectory{': ' + str(trajectory.error) if trajectory.error else ''})")
    elif result.get("aborted"):
        lines.append(f"aborted after {result.get('steps_taken')} steps: {result.get('error')}")
    else:
        lines.append(f"winner: {result.get('winner')}  ({result.get('end_reason')}, "
                     f"{result.get('steps_taken')} steps)")
    return lines

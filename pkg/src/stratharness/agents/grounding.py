"""Checking model actions against the legal set, with retry and fallback."""

from __future__ import annotations

import random
from typing import Callable, Sequence

from ..core.types import Decision
from ..errors import AgentFailure
from .types import GroundingPolicy, GroundingResult

Matcher = Callable[[str, str], bool]
Requery = Callable[[str], "Decision | None"]


def match_legal(action: str, legal_actions: Sequence[str], matches: Matcher | None = None) -> str | None:
    """Return the canonical legal encoding ``action`` denotes, or None."""
    if action in legal_actions:
        return action
    if matches is not None:
        for legal in legal_actions:
            if matches(action, legal):
                return legal
    return None


def retry_feedback(action: str | None) -> str:
    if action is None:
        return "Your previous reply could not be read. Answer again using the required JSON format."
    return f"Your previous choice {action!r} is not allowed right now. Choose again from the listed options."


def ground(
    decision: Decision | None,
    legal_actions: Sequence[str],
    policy: GroundingPolicy | str = GroundingPolicy.RETRY_THEN_RANDOM,
    *,
    requery: Requery | None = None,
    max_retries: int = 2,
    rng: random.Random | None = None,
    matches: Matcher | None = None,
) -> GroundingResult:
    """Ground the first action of ``decision``.

    ``decision`` is None when the model output could not be parsed; that
    still counts as one attempt. Each re-query through ``requery`` is one
    more attempt. Once the budget is spent a random legal action is
    substituted (``retry_then_random``) or AgentFailure is raised
    (``reject``).
    """
    policy = GroundingPolicy(policy)
    if not legal_actions:
        raise ValueError("cannot ground against an empty legal action set")
    attempts = 1
    current = decision
    while True:
        action = current.actions[0] if current is not None else None
        legal = match_legal(action, legal_actions, matches) if action is not None else None
        if legal is not None:
            return GroundingResult(attempts, True, legal, False, current)
        if policy is GroundingPolicy.REJECT:
            raise AgentFailure(f"action {action!r} is not legal and the policy is reject")
        if requery is None or attempts > max_retries:
            break
        attempts += 1
        current = requery(retry_feedback(action))
    rng = rng or random.Random(0)
    fallback = rng.choice(list(legal_actions))
    return GroundingResult(attempts, False, fallback, True, current)

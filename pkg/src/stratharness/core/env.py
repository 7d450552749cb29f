"""Game environment interface and registry."""

from __future__ import annotations

import abc
from typing import Any, Callable, ClassVar, Mapping

from ..errors import ConfigError
from .types import EndReason, Observation, StepOutcome

_REGISTRY: dict[str, type[GameEnv]] = {}


def register_env(cls: type[GameEnv]) -> type[GameEnv]:
    _REGISTRY[cls.game_id] = cls
    return cls


def registered_games() -> list[str]:
    _load_builtin()
    return sorted(_REGISTRY)


def env_class(game_id: str) -> type[GameEnv]:
    _load_builtin()
    try:
        return _REGISTRY[game_id]
    except KeyError:
        raise ConfigError(
            f"unknown game {game_id!r}; registered: {', '.join(sorted(_REGISTRY))}"
        ) from None


def make_env(game_id: str, scene_variables: Mapping[str, Any], seed: int) -> GameEnv:
    return env_class(game_id)(scene_variables, seed)


def _load_builtin() -> None:
    # Importing the game packages registers them.
    from ..games import stratego, werewolf  # noqa: F401


class GameEnv(abc.ABC):
    """A turn-based, partially observable game.

    The episode loop only talks to this surface: who moves next, what that
    seat may observe, which actions are legal, and how an action changes the
    state. Environments are confined to a single match.
    """

    game_id: ClassVar[str]

    def __init__(self, scene_variables: Mapping[str, Any], seed: int):
        self.scene_variables = dict(scene_variables)
        self.seed = seed
        self._winner: str | None = None
        self._end_reason: EndReason | None = None

    # -- seats and turn order -------------------------------------------
    @classmethod
    @abc.abstractmethod
    def seats_for(cls, scene_variables: Mapping[str, Any]) -> tuple[str, ...]:
        """Seats a scenario must bind agents to."""

    @property
    @abc.abstractmethod
    def seats(self) -> tuple[str, ...]: ...

    @abc.abstractmethod
    def current_seat(self) -> str | None:
        """Seat to act next, or None when terminal."""

    # -- observation / action -------------------------------------------
    @abc.abstractmethod
    def observe(self, seat: str, step_index: int) -> Observation: ...

    @abc.abstractmethod
    def legal_actions(self, seat: str) -> list[str]: ...

    def action_matches(self, action: str, legal: str) -> bool:
        return action == legal

    def is_legal(self, seat: str, action: str) -> bool:
        return any(self.action_matches(action, a) for a in self.legal_actions(seat))

    @abc.abstractmethod
    def step(self, seat: str, action: str) -> StepOutcome:
        """Apply ``action`` for ``seat``; raise IllegalActionError without mutating."""

    @abc.abstractmethod
    def classify(self, seat: str, action: str) -> str:
        """Action type of ``action`` in the current state (before applying it)."""

    # -- outcome ---------------------------------------------------------
    def is_terminal(self) -> bool:
        return self._end_reason is not None

    @property
    def winner(self) -> str | None:
        return self._winner

    @property
    def end_reason(self) -> EndReason | None:
        return self._end_reason

    def _finish(self, winner: str, reason: EndReason) -> None:
        if self._end_reason is None:
            self._winner = winner
            self._end_reason = reason
            self.on_finish()

    def on_finish(self) -> None:
        """Hook for terminal bookkeeping (win counters, survival flags)."""

    @abc.abstractmethod
    def step_limit_winner(self) -> str:
        """Winner (or DRAW) when the step cap is reached."""

    def finish_step_limit(self) -> None:
        self._finish(self.step_limit_winner(), EndReason.STEP_LIMIT)

    @abc.abstractmethod
    def forfeit_winner(self, seat: str) -> str: ...

    def forfeit(self, seat: str) -> None:
        self._finish(self.forfeit_winner(seat), EndReason.FORFEIT)

    def failure_substitute(self, seat: str) -> str | None:
        """Action recorded when an agent fails outright; None means forfeit."""
        return None

    # -- bookkeeping -----------------------------------------------------
    @abc.abstractmethod
    def counters(self, seat: str) -> dict[str, float]: ...

    def all_counters(self) -> dict[str, dict[str, float]]:
        return {seat: self.counters(seat) for seat in self.seats}

    @abc.abstractmethod
    def header(self) -> dict[str, Any]:
        """Omniscient initial-state description persisted with the trajectory."""

    def check_invariants(self) -> None:
        """Raise EnvInvariantError if the state is corrupt."""


EnvFactory = Callable[[Mapping[str, Any], int], GameEnv]

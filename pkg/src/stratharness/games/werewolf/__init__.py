"""Eight-player Werewolf."""

from __future__ import annotations

from .env import DEFAULT_PLAYERS, WEREWOLF_COUNTERS, WerewolfEnv
from .rules import (
    CENSUS,
    N_PLAYERS,
    VILLAGERS,
    WEREWOLVES,
    LogEntry,
    NightBuffer,
    Phase,
    Player,
    Role,
    VoteTally,
    WerewolfState,
    assign_roles,
    check_win,
    record_utterance,
    resolve_night,
    run_debate,
    tally_votes,
    team_of,
    werewolf_night_choice,
)

__all__ = [
    "CENSUS",
    "DEFAULT_PLAYERS",
    "N_PLAYERS",
    "VILLAGERS",
    "WEREWOLF_COUNTERS",
    "WEREWOLVES",
    "LogEntry",
    "NightBuffer",
    "Phase",
    "Player",
    "Role",
    "VoteTally",
    "WerewolfEnv",
    "WerewolfState",
    "assign_roles",
    "check_win",
    "record_utterance",
    "resolve_night",
    "run_debate",
    "tally_votes",
    "team_of",
    "werewolf_night_choice",
]

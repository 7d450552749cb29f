"""Eight-player Werewolf: roles, night resolution, voting, win detection."""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ...errors import AgentFailure, ConfigError, EnvInvariantError


class Role(str, enum.Enum):
    WEREWOLF = "Werewolf"
    SEER = "Seer"
    DOCTOR = "Doctor"
    VILLAGER = "Villager"


class Phase(str, enum.Enum):
    NIGHT = "Night"
    DAY_DEBATE = "Day_Debate"
    DAY_VOTE = "Day_Vote"
    TERMINAL = "Terminal"


VILLAGERS = "villagers"
WEREWOLVES = "werewolves"

CENSUS: dict[Role, int] = {Role.WEREWOLF: 2, Role.SEER: 1, Role.DOCTOR: 1, Role.VILLAGER: 4}
N_PLAYERS = sum(CENSUS.values())


def team_of(role: Role) -> str:
    return WEREWOLVES if role is Role.WEREWOLF else VILLAGERS


@dataclass
class Player:
    name: str
    role: Role
    alive: bool = True


@dataclass(frozen=True)
class LogEntry:
    """One announcement or observation. ``visible_to`` None means public."""

    round: int
    phase: str
    actor: str
    kind: str
    text: str
    visible_to: tuple[str, ...] | None = None

    def visible(self, name: str) -> bool:
        return self.visible_to is None or name in self.visible_to

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "phase": self.phase,
            "actor": self.actor,
            "kind": self.kind,
            "text": self.text,
            "visible_to": list(self.visible_to) if self.visible_to is not None else None,
        }


@dataclass
class NightBuffer:
    remove_proposals: dict[str, str] = field(default_factory=dict)
    protect_target: str | None = None
    investigate_pair: tuple[str, str] | None = None


@dataclass
class WerewolfState:
    players: list[Player]
    round: int = 0
    phase: Phase = Phase.NIGHT
    night_buffer: NightBuffer = field(default_factory=NightBuffer)
    log: list[LogEntry] = field(default_factory=list)
    reveal_on_death: bool = True

    def player(self, name: str) -> Player:
        for p in self.players:
            if p.name == name:
                return p
        raise KeyError(name)

    def living(self) -> list[Player]:
        return [p for p in self.players if p.alive]

    def living_names(self) -> list[str]:
        return [p.name for p in self.players if p.alive]

    def names_with(self, role: Role, alive_only: bool = True) -> list[str]:
        return [p.name for p in self.players if p.role is role and (p.alive or not alive_only)]

    def census(self) -> Counter[Role]:
        return Counter(p.role for p in self.players)

    @property
    def public_log(self) -> list[LogEntry]:
        return [e for e in self.log if e.visible_to is None]

    def private_log(self, name: str) -> list[LogEntry]:
        return [e for e in self.log if e.visible_to is not None and name in e.visible_to]

    def announce(self, kind: str, text: str, actor: str = "moderator") -> LogEntry:
        entry = LogEntry(self.round, self.phase.value, actor, kind, text)
        self.log.append(entry)
        return entry

    def tell(self, names: Iterable[str], kind: str, text: str, actor: str = "moderator") -> LogEntry:
        entry = LogEntry(self.round, self.phase.value, actor, kind, text, tuple(names))
        self.log.append(entry)
        return entry


@dataclass(frozen=True)
class VoteTally:
    votes: Mapping[str, str]
    living_count: int


def assign_roles(
    names: Sequence[str],
    seed: int,
    fixed_roles: Mapping[str, Role | str] | None = None,
    reveal_on_death: bool = True,
) -> WerewolfState:
    """Deal the fixed census uniformly at random.

    ``fixed_roles`` pins chosen players to roles (by swapping with another
    holder of that role) so a scenario can evaluate, say, the Seer seat.
    """
    names = list(names)
    if len(names) != N_PLAYERS or len(set(names)) != N_PLAYERS:
        raise ConfigError(f"werewolf needs exactly {N_PLAYERS} distinct player names")
    for n in names:
        if not n or any(ch.isspace() for ch in n):
            raise ConfigError(f"player name {n!r} must be a single non-empty token")
    roles = [role for role, k in CENSUS.items() for _ in range(k)]
    random.Random(seed).shuffle(roles)
    assigned = dict(zip(names, roles))
    pinned: set[str] = set()
    for name, role in (fixed_roles or {}).items():
        role = Role(role) if not isinstance(role, Role) else role
        if name not in assigned:
            raise ConfigError(f"fixed role for unknown player {name!r}")
        if assigned[name] is not role:
            donors = [n for n in names if assigned[n] is role and n not in pinned]
            if not donors:
                raise ConfigError(f"cannot pin {name!r} to {role.value}: census exhausted")
            donor = donors[0]
            assigned[donor], assigned[name] = assigned[name], role
        pinned.add(name)
    players = [Player(n, assigned[n]) for n in names]
    return WerewolfState(players=players, reveal_on_death=reveal_on_death)


def werewolf_night_choice(proposals: Mapping[str, str], rng: random.Random) -> str:
    """Collapse per-werewolf proposals into one removal target."""
    if not proposals:
        raise ValueError("no werewolf proposals")
    targets = sorted(set(proposals.values()))
    if len(targets) == 1:
        return targets[0]
    return rng.choice(targets)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise EnvInvariantError(msg)


def _death_text(state: WerewolfState, name: str) -> str:
    if state.reveal_on_death:
        return f" {name} was a {state.player(name).role.value}."
    return ""


def resolve_night(
    state: WerewolfState,
    remove_target: str,
    protect_target: str | None,
    investigate: tuple[str, str] | None,
) -> WerewolfState:
    """Apply the night's three actions atomically."""
    _require(state.phase is Phase.NIGHT, f"night actions during {state.phase.value}")
    living = set(state.living_names())
    _require(remove_target in living, f"removal target {remove_target!r} is not alive")
    _require(bool(state.names_with(Role.WEREWOLF)), "no living werewolf to remove anyone")
    if protect_target is not None:
        doctors = state.names_with(Role.DOCTOR)
        _require(bool(doctors), "protection without a living Doctor")
        _require(protect_target in living, f"protect target {protect_target!r} is not alive")
    if investigate is not None:
        seer, target = investigate
        _require(seer in living and state.player(seer).role is Role.SEER,
                 f"{seer!r} is not a living Seer")
        _require(target in living, f"investigate target {target!r} is not alive")
        role = state.player(target).role
        state.tell((seer,), "investigation", f"You investigated {target}: {target} is a {role.value}.")

    if protect_target == remove_target:
        state.announce("night_result", "Moderator Announcement: No one was removed from the game during the night.")
    else:
        state.player(remove_target).alive = False
        state.announce(
            "night_result",
            f"Moderator Announcement: The Werewolves removed {remove_target} from the game "
            f"during the night.{_death_text(state, remove_target)}",
        )
    state.night_buffer = NightBuffer()
    return state


def tally_votes(tally: VoteTally) -> str | None:
    """Strict majority of the living removes a player; anything else removes nobody."""
    if not tally.votes:
        return None
    counts = Counter(tally.votes.values())
    target, top = max(sorted(counts.items()), key=lambda kv: kv[1])
    return target if top * 2 > tally.living_count else None


def check_win(state: WerewolfState) -> str | None:
    wolves = sum(1 for p in state.players if p.alive and p.role is Role.WEREWOLF)
    others = sum(1 for p in state.players if p.alive and p.role is not Role.WEREWOLF)
    if wolves == 0:
        return VILLAGERS
    if wolves >= others:
        return WEREWOLVES
    return None


def record_utterance(state: WerewolfState, name: str, text: str) -> LogEntry:
    _require(state.player(name).alive, f"dead player {name!r} cannot speak")
    shown = text.strip() or "(no comment)"
    entry = LogEntry(state.round, Phase.DAY_DEBATE.value, name, "debate", f"{name}: {shown}")
    state.log.append(entry)
    return entry


def run_debate(
    state: WerewolfState,
    speaking_order: Sequence[str],
    rounds_per_day: int,
    speak: Callable[[WerewolfState, str], str],
) -> list[LogEntry]:
    """Query each living speaker once per debate round, appending to the log.

    A speaker whose ``speak`` raises is recorded with an empty utterance.
    """
    added = []
    for _ in range(rounds_per_day):
        for name in speaking_order:
            if not state.player(name).alive:
                continue
            try:
                text = speak(state, name)
            except AgentFailure:
                text = ""
            added.append(record_utterance(state, name, text))
    return added

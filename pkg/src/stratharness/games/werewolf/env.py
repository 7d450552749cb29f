"""Werewolf as a GameEnv.

Each agent query is one step. Night actions and votes are buffered until
every actor of the phase has acted, then resolved at once.
"""

from __future__ import annotations

from typing import Any, Mapping

from ...core.env import GameEnv, register_env
from ...core.types import DRAW, EndReason, Observation, StepOutcome
from ...errors import EnvInvariantError, IllegalActionError
from ...seeding import make_rng
from .rules import (
    CENSUS,
    VILLAGERS,
    WEREWOLVES,
    LogEntry,
    Phase,
    Role,
    VoteTally,
    WerewolfState,
    assign_roles,
    check_win,
    record_utterance,
    resolve_night,
    tally_votes,
    team_of,
    werewolf_night_choice,
)

DEFAULT_PLAYERS = ("Isaac", "Sam", "Hayley", "Ginger", "Scott", "Derek", "Tyler", "Jacob")
DEFAULT_KEY_ROLES = ("Seer", "Doctor")

_VERB_KIND = {
    "remove": "night_action",
    "protect": "night_action",
    "investigate": "night_action",
    "vote": "vote",
    "say": "debate",
}

WEREWOLF_COUNTERS = (
    "correct_identifications",
    "total_identification_attempts",
    "key_role_survived",
    "total_key_role_games",
    "successful_votes",
    "total_critical_votes",
    "matches_won",
    "total_matches",
)


def _split(action: str) -> tuple[str, str]:
    verb, _, rest = action.strip().partition(" ")
    return verb.lower(), rest.strip()


@register_env
class WerewolfEnv(GameEnv):
    game_id = "werewolf"

    def __init__(self, scene_variables: Mapping[str, Any], seed: int):
        super().__init__(scene_variables, seed)
        sv = self.scene_variables
        self.names = tuple(sv.get("players", DEFAULT_PLAYERS))
        self.debate_rounds = int(sv.get("debate_rounds", 1))
        self.key_roles = frozenset(Role(r) for r in sv.get("key_roles", DEFAULT_KEY_ROLES))
        self.state = assign_roles(
            self.names,
            seed,
            fixed_roles=sv.get("fixed_roles"),
            reveal_on_death=bool(sv.get("reveal_on_death", True)),
        )
        self._roles0 = {p.name: p.role for p in self.state.players}
        self._counters = {n: dict.fromkeys(WEREWOLF_COUNTERS, 0.0) for n in self.names}
        for n in self.names:
            self._counters[n]["total_matches"] = 1.0
        self._votes: dict[str, str] = {}
        self._queue: list[str] = []
        self._debate_left = 0
        self._start_night()

    @classmethod
    def seats_for(cls, scene_variables: Mapping[str, Any]) -> tuple[str, ...]:
        return tuple(scene_variables.get("players", DEFAULT_PLAYERS))

    @property
    def seats(self) -> tuple[str, ...]:
        return self.names

    @property
    def phase(self) -> Phase:
        return self.state.phase

    # -- phase scheduling -------------------------------------------------
    def _start_night(self) -> None:
        st = self.state
        st.phase = Phase.NIGHT
        actors = st.names_with(Role.WEREWOLF) + st.names_with(Role.DOCTOR) + st.names_with(Role.SEER)
        order = {n: i for i, n in enumerate(self.names)}
        wolves = sorted(st.names_with(Role.WEREWOLF), key=order.get)
        self._queue = wolves + [n for n in actors if n not in wolves]

    def _start_debate(self) -> None:
        self.state.phase = Phase.DAY_DEBATE
        self._debate_left = self.debate_rounds
        self._queue = self.state.living_names() if self.debate_rounds > 0 else []
        if not self._queue:
            self._start_vote()

    def _start_vote(self) -> None:
        self.state.phase = Phase.DAY_VOTE
        self._votes = {}
        self._queue = self.state.living_names()

    def current_seat(self) -> str | None:
        if self.is_terminal() or not self._queue:
            return None
        return self._queue[0]

    # -- legality -----------------------------------------------------------
    def legal_actions(self, seat: str) -> list[str]:
        if self.is_terminal() or seat != self.current_seat():
            return []
        st = self.state
        me = st.player(seat)
        living = st.living_names()
        if st.phase is Phase.NIGHT:
            if me.role is Role.WEREWOLF:
                return [f"remove {n}" for n in living if st.player(n).role is not Role.WEREWOLF]
            if me.role is Role.DOCTOR:
                return [f"protect {n}" for n in living]
            if me.role is Role.SEER:
                return [f"investigate {n}" for n in living if n != seat]
            return []
        if st.phase is Phase.DAY_DEBATE:
            return ["say"]
        if st.phase is Phase.DAY_VOTE:
            return [f"vote {n}" for n in living if n != seat]
        return []

    def action_matches(self, action: str, legal: str) -> bool:
        verb, arg = _split(action)
        lverb, larg = _split(legal)
        if verb != lverb:
            return False
        if lverb == "say":
            return True
        return arg.lower() == larg.lower()

    def classify(self, seat: str, action: str) -> str:
        return _VERB_KIND.get(_split(action)[0], "other")

    # -- transitions --------------------------------------------------------
    def step(self, seat: str, action: str) -> StepOutcome:
        if seat != self.current_seat():
            raise IllegalActionError(f"it is not {seat}'s turn")
        legal = self.legal_actions(seat)
        match = next((a for a in legal if self.action_matches(action, a)), None)
        if match is None:
            raise IllegalActionError(f"{seat} may not {action!r} now")
        verb, arg = _split(match)
        st = self.state
        before = len(st.log)
        if verb == "say":
            record_utterance(st, seat, _split(action)[1])
            applied = action.strip() if _split(action)[1] else "say"
        else:
            applied = match
        self._queue.pop(0)

        if verb == "remove":
            st.night_buffer.remove_proposals[seat] = arg
            wolves = st.names_with(Role.WEREWOLF)
            st.tell(wolves, "proposal", f"{seat} proposed to remove {arg}.", actor=seat)
        elif verb == "protect":
            st.night_buffer.protect_target = arg
            st.tell((seat,), "protect", f"You chose to protect {arg}.", actor=seat)
        elif verb == "investigate":
            st.night_buffer.investigate_pair = (seat, arg)
        elif verb == "vote":
            self._votes[seat] = arg
            st.tell((seat,), "vote", f"After the debate, I voted to remove {arg} from the game.", actor=seat)

        if not self._queue:
            self._end_phase()
        self.check_invariants()
        events = [e.to_dict() for e in st.log[before:]]
        return StepOutcome(
            seat=seat,
            action=applied,
            action_type=_VERB_KIND[verb],
            terminal=self.is_terminal(),
            events=events,
        )

    def _end_phase(self) -> None:
        st = self.state
        if st.phase is Phase.NIGHT:
            nb = st.night_buffer
            rng = make_rng(self.seed, "night", st.round)
            target = werewolf_night_choice(nb.remove_proposals, rng)
            wolves = st.names_with(Role.WEREWOLF)
            st.tell(wolves, "night_choice", f"During the night, we decided to eliminate {target}.")
            resolve_night(st, target, nb.protect_target, nb.investigate_pair)
            if not self._check_end():
                self._start_debate()
        elif st.phase is Phase.DAY_DEBATE:
            self._debate_left -= 1
            if self._debate_left > 0:
                self._queue = st.living_names()
            else:
                self._start_vote()
        elif st.phase is Phase.DAY_VOTE:
            self._resolve_vote()
            if not self._check_end():
                st.round += 1
                self._start_night()

    def _resolve_vote(self) -> None:
        st = self.state
        living = st.living_names()
        removed = tally_votes(VoteTally(dict(self._votes), len(living)))
        for voter, target in self._votes.items():
            c = self._counters[voter]
            voter_team = team_of(self._roles0[voter])
            target_is_wolf = self._roles0[target] is Role.WEREWOLF
            if voter_team == VILLAGERS:
                c["total_identification_attempts"] += 1
                c["correct_identifications"] += 1 if target_is_wolf else 0
            # A decisive vote succeeds when it backed the removal of an opponent.
            if removed is not None:
                c["total_critical_votes"] += 1
                if target == removed and team_of(self._roles0[removed]) != voter_team:
                    c["successful_votes"] += 1
        if removed is None:
            st.announce(
                "vote_result",
                "Moderator Announcement: A majority vote was not reached, so no one was removed from the game.",
            )
        else:
            st.player(removed).alive = False
            reveal = f" {removed} was a {st.player(removed).role.value}." if st.reveal_on_death else ""
            st.announce("vote_result", f"Moderator Announcement: {removed} was voted out of the game.{reveal}")
        self._votes = {}

    def _check_end(self) -> bool:
        winner = check_win(self.state)
        if winner is None:
            return False
        self._finish(winner, EndReason.OBJECTIVE_MET if winner == VILLAGERS else EndReason.ELIMINATION)
        return True

    def on_finish(self) -> None:
        st = self.state
        st.phase = Phase.TERMINAL
        self._queue = []
        for p in st.players:
            c = self._counters[p.name]
            if team_of(p.role) == self._winner:
                c["matches_won"] = 1.0
            if p.role in self.key_roles:
                c["total_key_role_games"] = 1.0
                c["key_role_survived"] = 1.0 if p.alive else 0.0

    def step_limit_winner(self) -> str:
        wolves = len(self.state.names_with(Role.WEREWOLF))
        others = len(self.state.living_names()) - wolves
        return VILLAGERS if 2 * wolves < others else DRAW

    def forfeit_winner(self, seat: str) -> str:
        return VILLAGERS if team_of(self._roles0[seat]) == WEREWOLVES else WEREWOLVES

    def failure_substitute(self, seat: str) -> str | None:
        return "say" if self.state.phase is Phase.DAY_DEBATE else None

    # -- observation -----------------------------------------------------------
    def _action_kind(self, seat: str) -> str:
        st = self.state
        if st.phase is Phase.NIGHT:
            return {Role.WEREWOLF: "remove", Role.DOCTOR: "protect", Role.SEER: "investigate"}.get(
                st.player(seat).role, "wait"
            )
        return {Phase.DAY_DEBATE: "debate", Phase.DAY_VOTE: "vote"}.get(st.phase, "wait")

    def observe(self, seat: str, step_index: int) -> Observation:
        st = self.state
        me = st.player(seat)
        remaining = ", ".join(f"{n} (You)" if n == seat else n for n in st.living_names())
        lines = [
            "GAME STATE:",
            f"- It is currently Round {st.round}, phase {st.phase.value}.",
            f"- You are {seat} the {me.role.value}.",
            f"- Remaining players: {remaining}.",
        ]
        if me.role is Role.WEREWOLF:
            partners = [n for n, r in self._roles0.items() if r is Role.WEREWOLF and n != seat]
            lines.append(f"- Your fellow Werewolf: {', '.join(partners)}.")
        lines.append("")
        lines.append("OBSERVATIONS:")
        current = None
        for entry in st.log:
            if not entry.visible(seat):
                continue
            if entry.round != current:
                current = entry.round
                lines.append(f"Round {current}:")
            lines.append(f"- {entry.text}")
        kind = self._action_kind(seat)
        legal = tuple(self.legal_actions(seat))
        return Observation(
            actor=seat,
            step_index=step_index,
            text_view="\n".join(lines),
            legal_actions=legal,
            phase_tag=st.phase.value,
            counters=dict(self._counters[seat]),
            extras={
                "name": seat,
                "role": me.role.value,
                "round": str(st.round),
                "remaining": remaining,
                "action_kind": kind,
                "response_key": "say" if kind == "debate" else kind,
                "candidates": ", ".join(_split(a)[1] for a in legal if _split(a)[1]),
            },
        )

    # -- bookkeeping -------------------------------------------------------
    def counters(self, seat: str) -> dict[str, float]:
        return dict(self._counters[seat])

    def header(self) -> dict[str, Any]:
        return {
            "players": list(self.names),
            "roles": {n: r.value for n, r in self._roles0.items()},
            "debate_rounds": self.debate_rounds,
            "key_roles": sorted(r.value for r in self.key_roles),
            "reveal_on_death": self.state.reveal_on_death,
        }

    def check_invariants(self) -> None:
        census = self.state.census()
        if census != CENSUS:
            raise EnvInvariantError(f"role census changed: {dict(census)}")
        for n in self._queue:
            if not self.state.player(n).alive:
                raise EnvInvariantError(f"dead player {n} is scheduled to act")

    def visible_log(self, seat: str) -> list[LogEntry]:
        return [e for e in self.state.log if e.visible(seat)]

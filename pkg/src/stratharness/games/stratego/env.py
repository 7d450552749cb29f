"""Stratego as a GameEnv: turn handling, repetition cap, observations, counters."""

from __future__ import annotations

from collections import deque
from pathlib import Path
from typing import Any, Mapping

from ...core.env import GameEnv, register_env
from ...core.types import DRAW, EndReason, Observation, StepOutcome
from ...data import default_layout_text
from ...errors import ConfigError, EnvInvariantError, IllegalActionError, ResponseParseError
from .board import Board, Move, initial_placement
from .notation import (
    describe_piece,
    parse_layout,
    parse_move,
    serialize_board,
    valid_moves_listing,
)
from .pieces import DEFAULT_CRITICAL, Rank, Side, standard_army

HISTORY_LEN = 5


def stratego_counters(board: Board, side: Side, critical=DEFAULT_CRITICAL) -> dict[str, float]:
    """Material counters for one side of ``board``."""
    army = board.army(side)
    counters: dict[str, float] = {
        "live_pieces_num": float(sum(army.values())),
        "live_pieces_score": float(sum(r.points * n for r, n in army.items())),
        "critical_pieces_alive": float(sum(n for r, n in army.items() if r in critical)),
        "total_critical_pieces": float(len(critical)),
    }
    for rank in Rank:
        counters[f"total_pieces_{rank.title}"] = float(army.get(rank, 0))
    return counters


@register_env
class StrategoEnv(GameEnv):
    game_id = "stratego"
    SEATS = (Side.RED.value, Side.BLUE.value)

    def __init__(self, scene_variables: Mapping[str, Any], seed: int):
        super().__init__(scene_variables, seed)
        sv = self.scene_variables
        mode = sv.get("placement", "random")
        layout = None
        if mode == "fixed":
            if "layout_text" in sv:
                layout = parse_layout(sv["layout_text"])
            elif "layout" in sv:
                layout = parse_layout(Path(sv["layout"]).read_text(encoding="utf-8"))
            else:
                layout = parse_layout(default_layout_text())
        self.board = initial_placement(mode, layout, seed)
        self.placement = mode
        self.repetition_cap = int(sv.get("repetition_cap", 3))
        if self.repetition_cap < 1:
            raise ConfigError("repetition_cap must be >= 1")
        if "critical" in sv:
            self.critical = frozenset(Rank.parse(t) for t in sv["critical"])
        else:
            self.critical = DEFAULT_CRITICAL
        self.to_move = Side.RED
        self._recent: dict[Side, deque[Move]] = {
            s: deque(maxlen=2 * self.repetition_cap) for s in Side
        }
        self._history: dict[Side, list[str]] = {s: [] for s in Side}
        self._combat_log: list[str] = []
        self._won: dict[Side, int] = {s: 0 for s in Side}
        self._initial_layout = serialize_board(self.board, None)
        self._check_mobility()

    @classmethod
    def seats_for(cls, scene_variables: Mapping[str, Any]) -> tuple[str, ...]:
        return cls.SEATS

    @property
    def seats(self) -> tuple[str, ...]:
        return self.SEATS

    def current_seat(self) -> str | None:
        return None if self.is_terminal() else self.to_move.value

    # -- actions -----------------------------------------------------------
    def _moves(self, side: Side) -> list[Move]:
        recent = self._recent[side]
        moves = self.board.legal_moves(side)
        if len(recent) < self.repetition_cap:
            return moves
        return [m for m in moves if recent.count(m) < self.repetition_cap]

    def legal_actions(self, seat: str) -> list[str]:
        if self.is_terminal():
            return []
        return [m.encode() for m in self._moves(Side(seat))]

    def action_matches(self, action: str, legal: str) -> bool:
        if action == legal:
            return True
        try:
            return parse_move(action) == parse_move(legal)
        except ResponseParseError:
            return False

    def is_legal(self, seat: str, action: str) -> bool:
        try:
            move = parse_move(action)
        except ResponseParseError:
            return False
        return move in self._moves(Side(seat))

    def classify(self, seat: str, action: str) -> str:
        try:
            move = parse_move(action)
        except ResponseParseError:
            return "other"
        target = self.board[move.dst]
        if target is not None and target.owner is not Side(seat):
            return "combat"
        return "move"

    def step(self, seat: str, action: str) -> StepOutcome:
        if self.is_terminal():
            raise IllegalActionError("match is over")
        side = Side(seat)
        try:
            move = parse_move(action)
        except ResponseParseError as exc:
            raise IllegalActionError(str(exc)) from None
        if move not in self._moves(side):
            raise IllegalActionError(f"{side.value} may not play {move.encode()}")
        action_type = self.classify(seat, action)
        piece = self.board[move.src]
        desc = describe_piece(piece)
        result = self.board.apply_move(move, side)
        self._recent[side].append(move)
        self._history[side].append(
            f"{desc} at position '{move.src[0]},{move.src[1]}' moved to {move.dst[0]} {move.dst[1]}"
        )
        event: dict[str, Any] = {
            "kind": "move",
            "side": side.value,
            "from": list(move.src),
            "to": list(move.dst),
            "piece": result.attacker.title,
        }
        if result.defender is not None:
            event["kind"] = "capture" if result.flag_captured else "combat"
            event["defender"] = result.defender.title
            event["result"] = "flag_captured" if result.flag_captured else result.combat.value
            self._combat_log.append(
                f"{side.name.title()} {result.attacker.title} at {move.src[0]},{move.src[1]} "
                f"attacked {side.opponent.name.title()} {result.defender.title} at "
                f"{move.dst[0]},{move.dst[1]}: {event['result'].replace('_', ' ')}"
            )
        self.to_move = side.opponent
        if result.flag_captured:
            self._finish(side.value, EndReason.OBJECTIVE_MET)
        elif result.draw:
            self._finish(DRAW, EndReason.ELIMINATION)
        elif result.winner is not None:
            self._finish(result.winner.value, EndReason.ELIMINATION)
        else:
            self._check_mobility()
        return StepOutcome(
            seat=seat,
            action=move.encode(),
            action_type=action_type,
            terminal=self.is_terminal(),
            events=[event],
        )

    def _check_mobility(self) -> None:
        # A side with nothing it may legally play loses.
        if not self.is_terminal() and not self._moves(self.to_move):
            self._finish(self.to_move.opponent.value, EndReason.ELIMINATION)

    # -- observation ------------------------------------------------------
    def observe(self, seat: str, step_index: int) -> Observation:
        side = Side(seat)
        moves = self._moves(side) if not self.is_terminal() else []
        parts = ["## Board State:", serialize_board(self.board, side), "", "## Valid moves:"]
        parts.extend(valid_moves_listing(self.board, moves) or ["(none)"])
        parts.append("")
        parts.append(f"## History moves: (your last {HISTORY_LEN} moves, 1 = most recent)")
        recent = self._history[side][-HISTORY_LEN:][::-1]
        parts.extend(f"{i}. {line}" for i, line in enumerate(recent, 1))
        if self._combat_log:
            parts.append("")
            parts.append("## Combat log: (most recent last)")
            parts.extend(self._combat_log[-HISTORY_LEN:])
        return Observation(
            actor=seat,
            step_index=step_index,
            text_view="\n".join(parts),
            legal_actions=tuple(m.encode() for m in moves),
            phase_tag="play",
            counters=self.counters(seat),
            extras={
                "side": side.name.title(),
                "side_letter": side.letter,
                "opponent": side.opponent.name.title(),
                "opponent_letter": side.opponent.letter,
            },
        )

    # -- outcome / counters ------------------------------------------------
    def on_finish(self) -> None:
        if self._winner in self.SEATS:
            self._won[Side(self._winner)] = 1

    def step_limit_winner(self) -> str:
        red = self.board_score(Side.RED)
        blue = self.board_score(Side.BLUE)
        if red == blue:
            return DRAW
        return Side.RED.value if red > blue else Side.BLUE.value

    def board_score(self, side: Side) -> int:
        return sum(p.rank.points for _, p in self.board.pieces(side))

    def forfeit_winner(self, seat: str) -> str:
        return Side(seat).opponent.value

    def counters(self, seat: str) -> dict[str, float]:
        side = Side(seat)
        out = stratego_counters(self.board, side, self.critical)
        out["matches_won"] = float(self._won[side])
        out["total_matches"] = 1.0
        return out

    def header(self) -> dict[str, Any]:
        return {
            "placement": self.placement,
            "initial_board": self._initial_layout,
            "repetition_cap": self.repetition_cap,
            "critical": sorted(r.title for r in self.critical),
        }

    def check_invariants(self) -> None:
        for side in Side:
            army = self.board.army(side)
            if army - standard_army():
                raise EnvInvariantError(f"{side.value} army exceeds the standard set: {army}")

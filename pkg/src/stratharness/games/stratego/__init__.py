"""Stratego rules engine."""

from .board import (
    LAKES,
    Board,
    CombatResult,
    Move,
    MoveResult,
    apply_move,
    initial_placement,
    legal_moves,
    resolve_combat,
)
from .env import StrategoEnv, stratego_counters
from .notation import board_from_text, load_layout, parse_layout, parse_move, serialize_board
from .pieces import DEFAULT_CRITICAL, Piece, Rank, Side, standard_army, total_value

__all__ = [
    "LAKES", "Board", "CombatResult", "Move", "MoveResult", "apply_move",
    "initial_placement", "legal_moves", "resolve_combat", "StrategoEnv",
    "stratego_counters", "board_from_text", "load_layout", "parse_layout",
    "parse_move", "serialize_board", "DEFAULT_CRITICAL", "Piece", "Rank",
    "Side", "standard_army", "total_value",
]

"""Board geometry, move generation, combat and placement."""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from ...errors import ConfigError, IllegalActionError
from .pieces import ARMY_COMPOSITION, Piece, Rank, Side, standard_army

SIZE = 10
LAKES = frozenset({(4, 2), (4, 3), (4, 6), (4, 7), (5, 2), (5, 3), (5, 6), (5, 7)})
# N, S, W, E -- also the order moves are listed in
DIRECTIONS = ((-1, 0), (1, 0), (0, -1), (0, 1))
HOME_ROWS = {Side.RED: range(6, 10), Side.BLUE: range(0, 4)}
FLAG_ROWS = {Side.RED: (8, 9), Side.BLUE: (0, 1)}

Square = tuple[int, int]


@dataclass(frozen=True, order=True)
class Move:
    src: Square
    dst: Square

    # src == dst is representable so parsing and legality stay separate;
    # no such move is ever legal.
    def __post_init__(self) -> None:
        for r, c in (self.src, self.dst):
            if not (0 <= r < SIZE and 0 <= c < SIZE):
                raise ValueError(f"square ({r},{c}) is off the board")

    def encode(self) -> str:
        return f"{self.src[0]} {self.src[1]} {self.dst[0]} {self.dst[1]}"

    def __str__(self) -> str:
        return self.encode()


class CombatResult(str, enum.Enum):
    DEFENDER_REMOVED = "defender_removed"
    ATTACKER_REMOVED = "attacker_removed"
    BOTH_REMOVED = "both_removed"


def resolve_combat(attacker: Rank, defender: Rank) -> CombatResult:
    if not attacker.movable:
        raise ValueError(f"{attacker.title} cannot attack")
    if defender is Rank.FLAG:
        raise ValueError("flag contact is a capture, not combat")
    if defender is Rank.BOMB:
        if attacker is Rank.MINER:
            return CombatResult.DEFENDER_REMOVED
        return CombatResult.ATTACKER_REMOVED
    if attacker is Rank.SPY and defender is Rank.MARSHAL:
        return CombatResult.DEFENDER_REMOVED
    if attacker.strength > defender.strength:
        return CombatResult.DEFENDER_REMOVED
    if attacker.strength < defender.strength:
        return CombatResult.ATTACKER_REMOVED
    return CombatResult.BOTH_REMOVED


@dataclass
class MoveResult:
    move: Move
    mover: Side
    attacker: Rank
    defender: Rank | None = None
    combat: CombatResult | None = None
    flag_captured: bool = False
    winner: Side | None = None
    draw: bool = False
    removed: list[Piece] = field(default_factory=list)

    @property
    def terminal(self) -> bool:
        return self.winner is not None or self.draw


class Board:
    """10x10 grid of optional pieces; lakes are implicit."""

    def __init__(self) -> None:
        self.cells: list[list[Piece | None]] = [[None] * SIZE for _ in range(SIZE)]

    # -- access ----------------------------------------------------------
    def __getitem__(self, sq: Square) -> Piece | None:
        return self.cells[sq[0]][sq[1]]

    def __setitem__(self, sq: Square, piece: Piece | None) -> None:
        if piece is not None and sq in LAKES:
            raise ValueError(f"cannot place a piece on lake {sq}")
        self.cells[sq[0]][sq[1]] = piece

    def copy(self) -> Board:
        other = Board()
        for r in range(SIZE):
            for c in range(SIZE):
                p = self.cells[r][c]
                if p is not None:
                    other.cells[r][c] = Piece(p.owner, p.rank, p.pid, p.revealed)
        return other

    def pieces(self, side: Side | None = None) -> Iterator[tuple[Square, Piece]]:
        for r in range(SIZE):
            row = self.cells[r]
            for c in range(SIZE):
                p = row[c]
                if p is not None and (side is None or p.owner is side):
                    yield (r, c), p

    def army(self, side: Side) -> Counter[Rank]:
        return Counter(p.rank for _, p in self.pieces(side))

    def has_movable(self, side: Side) -> bool:
        return any(p.rank.movable for _, p in self.pieces(side))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Board):
            return NotImplemented
        return self._key() == other._key()

    def _key(self):
        return tuple(
            (sq, p.owner, p.rank, p.revealed) for sq, p in self.pieces()
        )

    # -- rules -----------------------------------------------------------
    def piece_moves(self, sq: Square) -> list[Move]:
        piece = self[sq]
        if piece is None or not piece.rank.movable:
            return []
        r, c = sq
        out = []
        reach = SIZE if piece.rank is Rank.SCOUT else 1
        for dr, dc in DIRECTIONS:
            for k in range(1, reach + 1):
                tr, tc = r + dr * k, c + dc * k
                if not (0 <= tr < SIZE and 0 <= tc < SIZE) or (tr, tc) in LAKES:
                    break
                target = self.cells[tr][tc]
                if target is None:
                    out.append(Move(sq, (tr, tc)))
                    continue
                if target.owner is not piece.owner:
                    out.append(Move(sq, (tr, tc)))
                break
        return out

    def legal_moves(self, side: Side) -> list[Move]:
        out: list[Move] = []
        for sq, p in self.pieces(side):
            if p.rank.movable:
                out.extend(self.piece_moves(sq))
        return out

    def is_legal(self, move: Move, side: Side | None = None) -> bool:
        piece = self[move.src]
        if piece is None or (side is not None and piece.owner is not side):
            return False
        return move in self.piece_moves(move.src)

    def apply_move(self, move: Move, side: Side | None = None) -> MoveResult:
        """Apply a legal move; illegal moves raise without touching the board."""
        if not self.is_legal(move, side):
            raise IllegalActionError(f"illegal move {move.encode()}")
        mover = self[move.src]
        assert mover is not None
        target = self[move.dst]
        result = MoveResult(move=move, mover=mover.owner, attacker=mover.rank)
        self[move.src] = None
        if target is None:
            self[move.dst] = mover
            return result

        result.defender = target.rank
        mover.revealed = True
        target.revealed = True
        if target.rank is Rank.FLAG:
            result.flag_captured = True
            result.removed.append(target)
            self[move.dst] = mover
            result.winner = mover.owner
            return result

        outcome = resolve_combat(mover.rank, target.rank)
        result.combat = outcome
        if outcome is CombatResult.DEFENDER_REMOVED:
            result.removed.append(target)
            self[move.dst] = mover
        elif outcome is CombatResult.ATTACKER_REMOVED:
            result.removed.append(mover)
        else:
            result.removed.extend((mover, target))
            self[move.dst] = None

        mover_side, other = mover.owner, mover.owner.opponent
        other_stuck = not self.has_movable(other)
        mover_stuck = not self.has_movable(mover_side)
        if other_stuck and mover_stuck:
            result.draw = True
        elif other_stuck:
            result.winner = mover_side
        elif mover_stuck:
            result.winner = other
        return result


def legal_moves(board: Board, side: Side) -> list[Move]:
    return board.legal_moves(side)


def apply_move(board: Board, move: Move) -> MoveResult:
    return board.apply_move(move)


# -- placement -------------------------------------------------------------

def initial_placement(
    mode: str = "random",
    layout: dict[Side, Sequence[Sequence[Rank]]] | None = None,
    seed: int = 0,
) -> Board:
    """Set up both armies.

    ``random`` shuffles each army over its four home rows with the flag in
    the back two; ``fixed`` copies ``layout`` (four rows per side, listed
    top to bottom as they appear on the board).
    """
    board = Board()
    pid = 0
    if mode == "random":
        rng = random.Random(seed)
        for side in (Side.RED, Side.BLUE):
            rows = HOME_ROWS[side]
            cells = [(r, c) for r in rows for c in range(SIZE)]
            flag_cells = [sq for sq in cells if sq[0] in FLAG_ROWS[side]]
            flag_sq = rng.choice(flag_cells)
            rest = [sq for sq in cells if sq != flag_sq]
            ranks = [r for r, n in sorted(ARMY_COMPOSITION.items(), key=lambda kv: kv[0].name)
                     for _ in range(n) if r is not Rank.FLAG]
            rng.shuffle(ranks)
            board[flag_sq] = Piece(side, Rank.FLAG, pid)
            pid += 1
            for sq, rank in zip(rest, ranks):
                board[sq] = Piece(side, rank, pid)
                pid += 1
        return board
    if mode == "fixed":
        if layout is None:
            raise ConfigError("fixed placement requires a layout")
        for side in (Side.RED, Side.BLUE):
            rows = layout.get(side)
            validate_layout(side, rows)
            for r, row in zip(HOME_ROWS[side], rows):
                for c, rank in enumerate(row):
                    board[(r, c)] = Piece(side, rank, pid)
                    pid += 1
        return board
    raise ConfigError(f"unknown placement mode {mode!r}")


def validate_layout(side: Side, rows: Sequence[Sequence[Rank]] | None) -> None:
    if rows is None or len(rows) != 4 or any(len(row) != SIZE for row in rows):
        raise ConfigError(f"{side.value} layout must be 4 rows of {SIZE} ranks")
    found = Counter(rank for row in rows for rank in row)
    if found != standard_army():
        diff = (found - standard_army()) + (standard_army() - found)
        raise ConfigError(
            f"{side.value} layout is not the standard army (mismatched: "
            + ", ".join(f"{r.title}" for r in sorted(diff, key=lambda r: r.name))
            + ")"
        )

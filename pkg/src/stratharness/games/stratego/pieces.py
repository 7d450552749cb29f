"""Ranks, sides and the standard 40-piece army."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass


class Side(str, enum.Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def letter(self) -> str:
        return "R" if self is Side.RED else "B"

    @property
    def opponent(self) -> Side:
        return Side.BLUE if self is Side.RED else Side.RED

    @classmethod
    def from_letter(cls, letter: str) -> Side:
        return {"R": cls.RED, "B": cls.BLUE}[letter]


class Rank(enum.Enum):
    # name = (glyph, combat strength, point value, movable)
    FLAG = ("¶", 0, 0, False)
    SPY = ("s", 1, 1, True)
    SCOUT = ("¹", 2, 2, True)
    MINER = ("²", 3, 3, True)
    SERGEANT = ("3", 4, 4, True)
    LIEUTENANT = ("4", 5, 5, True)
    CAPTAIN = ("5", 6, 6, True)
    MAJOR = ("6", 7, 7, True)
    COLONEL = ("7", 8, 8, True)
    GENERAL = ("8", 9, 9, True)
    MARSHAL = ("9", 10, 10, True)
    BOMB = ("o", 0, 0, False)

    def __init__(self, glyph: str, strength: int, points: int, movable: bool):
        self.glyph = glyph
        self.strength = strength
        self.points = points
        self.movable = movable

    @property
    def title(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_glyph(cls, glyph: str) -> Rank:
        try:
            return _BY_GLYPH[glyph]
        except KeyError:
            raise ValueError(f"unknown rank glyph {glyph!r}") from None

    @classmethod
    def parse(cls, token: str) -> Rank:
        """Accept a glyph or a rank name (case-insensitive)."""
        if token in _BY_GLYPH:
            return _BY_GLYPH[token]
        try:
            return cls[token.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown rank {token!r}") from None


_BY_GLYPH = {r.glyph: r for r in Rank}

ARMY_COMPOSITION: dict[Rank, int] = {
    Rank.FLAG: 1,
    Rank.BOMB: 6,
    Rank.SPY: 1,
    Rank.SCOUT: 8,
    Rank.MINER: 5,
    Rank.SERGEANT: 4,
    Rank.LIEUTENANT: 4,
    Rank.CAPTAIN: 4,
    Rank.MAJOR: 3,
    Rank.COLONEL: 2,
    Rank.GENERAL: 1,
    Rank.MARSHAL: 1,
}

DEFAULT_CRITICAL = frozenset({Rank.MARSHAL, Rank.GENERAL, Rank.SPY, Rank.FLAG})


def standard_army() -> Counter[Rank]:
    return Counter(ARMY_COMPOSITION)


def total_value(ranks) -> int:
    """Sum of point values over an iterable (or Counter) of ranks."""
    if isinstance(ranks, Counter):
        return sum(r.points * n for r, n in ranks.items())
    return sum(r.points for r in ranks)


def critical_count(ranks, critical=DEFAULT_CRITICAL) -> int:
    if isinstance(ranks, Counter):
        return sum(n for r, n in ranks.items() if r in critical)
    return sum(1 for r in ranks if r in critical)


@dataclass(slots=True)
class Piece:
    owner: Side
    rank: Rank
    pid: int = 0
    revealed: bool = False

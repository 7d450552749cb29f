"""Text forms: board grid, ``r c x y`` moves, placement files.

Board grid grammar (one line per row, ``\\n`` separated)::

    header := "  " ( ",  c<d> " ){10}
    row    := "r<d>" ( ", " cell ){10}
    cell   := "...."            empty
            | "~~~~"            lake
            | S "(" g ")"       piece, rank glyph g visible
            | S "(#)"           piece of hidden rank
            | S "[" g "]"       revealed piece (omniscient view only)

``S`` is ``R`` or ``B`` and ``g`` one of ``¶ s ¹ ² 3 4 5 6 7 8 9 o``. Cells
are four glyphs wide, not four bytes: ``¹ ² ¶`` are multi-byte in UTF-8.
"""

from __future__ import annotations

import re
from pathlib import Path

from ...errors import ConfigError, ResponseParseError
from .board import HOME_ROWS, LAKES, SIZE, Board, Move
from .pieces import Piece, Rank, Side

EMPTY = "...."
LAKE = "~~~~"
HEADER = "  " + "".join(f",  c{c} " for c in range(SIZE))


def _cell(piece: Piece | None, sq, perspective: Side | None) -> str:
    if piece is None:
        return LAKE if sq in LAKES else EMPTY
    letter = piece.owner.letter
    if perspective is None:
        return f"{letter}[{piece.rank.glyph}]" if piece.revealed else f"{letter}({piece.rank.glyph})"
    if piece.owner is perspective or piece.revealed:
        return f"{letter}({piece.rank.glyph})"
    return f"{letter}(#)"


def serialize_board(board: Board, perspective: Side | None) -> str:
    """Render the grid as seen by ``perspective`` (None = omniscient)."""
    lines = [HEADER]
    for r in range(SIZE):
        cells = (_cell(board.cells[r][c], (r, c), perspective) for c in range(SIZE))
        lines.append(f"r{r}" + "".join(", " + cell for cell in cells))
    return "\n".join(lines)


_CELL_RE = re.compile(r"^([RB])([(\[])(.)([)\]])$")


def parse_board_cells(text: str) -> list[list[str]]:
    """Split a serialized grid into 10 rows of stripped cell tokens."""
    rows: dict[int, list[str]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        m = re.match(r"^r(\d)\s*,(.*)$", line)
        if not m:
            continue
        cells = [tok.strip() for tok in m.group(2).split(",")]
        if len(cells) != SIZE:
            raise ValueError(f"row r{m.group(1)} has {len(cells)} cells")
        rows[int(m.group(1))] = cells
    if sorted(rows) != list(range(SIZE)):
        raise ValueError("board text must contain rows r0..r9")
    return [rows[r] for r in range(SIZE)]


def board_from_text(text: str, hidden_rank: Rank | None = None) -> Board:
    """Rebuild a Board from any serialized view.

    Hidden pieces (``X(#)``) get ``hidden_rank``; without one they are an
    error, which is what an omniscient round trip expects.
    """
    board = Board()
    pid = 0
    for r, row in enumerate(parse_board_cells(text)):
        for c, tok in enumerate(row):
            if tok == EMPTY:
                continue
            if tok == LAKE:
                if (r, c) not in LAKES:
                    raise ValueError(f"lake marker at non-lake square ({r},{c})")
                continue
            m = _CELL_RE.match(tok)
            if not m:
                raise ValueError(f"bad cell {tok!r} at ({r},{c})")
            letter, opening, glyph, _ = m.groups()
            if glyph == "#":
                if hidden_rank is None:
                    raise ValueError(f"hidden piece at ({r},{c}) and no hidden_rank given")
                rank = hidden_rank
                revealed = False
            else:
                rank = Rank.from_glyph(glyph)
                revealed = opening == "["
            board[(r, c)] = Piece(Side.from_letter(letter), rank, pid, revealed)
            pid += 1
    return board


_MOVE_FIELD_RE = re.compile(r"""["']?move["']?\s*[:=]\s*["']([^"']*)["']""")
_SEP = r"(?:\s*,\s*|\s+)"
_FOUR_INTS_RE = re.compile(rf"^\s*(\d){_SEP}(\d){_SEP}(\d){_SEP}(\d)\s*$")


def parse_move(text: str) -> Move:
    """Parse ``r c x y`` (optionally inside a ``"move": "..."`` wrapper)."""
    if text is None:
        raise ResponseParseError("no move text")
    candidate = text
    m = _MOVE_FIELD_RE.search(text)
    if m:
        candidate = m.group(1)
    candidate = candidate.strip().strip("`").strip()
    m = _FOUR_INTS_RE.match(candidate)
    if not m:
        raise ResponseParseError(f"not an 'r c x y' move: {text!r}")
    r, c, x, y = (int(g) for g in m.groups())
    return Move((r, c), (x, y))


def describe_piece(piece: Piece) -> str:
    return f"{piece.rank.title} '{piece.owner.letter}({piece.rank.glyph})'"


def valid_moves_listing(board: Board, moves: list[Move]) -> list[str]:
    """Group moves by piece, in the order given."""
    grouped: dict[tuple[int, int], list[Move]] = {}
    for mv in moves:
        grouped.setdefault(mv.src, []).append(mv)
    lines = []
    for src, group in grouped.items():
        piece = board[src]
        targets = ", ".join(f"{m.dst[0]} {m.dst[1]}" for m in group)
        verb = "could move to any of:" if len(group) > 1 else "could move to:"
        lines.append(f"{describe_piece(piece)} at position '{src[0]},{src[1]}' {verb} {targets}")
    return lines


def parse_valid_moves_listing(text: str) -> dict[tuple[int, int], set[tuple[int, int]]]:
    """Inverse of :func:`valid_moves_listing`, tolerant of extra spaces and quotes."""
    out: dict[tuple[int, int], set[tuple[int, int]]] = {}
    pat = re.compile(r"position\s*'?\s*(\d)\s*,\s*(\d)\s*'?\s*could move to(?: any of)?:\s*(.*)$")
    for line in text.splitlines():
        m = pat.search(line)
        if not m:
            continue
        src = (int(m.group(1)), int(m.group(2)))
        dsts = {
            (int(a), int(b))
            for a, b in re.findall(r"(\d)\s+(\d)", m.group(3))
        }
        out.setdefault(src, set()).update(dsts)
    return out


# -- fixed placement files -------------------------------------------------

def load_layout(path: str | Path) -> dict[Side, list[list[Rank]]]:
    """Read a placement file.

    Sections ``[red]`` and ``[blue]`` each hold four lines of ten rank
    tokens (glyphs or rank names), written top to bottom as on the board:
    red covers rows 6-9, blue rows 0-3. ``#`` starts a comment.
    """
    return parse_layout(Path(path).read_text(encoding="utf-8"))


def parse_layout(text: str) -> dict[Side, list[list[Rank]]]:
    layout: dict[Side, list[list[Rank]]] = {}
    current: Side | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[(red|blue)\]", line, flags=re.IGNORECASE)
        if m:
            current = Side(m.group(1).lower())
            layout[current] = []
            continue
        if current is None:
            raise ConfigError(f"layout line {lineno}: rank row before a [red]/[blue] header")
        try:
            layout[current].append([Rank.parse(tok) for tok in line.split()])
        except ValueError as exc:
            raise ConfigError(f"layout line {lineno}: {exc}") from None
    return layout


def format_layout(board: Board) -> str:
    parts = []
    for side in (Side.RED, Side.BLUE):
        parts.append(f"[{side.value}]")
        for r in HOME_ROWS[side]:
            parts.append(" ".join(board.cells[r][c].rank.glyph for c in range(SIZE)))
    return "\n".join(parts) + "\n"

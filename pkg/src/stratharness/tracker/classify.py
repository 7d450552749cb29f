"""Map game actions to a shared set of action types."""

from __future__ import annotations

import re
from typing import Any

from ..errors import ResponseParseError
from ..games.stratego.notation import parse_move
from ..games.stratego.pieces import Side

# Leading verb of an external-game action, upper-cased, to action type.
EXTERNAL_VERBS = {
    "TRAIN": "produce",
    "PRODUCE": "produce",
    "MORPH": "produce",
    "WARP": "produce",
    "BUILD": "build",
    "FOUND": "build",
    "SETTLE": "build",
    "RESEARCH": "research",
    "UPGRADE": "research",
    "SCOUT": "scout",
    "EXPLORE": "scout",
    "ATTACK": "combat",
    "PUNCH": "combat",
    "KICK": "combat",
    "SUPPORT": "combat",
    "MOVE": "move",
    "RETREAT": "move",
    "HOLD": "move",
}

_WEREWOLF = {
    "remove": "night_action",
    "protect": "night_action",
    "investigate": "night_action",
    "vote": "vote",
    "say": "debate",
}
_PHASE_TYPES = {"Night": "night_action", "Day_Vote": "vote", "Day_Debate": "debate"}


def classify_action(game_id: str, parsed_action: str | None, *, phase_tag: str | None = None,
                    board: Any = None, seat: str | None = None) -> str:
    """Total mapping from (game, action) to an action type; unknown -> other.

    Stratego needs the board before the move (and the mover's seat) to tell
    a combat from a plain move. Werewolf uses the verb, then the phase.
    """
    if not parsed_action:
        return "other"
    if game_id == "stratego":
        try:
            move = parse_move(parsed_action)
        except ResponseParseError:
            return "other"
        if board is None or seat is None:
            return "move"
        target = board[move.dst]
        return "combat" if target is not None and target.owner is not Side(seat) else "move"
    if game_id == "werewolf":
        verb = parsed_action.strip().split(" ", 1)[0].lower()
        if verb in _WEREWOLF:
            return _WEREWOLF[verb]
        return _PHASE_TYPES.get(phase_tag or "", "other")
    # External games: strip list prefixes like "0: <TRAIN PROBE>".
    text = re.sub(r"^\s*\d+\s*[:.)]\s*", "", parsed_action).strip().strip("<>").strip()
    verb = text.split(" ", 1)[0].upper() if text else ""
    return EXTERNAL_VERBS.get(verb, "other")

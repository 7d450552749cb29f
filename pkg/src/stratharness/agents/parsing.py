"""Turning free-form model output into a Decision.

Models wrap their answer in prose, code fences, Python-style quoting or
all three. We locate the first balanced ``{...}`` object, read it as JSON
and fall back to a Python literal, then pick the fields the expected
format names.
"""

from __future__ import annotations

import ast
import json
import re
from typing import Any

from ..core.types import Decision
from ..errors import ResponseParseError

STRATEGO = "stratego"
ACTIONS = "actions"
WEREWOLF_KINDS = ("remove", "protect", "investigate", "debate", "vote")

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\s*\n?(.*?)```", re.DOTALL)
_MOVE_FIELD_RE = re.compile(r"""["']move["']\s*:\s*["']([^"']+)["']""")


def known_formats() -> list[str]:
    return [STRATEGO, ACTIONS] + [f"werewolf_{k}" for k in WEREWOLF_KINDS]


def _balanced_objects(text: str):
    """Yield every top-level ``{...}`` span, respecting quoted strings."""
    depth = 0
    start = None
    quote = None
    escape = False
    for i, ch in enumerate(text):
        if quote:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == quote:
                quote = None
            continue
        if ch in "\"'" and depth > 0:
            # An apostrophe inside prose-like values is common; only treat it
            # as a quote when it opens right after a delimiter.
            prev = text[:i].rstrip()[-1:] if i else ""
            if ch == '"' or prev in "{[,:":
                quote = ch
            continue
        if ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0 and start is not None:
                yield text[start : i + 1]
                start = None


def _load_object(span: str) -> dict | None:
    cleaned = re.sub(r"(?m)\s//[^\n'\"]*$", "", span)
    for candidate in (span, cleaned):
        try:
            obj = json.loads(candidate)
        except (json.JSONDecodeError, ValueError):
            pass
        else:
            if isinstance(obj, dict):
                return obj
        try:
            obj = ast.literal_eval(candidate)
        except (ValueError, SyntaxError, MemoryError, RecursionError):
            continue
        if isinstance(obj, dict):
            return obj
    return None


def extract_object(text: str) -> dict[str, Any]:
    """Find the structured answer inside ``text``."""
    if text is None or not text.strip():
        raise ResponseParseError("empty response")
    sources = [m.group(1) for m in _FENCE_RE.finditer(text)] + [text]
    for source in sources:
        for span in _balanced_objects(source):
            obj = _load_object(span)
            if obj is not None:
                return {str(k).strip(): v for k, v in obj.items()}
    raise ResponseParseError("no structured object found in response")


def _text(value: Any, field: str) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return str(value)
    if not isinstance(value, str):
        raise ResponseParseError(f"field {field!r} must be a string")
    return value.strip()


def _combined_key(obj: dict[str, Any]) -> str | None:
    # The shared werewolf schema names its answer slot after every verb at once.
    for key in obj:
        if "&" in key and any(k in key for k in WEREWOLF_KINDS):
            return key
    return None


def parse_response(text: str, expected_format: str) -> Decision:
    """Parse a model answer into a Decision for ``expected_format``."""
    if expected_format == STRATEGO:
        try:
            obj = extract_object(text)
        except ResponseParseError:
            m = _MOVE_FIELD_RE.search(text or "")
            if not m:
                raise
            obj = {"move": m.group(1)}
        reasoning = _text(obj.get("reasoning", ""), "reasoning")
        if "moves" in obj and isinstance(obj["moves"], list) and obj["moves"]:
            actions = tuple(_text(v, "moves") for v in obj["moves"])
        elif "move" in obj:
            actions = (_text(obj["move"], "move"),)
        else:
            raise ResponseParseError("response has no 'move' field")
        if not all(actions):
            raise ResponseParseError("empty move")
        return Decision(actions=actions, reasoning=reasoning)

    if expected_format == ACTIONS:
        obj = extract_object(text)
        raw = obj.get("actions")
        if isinstance(raw, str):
            raw = [raw]
        if not isinstance(raw, list) or not raw:
            raise ResponseParseError("response has no non-empty 'actions' list")
        actions = tuple(_text(v, "actions") for v in raw)
        return Decision(actions=actions, reasoning=_text(obj.get("reasoning", ""), "reasoning"))

    if expected_format.startswith("werewolf_"):
        kind = expected_format[len("werewolf_") :]
        if kind not in WEREWOLF_KINDS:
            raise ResponseParseError(f"unknown werewolf action kind {kind!r}")
        obj = extract_object(text)
        keys = [kind, "say"] if kind == "debate" else [kind]
        key = next((k for k in keys if k in obj), None) or _combined_key(obj)
        if key is None:
            raise ResponseParseError(f"response has no {kind!r} field")
        value = _text(obj[key], key)
        reasoning = _text(obj.get("reasoning", ""), "reasoning")
        if kind == "debate":
            return Decision.single(f"say {value}".rstrip(), reasoning)
        if not value:
            raise ResponseParseError(f"empty {kind!r} target")
        return Decision.single(f"{kind} {value}", reasoning)

    raise ResponseParseError(f"unknown response format {expected_format!r}")

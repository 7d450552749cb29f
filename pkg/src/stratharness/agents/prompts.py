"""Prompt templates: loading, startup validation and rendering.

A template is a text asset split into ``[section]`` blocks. ``[system]``
and ``[user]`` are required; a template may add
``[instructions.<kind>]`` blocks, one of which is substituted into the
``{instructions}`` placeholder according to the observation's
``action_kind``. Lines starting with ``#`` before the first section are
comments.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..core.types import Observation
from ..errors import TemplateError
from .parsing import STRATEGO
from .types import PromptBundle

# Fields every observation can supply.
BASE_FIELDS = frozenset({"text_view", "actor", "step_index", "phase_tag", "legal_actions"})

# Extra fields each built-in game puts in Observation.extras.
GAME_FIELDS: dict[str, frozenset[str]] = {
    "stratego": frozenset({"side", "side_letter", "opponent", "opponent_letter"}),
    "werewolf": frozenset(
        {"name", "role", "round", "remaining", "action_kind", "response_key", "candidates"}
    ),
}

_SECTION_RE = re.compile(r"^\[([a-z_.]+)\]\s*$")


@dataclass(frozen=True)
class Template:
    template_id: str
    game_id: str
    sections: dict[str, str] = field(default_factory=dict)

    @property
    def system(self) -> str:
        return self.sections["system"]

    @property
    def user(self) -> str:
        return self.sections["user"]

    def instructions(self) -> dict[str, str]:
        return {
            name.split(".", 1)[1]: body
            for name, body in self.sections.items()
            if name.startswith("instructions.")
        }


def parse_template(text: str, template_id: str, game_id: str) -> Template:
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in text.splitlines():
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current in sections:
                raise TemplateError(f"{template_id}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            if line.strip() and not line.lstrip().startswith("#"):
                raise TemplateError(f"{template_id}: text before the first section")
            continue
        sections[current].append(line)
    joined = {name: "\n".join(lines).strip("\n") for name, lines in sections.items()}
    for required in ("system", "user"):
        if required not in joined:
            raise TemplateError(f"{template_id}: missing [{required}] section")
    return Template(template_id, game_id, joined)


def placeholders(text: str) -> set[str]:
    try:
        return {name for _, name, _, _ in string.Formatter().parse(text) if name}
    except ValueError as exc:
        raise TemplateError(f"malformed placeholder: {exc}") from None


def validate_template(template: Template) -> None:
    """Raise TemplateError if any placeholder cannot be resolved for its game."""
    allowed = BASE_FIELDS | GAME_FIELDS.get(template.game_id, frozenset())
    instructions = template.instructions()
    problems = []
    for name, body in template.sections.items():
        found = placeholders(body)
        if name == "user" and "instructions" in found:
            if not instructions:
                problems.append("[user] uses {instructions} but no [instructions.*] section exists")
            found.discard("instructions")
        bad = sorted(found - allowed)
        if bad:
            problems.append(f"[{name}] has unresolvable placeholder(s): {', '.join(bad)}")
    if problems:
        raise TemplateError(f"template {template.template_id!r}: " + "; ".join(problems))


def _read_builtin(template_id: str) -> str | None:
    res = resources.files("stratharness.agents").joinpath("templates", f"{template_id}.txt")
    try:
        return res.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        return None


@lru_cache(maxsize=None)
def load_template(template_id: str, game_id: str | None = None) -> Template:
    """Load a built-in template by id, or a template file by path.

    Built-in ids equal their game id. A path needs ``game_id`` so the
    placeholder check knows which fields exist.
    """
    text = _read_builtin(template_id)
    if text is None:
        path = Path(template_id)
        if not path.is_file():
            raise TemplateError(f"no template {template_id!r}")
        text = path.read_text(encoding="utf-8")
    template = parse_template(text, template_id, game_id or template_id)
    validate_template(template)
    return template


def _fields(observation: Observation) -> dict[str, str]:
    values = {
        "text_view": observation.text_view,
        "actor": observation.actor,
        "step_index": str(observation.step_index),
        "phase_tag": observation.phase_tag,
        "legal_actions": "\n".join(observation.legal_actions),
    }
    values.update({k: str(v) for k, v in observation.extras.items()})
    return values


def expected_format(template: Template, observation: Observation) -> str:
    if template.game_id == "werewolf":
        return f"werewolf_{observation.extras.get('action_kind', 'vote')}"
    if template.game_id == "stratego":
        return STRATEGO
    return "actions"


def render_prompt(template: Template | str, observation: Observation, feedback: str | None = None) -> PromptBundle:
    """Substitute observation fields into ``template``.

    ``feedback`` (used on a re-query) is appended to the user text.
    """
    if isinstance(template, str):
        template = load_template(template)
    values = _fields(observation)
    try:
        system = template.system.format(**values)
        user_fields = dict(values)
        if "instructions" in placeholders(template.user):
            kind = observation.extras.get("action_kind", "")
            block = template.instructions().get(kind)
            if block is None:
                raise TemplateError(f"template {template.template_id!r} has no instructions for {kind!r}")
            user_fields["instructions"] = block.format(**values)
        user = template.user.format(**user_fields)
    except KeyError as exc:
        raise TemplateError(f"template {template.template_id!r}: unresolved field {exc}") from None
    if feedback:
        user = f"{user}\n\n{feedback}"
    return PromptBundle(system, user, expected_format(template, observation))


def validate_builtin_templates() -> list[str]:
    ids = []
    for game_id in GAME_FIELDS:
        load_template(game_id)
        ids.append(game_id)
    return ids

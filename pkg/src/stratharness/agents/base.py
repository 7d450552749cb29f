"""Agent implementations: seeded random, scripted fixtures, remote chat models."""

from __future__ import annotations

import abc
import random
from typing import Any, Sequence

from ..core.types import Decision, Observation
from ..errors import AgentFailure, ConfigError
from ..seeding import derive_seed
from .client import CassetteClient, ChatClient, ChatTransport
from .parsing import parse_response
from .prompts import Template, load_template, render_prompt
from .types import AgentKind, AgentSpec


class Agent(abc.ABC):
    """Maps an observation to a Decision.

    ``last_prompt`` and ``last_response`` hold the most recent exchange so
    the tracker can persist it. ``decide`` may raise ResponseParseError
    (a failed grounding attempt) or AgentFailure (nothing usable at all).
    """

    kind: str = "agent"
    max_retries: int = 2

    def __init__(self) -> None:
        self.last_prompt = ""
        self.last_response = ""

    @abc.abstractmethod
    def decide(self, observation: Observation, feedback: str | None = None) -> Decision: ...

    def close(self) -> None:
        pass


class RandomAgent(Agent):
    kind = "random"

    def __init__(self, seed: int):
        super().__init__()
        self.rng = random.Random(seed)

    def decide(self, observation: Observation, feedback: str | None = None) -> Decision:
        if not observation.legal_actions:
            raise AgentFailure("no legal actions to choose from")
        action = self.rng.choice(observation.legal_actions)
        self.last_prompt = ""
        self.last_response = action
        return Decision.single(action)


class ScriptedAgent(Agent):
    """Replays a fixed script; each entry is one action or a list of actions.

    Once the script runs out the agent plays the first legal action, so a
    short script never stalls a match.
    """

    kind = "scripted"

    def __init__(self, script: Sequence[Any]):
        super().__init__()
        self.script = list(script)
        self.position = 0

    def decide(self, observation: Observation, feedback: str | None = None) -> Decision:
        self.last_prompt = ""
        if self.position < len(self.script):
            entry = self.script[self.position]
            self.position += 1
        elif observation.legal_actions:
            entry = observation.legal_actions[0]
        else:
            raise AgentFailure("script exhausted and no legal action available")
        if isinstance(entry, (list, tuple)):
            actions = tuple(str(a) for a in entry)
        else:
            actions = (str(entry),)
        self.last_response = " | ".join(actions)
        return Decision(actions=actions)


class RemoteAgent(Agent):
    kind = "remote"

    def __init__(self, transport: ChatTransport, template: Template, temperature: float = 0.2,
                 max_retries: int = 2):
        super().__init__()
        self.transport = transport
        self.template = template
        self.temperature = temperature
        self.max_retries = max_retries

    def decide(self, observation: Observation, feedback: str | None = None) -> Decision:
        bundle = render_prompt(self.template, observation, feedback)
        self.last_prompt = f"[system]\n{bundle.system_text}\n[user]\n{bundle.user_text}"
        self.last_response = ""
        text = self.transport.complete(bundle, self.temperature)
        self.last_response = text
        return parse_response(text, bundle.expected_format)

    def close(self) -> None:
        close = getattr(self.transport, "close", None)
        if close is not None:
            close()


def agent_seed(spec: AgentSpec, scenario_seed: int, seat: str, run: int) -> int:
    if spec.seed is not None:
        return derive_seed(spec.seed, "run", run)
    return derive_seed(scenario_seed, "agent", seat, run)


def make_agent(spec: AgentSpec, game_id: str, seat: str, scenario_seed: int, run: int = 0,
               transport: ChatTransport | None = None) -> Agent:
    """Build the agent described by ``spec`` for one seat of one match."""
    if spec.kind is AgentKind.RANDOM:
        agent: Agent = RandomAgent(agent_seed(spec, scenario_seed, seat, run))
    elif spec.kind is AgentKind.SCRIPTED:
        agent = ScriptedAgent(spec.script)
    elif spec.kind is AgentKind.REMOTE:
        template = load_template(spec.template_id or game_id, game_id)
        if transport is None:
            if spec.cassette is not None:
                transport = CassetteClient(spec.cassette)
            elif spec.endpoint is not None:
                transport = ChatClient(spec.endpoint)
            else:
                raise ConfigError("remote agent has neither endpoint nor cassette")
        agent = RemoteAgent(transport, template, spec.temperature, spec.max_retries)
    else:
        raise ConfigError(f"unknown agent kind {spec.kind!r}")
    agent.max_retries = spec.max_retries
    return agent


__all__ = [
    "Agent",
    "RandomAgent",
    "RemoteAgent",
    "ScriptedAgent",
    "make_agent",
]

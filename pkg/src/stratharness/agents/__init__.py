"""Agents: seeded random, scripted fixtures and remote chat models."""

from __future__ import annotations

from .base import Agent, RandomAgent, RemoteAgent, ScriptedAgent, make_agent
from .client import CassetteClient, ChatClient, RateLimiter, GLOBAL_RATE_LIMITER, prompt_digest
from .grounding import ground, match_legal
from .parsing import extract_object, parse_response
from .prompts import load_template, render_prompt, validate_builtin_templates, validate_template
from .types import (
    AgentKind,
    AgentSpec,
    EndpointSpec,
    Exchange,
    GroundingPolicy,
    GroundingResult,
    PromptBundle,
)

__all__ = [
    "Agent",
    "AgentKind",
    "AgentSpec",
    "CassetteClient",
    "ChatClient",
    "EndpointSpec",
    "Exchange",
    "GLOBAL_RATE_LIMITER",
    "GroundingPolicy",
    "GroundingResult",
    "PromptBundle",
    "RandomAgent",
    "RateLimiter",
    "RemoteAgent",
    "ScriptedAgent",
    "extract_object",
    "ground",
    "load_template",
    "make_agent",
    "match_legal",
    "parse_response",
    "prompt_digest",
    "render_prompt",
    "validate_builtin_templates",
    "validate_template",
]

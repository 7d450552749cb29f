"""Agent configuration and grounding records."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..core.types import Decision
from ..errors import ConfigError


class AgentKind(str, enum.Enum):
    RANDOM = "random"
    SCRIPTED = "scripted"
    REMOTE = "remote"


class GroundingPolicy(str, enum.Enum):
    RETRY_THEN_RANDOM = "retry_then_random"
    REJECT = "reject"


@dataclass(frozen=True)
class EndpointSpec:
    base_url: str
    model_name: str
    api_key_ref: str | None = None
    timeout: float = 60.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ConfigError("endpoint.base_url is required")
        if not self.model_name:
            raise ConfigError("endpoint.model_name is required")
        if self.timeout <= 0:
            raise ConfigError("endpoint.timeout must be positive")
        if self.max_retries < 0:
            raise ConfigError("endpoint.max_retries must be >= 0")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> EndpointSpec:
        known = {"base_url", "model_name", "api_key_ref", "timeout", "max_retries"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown endpoint field(s): {', '.join(sorted(extra))}")
        return cls(**dict(data))

    def to_dict(self) -> dict[str, Any]:
        return {
            "base_url": self.base_url,
            "model_name": self.model_name,
            "api_key_ref": self.api_key_ref,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
        }


@dataclass(frozen=True)
class AgentSpec:
    """How to build the agent sitting in one seat.

    ``script`` is only read for scripted agents; each entry is either one
    action or a list of actions (a composite decision). ``cassette`` points
    a remote agent at recorded responses instead of the network.
    """

    kind: AgentKind
    seed: int | None = None
    endpoint: EndpointSpec | None = None
    temperature: float = 0.2
    template_id: str | None = None
    script: tuple[Any, ...] = ()
    cassette: str | None = None
    max_retries: int = 2
    policy: GroundingPolicy = GroundingPolicy.RETRY_THEN_RANDOM

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AgentKind(self.kind))
        object.__setattr__(self, "policy", GroundingPolicy(self.policy))
        object.__setattr__(self, "script", tuple(self.script))
        if not 0.0 <= self.temperature <= 2.0:
            raise ConfigError(f"temperature {self.temperature} is outside [0, 2]")
        if self.kind is AgentKind.REMOTE and self.endpoint is None and self.cassette is None:
            raise ConfigError("a remote agent needs an endpoint (or a cassette to replay)")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> AgentSpec:
        data = dict(data)
        known = {
            "kind", "seed", "endpoint", "temperature", "template_id",
            "script", "cassette", "max_retries", "policy",
        }
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown agent field(s): {', '.join(sorted(extra))}")
        if "kind" not in data:
            raise ConfigError("agent binding needs a 'kind'")
        try:
            kind = AgentKind(data["kind"])
        except ValueError:
            raise ConfigError(
                f"unknown agent kind {data['kind']!r}; expected one of "
                + ", ".join(k.value for k in AgentKind)
            ) from None
        data["kind"] = kind
        if data.get("endpoint") is not None:
            data["endpoint"] = EndpointSpec.from_dict(data["endpoint"])
        if "policy" in data:
            try:
                data["policy"] = GroundingPolicy(data["policy"])
            except ValueError:
                raise ConfigError(f"unknown grounding policy {data['policy']!r}") from None
        if "temperature" in data:
            data["temperature"] = float(data["temperature"])
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "temperature": self.temperature}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.endpoint is not None:
            out["endpoint"] = self.endpoint.to_dict()
        if self.template_id is not None:
            out["template_id"] = self.template_id
        if self.script:
            out["script"] = [list(s) if isinstance(s, (list, tuple)) else s for s in self.script]
        if self.cassette is not None:
            out["cassette"] = self.cassette
        out["max_retries"] = self.max_retries
        out["policy"] = self.policy.value
        return out


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    expected_format: str

    def messages(self) -> list[dict[str, str]]:
        return [
            {"role": "system", "content": self.system_text},
            {"role": "user", "content": self.user_text},
        ]


@dataclass(frozen=True)
class Exchange:
    """One model output: the prompt that produced it and what came back."""

    prompt_text: str
    raw_response: str
    parsed: Decision | None
    valid: bool


@dataclass
class GroundingResult:
    attempts: int
    succeeded: bool
    final_action: str
    fallback_used: bool
    decision: Decision | None = None
    exchanges: list[Exchange] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")
        if not self.succeeded and not self.fallback_used:
            raise ValueError("a failed grounding must use the fallback")

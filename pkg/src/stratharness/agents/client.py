"""Chat-completion transport: live HTTP, cassette replay and rate limiting."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import AgentFailure, ConfigError
from .types import EndpointSpec, PromptBundle

log = logging.getLogger(__name__)

RETRY_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


def prompt_digest(bundle: PromptBundle) -> str:
    """Key for cassette lookups: sha256 over the rendered prompt only.

    Model and temperature are deliberately left out so one recording can be
    replayed regardless of endpoint settings.
    """
    h = hashlib.sha256()
    h.update(bundle.system_text.encode("utf-8"))
    h.update(b"\x00")
    h.update(bundle.user_text.encode("utf-8"))
    return h.hexdigest()


class ChatTransport(Protocol):
    def complete(self, bundle: PromptBundle, temperature: float) -> str: ...


class RateLimiter:
    """Process-wide minimum spacing between requests."""

    def __init__(self, requests_per_second: float | None = None):
        self._lock = threading.Lock()
        self._next = 0.0
        self.configure(requests_per_second)

    def configure(self, requests_per_second: float | None) -> None:
        if requests_per_second is not None and requests_per_second <= 0:
            raise ConfigError("rate limit must be positive")
        self.interval = 0.0 if not requests_per_second else 1.0 / requests_per_second

    def acquire(self) -> None:
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._next - now
            self._next = max(now, self._next) + self.interval
        if wait > 0:
            time.sleep(wait)


GLOBAL_RATE_LIMITER = RateLimiter()


def resolve_api_key(endpoint: EndpointSpec) -> str | None:
    if endpoint.api_key_ref is None:
        return None
    key = os.environ.get(endpoint.api_key_ref)
    if not key:
        raise ConfigError(
            f"environment variable {endpoint.api_key_ref!r} (endpoint api_key_ref) is not set"
        )
    return key


class ChatClient:
    """POST ``{base_url}/chat/completions`` with retries on transient errors."""

    def __init__(
        self,
        endpoint: EndpointSpec,
        *,
        transport: httpx.BaseTransport | None = None,
        limiter: RateLimiter | None = None,
        backoff: float = 0.5,
        sleep=time.sleep,
    ):
        self.endpoint = endpoint
        self._key = resolve_api_key(endpoint)
        headers = {"Content-Type": "application/json"}
        if self._key:
            headers["Authorization"] = f"Bearer {self._key}"
        self._http = httpx.Client(
            base_url=endpoint.base_url.rstrip("/"),
            headers=headers,
            timeout=endpoint.timeout,
            transport=transport,
        )
        self._limiter = limiter or GLOBAL_RATE_LIMITER
        self._backoff = backoff
        self._sleep = sleep

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> ChatClient:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def complete(self, bundle: PromptBundle, temperature: float) -> str:
        payload = {
            "model": self.endpoint.model_name,
            "messages": bundle.messages(),
            "temperature": temperature,
        }
        last_error = "no attempt made"
        for attempt in range(self.endpoint.max_retries + 1):
            if attempt:
                self._sleep(self._backoff * (2 ** (attempt - 1)))
            self._limiter.acquire()
            try:
                resp = self._http.post("/chat/completions", json=payload)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                log.warning("chat request failed (attempt %d): %s", attempt + 1, last_error)
                continue
            if resp.status_code in RETRY_STATUS:
                last_error = f"HTTP {resp.status_code}"
                log.warning("chat request returned %s (attempt %d)", resp.status_code, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise AgentFailure(f"endpoint rejected the request: HTTP {resp.status_code}")
            try:
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError):
                last_error = "malformed completion body"
                continue
        raise AgentFailure(
            f"chat endpoint failed after {self.endpoint.max_retries + 1} attempt(s): {last_error}"
        )


class CassetteClient:
    """Replays recorded responses keyed by :func:`prompt_digest`.

    The cassette is a JSON object ``{digest: response_text}``. With
    ``record_from`` set, misses are forwarded to that client and stored; call
    :meth:`save` to persist them.
    """

    def __init__(self, path: str | Path | None = None, responses: dict[str, str] | None = None,
                 record_from: ChatTransport | None = None):
        self.path = Path(path) if path is not None else None
        self.responses: dict[str, str] = dict(responses or {})
        if self.path is not None and self.path.exists():
            try:
                loaded = json.loads(self.path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"cassette {self.path} is not valid JSON: {exc}") from None
            if not isinstance(loaded, dict):
                raise ConfigError(f"cassette {self.path} must be a JSON object")
            self.responses.update(loaded)
        self.record_from = record_from

    def complete(self, bundle: PromptBundle, temperature: float) -> str:
        key = prompt_digest(bundle)
        if key in self.responses:
            return self.responses[key]
        if self.record_from is not None:
            text = self.record_from.complete(bundle, temperature)
            self.responses[key] = text
            return text
        raise AgentFailure(f"no recorded response for prompt digest {key[:12]}")

    def add(self, bundle: PromptBundle, response: str) -> str:
        key = prompt_digest(bundle)
        self.responses[key] = response
        return key

    def save(self, path: str | Path | None = None) -> Path:
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ConfigError("cassette has no path to save to")
        target.write_text(json.dumps(self.responses, indent=2, sort_keys=True), encoding="utf-8")
        return target

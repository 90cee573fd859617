"""Chat-completion wire client with bounded concurrency and exponential backoff."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import httpx

from ..errors import AuthError, ConfigError, ProtocolError, TransportError

log = logging.getLogger(__name__)

DEFAULT_TOKEN_ENV = "MMH_LLM_TOKEN"


@dataclass(frozen=True)
class LlmClientConfig:
    endpoint: str = "http://127.0.0.1:8000/v1/chat/completions"
    model: str = "gpt-4"
    token_env: str = DEFAULT_TOKEN_ENV
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = 0.0
    max_inflight: int = 4
    backoff_base: float = 1.0
    backoff_factor: float = 2.0

    def __post_init__(self):
        if not self.timeout > 0:
            raise ConfigError("llm.timeout must be > 0")
        if self.max_retries < 0:
            raise ConfigError("llm.max_retries must be >= 0")
        if self.max_inflight < 1:
            raise ConfigError("llm.max_inflight must be >= 1")
        if self.backoff_base < 0 or self.backoff_factor < 1:
            raise ConfigError("backoff_base must be >= 0 and backoff_factor >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "LlmClientConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown llm keys: {sorted(extra)}")
        return cls(**doc)


def _normalize_messages(messages) -> list[dict]:
    out = []
    for m in messages:
        if isinstance(m, dict):
            role, content = m.get("role"), m.get("content")
        else:
            role, content = m
        if not isinstance(role, str) or not isinstance(content, str):
            raise ValueError(f"message must have string role and content: {m!r}")
        out.append({"role": role, "content": content})
    if not out:
        raise ValueError("messages must be non-empty")
    return out


@dataclass
class ChatClient:
    """Posts ``{model, messages, temperature}`` and returns ``choices[0].message.content``.

    Connection failures, timeouts, HTTP 429 and 5xx are retried with delays
    ``base * factor**k``. 401/403 fail at once with AuthError.
    """

    config: LlmClientConfig = field(default_factory=LlmClientConfig)
    sleep: Callable[[float], None] = time.sleep
    transport: httpx.BaseTransport | None = None

    def __post_init__(self):
        self._slots = threading.BoundedSemaphore(self.config.max_inflight)
        self._lock = threading.Lock()
        self.backoffs: list[float] = []
        self.requests_sent = 0
        self._http = httpx.Client(timeout=self.config.timeout, transport=self.transport)

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post_once(self, body: dict) -> httpx.Response:
        with self._slots:
            with self._lock:
                self.requests_sent += 1
            return self._http.post(self.config.endpoint, json=body, headers=self._headers())

    def chat(self, messages: Sequence) -> str:
        body = {
            "model": self.config.model,
            "messages": _normalize_messages(messages),
            "temperature": self.config.temperature,
        }
        attempts = self.config.max_retries + 1
        last = "no attempt made"
        for attempt in range(attempts):
            if attempt:
                delay = self.config.backoff_base * self.config.backoff_factor ** (attempt - 1)
                with self._lock:
                    self.backoffs.append(delay)
                log.info("retrying chat request in %.2fs (%s)", delay, last)
                self.sleep(delay)
            try:
                resp = self._post_once(body)
            except httpx.TransportError as exc:  # timeouts and connection errors
                last = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"HTTP {resp.status_code} from {self.config.endpoint}")
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise ProtocolError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return _content(resp)
        raise TransportError(f"chat request failed after {attempts} attempt(s): {last}")


def _content(resp: httpx.Response) -> str:
    try:
        doc = resp.json()
        content = doc["choices"][0]["message"]["content"]
    except (json.JSONDecodeError, ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"unexpected response body: {resp.text[:200]!r}") from exc
    if not isinstance(content, str):
        raise ProtocolError("choices[0].message.content is not text")
    return content


def chat_request(client: ChatClient, messages: Sequence) -> str:
    """Send one chat-completion request and return the first choice's text."""
    return client.chat(messages)

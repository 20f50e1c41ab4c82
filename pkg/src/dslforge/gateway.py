"""Thread-based conversation with an LLM backend.

Two backends with identical semantics: a live OpenAI-compatible chat HTTP
endpoint (threads are emulated client-side by resending the full history)
and a deterministic scripted mock consuming a transcript.  A failed run
leaves the thread exactly as it was before the call.
"""

from __future__ import annotations

import json
import os
import secrets
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Protocol

import requests

DEFAULT_API_KEY_VAR = "DSL_FORGE_API_KEY"
DEFAULT_TIMEOUT = 60.0


class GatewayError(Exception):
    code = "GATEWAY_ERROR"


class Timeout(GatewayError):
    code = "GATEWAY_TIMEOUT"


class TransportError(GatewayError):
    code = "GATEWAY_TRANSPORT"


class MockExhausted(GatewayError):
    code = "MOCK_EXHAUSTED"


@dataclass(frozen=True)
class Message:
    role: str  # 'system' | 'user' | 'assistant'
    content: str
    at: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content, "at": self.at}


@dataclass
class Thread:
    id: str
    messages: list[Message] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "messages": [m.to_dict() for m in self.messages]}


@dataclass(frozen=True)
class BackendConfig:
    mode: str  # 'http' | 'mock'
    endpoint: str | None = None
    model: str | None = None
    api_key_var: str = DEFAULT_API_KEY_VAR
    transcript_path: str | None = None
    timeout: float = DEFAULT_TIMEOUT
    structured_output: bool = True
    retries: int = 0
    extra: dict | None = None  # sampling passthrough (temperature etc.)


class Backend(Protocol):
    def complete(self, messages: list[Message]) -> str: ...


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class MockBackend:
    """Scripted answers: ``[{match?: str, answer: str}, ...]`` consumed in order.

    A prompt first takes the earliest unconsumed entry whose ``match``
    substring occurs in it; otherwise the next unconsumed unkeyed entry.
    """

    def __init__(self, entries: list[dict] | str | Path):
        if isinstance(entries, (str, Path)):
            entries = json.loads(Path(entries).read_text())
        self.entries = [dict(e) for e in entries]
        self.consumed = [False] * len(self.entries)
        self.requests: list[list[Message]] = []  # recorded for inspection

    def complete(self, messages: list[Message]) -> str:
        self.requests.append(list(messages))
        prompt = messages[-1].content
        for i, entry in enumerate(self.entries):
            if not self.consumed[i] and entry.get("match") and entry["match"] in prompt:
                self.consumed[i] = True
                return entry["answer"]
        for i, entry in enumerate(self.entries):
            if not self.consumed[i] and not entry.get("match"):
                self.consumed[i] = True
                return entry["answer"]
        raise MockExhausted("mock transcript has no answer left")


class HttpBackend:
    """OpenAI-compatible chat-completions client; the full history is sent each call."""

    def __init__(self, config: BackendConfig, session: requests.sessions.Session | None = None):
        if not config.endpoint or not config.model:
            raise ValueError("http backend needs endpoint and model")
        self.config = config
        self.session = session or requests.Session()

    def complete(self, messages: list[Message]) -> str:
        cfg = self.config
        body: dict = {
            "model": cfg.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
        }
        if cfg.structured_output:
            body["response_format"] = {"type": "json_object"}
        if cfg.extra:
            body.update(cfg.extra)
        headers = {}
        token = os.environ.get(cfg.api_key_var)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        url = cfg.endpoint.rstrip("/") + "/chat/completions"
        last_exc: Exception | None = None
        for _ in range(cfg.retries + 1):
            try:
                resp = self.session.post(url, json=body, headers=headers, timeout=cfg.timeout)
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except requests.Timeout as exc:
                last_exc = Timeout(str(exc))
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_exc = TransportError(str(exc))
        raise last_exc  # type: ignore[misc]


def make_backend(config: BackendConfig) -> Backend:
    if config.mode == "mock":
        if config.transcript_path is None:
            raise ValueError("mock backend needs a transcript path")
        return MockBackend(config.transcript_path)
    if config.mode == "http":
        return HttpBackend(config)
    raise ValueError(f"unknown backend mode '{config.mode}'")


class Gateway:
    """Owns threads over one backend; histories are append-only."""

    def __init__(self, backend: Backend, persist: Callable[[Thread], None] | None = None):
        self.backend = backend
        self._persist = persist
        self.threads: dict[str, Thread] = {}

    def open_thread(self, system_instructions: str) -> Thread:
        if not system_instructions:
            raise ValueError("system instructions are required")
        thread = Thread(id=secrets.token_hex(16))
        thread.messages.append(Message("system", system_instructions, _now()))
        self.threads[thread.id] = thread
        if self._persist:
            self._persist(thread)
        return thread

    def get_thread(self, thread_id: str) -> Thread:
        return self.threads[thread_id]

    def run(self, thread: Thread, prompt: str) -> str:
        """Send one prompt, get exactly one answer; the failed prompt is not appended."""
        if not prompt:
            raise ValueError("prompt must be non-empty")
        user = Message("user", prompt, _now())
        answer_text = self.backend.complete(thread.messages + [user])
        thread.messages.append(user)
        thread.messages.append(Message("assistant", answer_text, _now()))
        if self._persist:
            self._persist(thread)
        return answer_text

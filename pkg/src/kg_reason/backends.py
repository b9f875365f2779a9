"""Pluggable completion backends.

A backend is anything with ``complete(prompt, stage) -> str``. Two
implementations ship here: a deterministic mock replaying a script file,
and an OpenAI-compatible chat-completions client with retry. The endpoint
string ``mock:<path>`` selects the mock; anything else is treated as the
base URL of a live server.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .errors import BackendError, MockScriptError

API_KEY_ENV = "KG_REASON_API_KEY"
CHAT_COMPLETIONS_PATH = "/v1/chat/completions"


@dataclass(frozen=True)
class BackendConfig:
    """Connection and sampling settings for a completion backend."""

    endpoint: str
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.2
    top_p: float = 0.1
    max_retries: int = 2
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class Backend(Protocol):
    def complete(self, prompt: str, stage: str) -> str: ...


def prompt_hash(prompt: str) -> str:
    """SHA-256 hex digest of the rendered prompt, used as a mock script key."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class MockEntry:
    stage: str
    match_kind: str  # "hash" | "sequence"
    key: str | int
    response: str


class MockBackend:
    """Replays scripted responses.

    Hash entries match on (stage, sha256 of the rendered prompt) and take
    precedence. Sequence entries are consumed per stage in script order; the
    i-th call at a stage that falls through to sequence matching gets the
    stage's i-th sequence entry. Index assignment is serialized, so the
    backend is safe for concurrent callers.
    """

    def __init__(self, entries: list[MockEntry]):
        self._by_hash: dict[tuple[str, str], str] = {}
        self._sequences: dict[str, list[str]] = {}
        for e in entries:
            if e.match_kind == "hash":
                self._by_hash[(e.stage, str(e.key))] = e.response
            elif e.match_kind == "sequence":
                self._sequences.setdefault(e.stage, []).append(e.response)
            else:
                raise MockScriptError(e.stage, "-", f"bad match_kind {e.match_kind!r}")
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_path(cls, path: str) -> "MockBackend":
        entries: list[MockEntry] = []
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    entries.append(
                        MockEntry(
                            stage=record["stage"],
                            match_kind=record["match_kind"],
                            key=record.get("key", ""),
                            response=record["response"],
                        )
                    )
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise MockScriptError("-", "-", f"{path}:{lineno}: bad record ({exc})")
        return cls(entries)

    def complete(self, prompt: str, stage: str) -> str:
        digest = prompt_hash(prompt)
        hashed = self._by_hash.get((stage, digest))
        if hashed is not None:
            return hashed
        with self._lock:
            index = self._cursor.get(stage, 0)
            self._cursor[stage] = index + 1
        sequence = self._sequences.get(stage, [])
        if index < len(sequence):
            return sequence[index]
        raise MockScriptError(stage, digest, f"no entry for call #{index + 1}")


@dataclass
class HttpBackend:
    """OpenAI-compatible chat-completions client with exponential backoff.

    Sends the rendered prompt as a single user message. The bearer token is
    read from the ``KG_REASON_API_KEY`` environment variable when present.
    """

    config: BackendConfig
    backoff_base: float = field(default=0.5, repr=False)

    def _url(self) -> str:
        base = self.config.endpoint.rstrip("/")
        if base.endswith("/chat/completions"):
            return base
        if base.endswith("/v1"):
            return base + "/chat/completions"
        return base + CHAT_COMPLETIONS_PATH

    def complete(self, prompt: str, stage: str) -> str:
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                response = requests.post(
                    self._url(), json=payload, headers=headers, timeout=self.config.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
            else:
                if response.status_code == 200:
                    try:
                        return response.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, ValueError) as exc:
                        last_error = exc
                elif response.status_code == 429 or response.status_code >= 500:
                    last_error = BackendError(f"server returned {response.status_code}")
                else:
                    # client errors do not resolve by retrying
                    raise BackendError(
                        f"request rejected with {response.status_code}: {response.text[:200]}"
                    )
            if attempt < attempts - 1:
                time.sleep(self.backoff_base * (2**attempt))
        raise BackendError(f"request failed after {attempts} attempts: {last_error}")


def make_backend(config: BackendConfig) -> Backend:
    """Build a backend from its configuration."""
    if config.endpoint.startswith("mock:"):
        return MockBackend.from_path(config.endpoint[len("mock:"):])
    return HttpBackend(config)


def as_backend(backend: "Backend | BackendConfig") -> Backend:
    """Accept either a ready backend or a config to build one from."""
    if isinstance(backend, BackendConfig):
        return make_backend(backend)
    return backend

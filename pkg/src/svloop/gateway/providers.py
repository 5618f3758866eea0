"""Completion providers: a deterministic scripted mock and a live
HTTP chat-completion client.

A mock script is a directory of numbered response files plus an
``index.json`` mapping prompt digests to files; digest hits replay
without consuming the sequence, anything else is served next-in-order.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Optional

from ..errors import ProviderRejection, ProviderTimeout, ScriptExhausted
from .config import GenConfig, ProviderBinding

INDEX_NAME = "index.json"


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedMockProvider:
    """Replays recorded responses; safe for concurrent callers."""

    def __init__(self, responses=(), digest_map: Optional[dict[str, str]] = None):
        self._sequence = list(responses)
        self._digests = dict(digest_map or {})
        self._cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def from_dir(cls, path) -> "ScriptedMockProvider":
        path = Path(path)
        index_file = path / INDEX_NAME
        digest_map = {}
        sequence_names = []
        if index_file.exists():
            index = json.loads(index_file.read_text("utf-8"))
            for digest, name in index.get("digests", {}).items():
                digest_map[digest] = (path / name).read_text("utf-8")
            sequence_names = index.get("sequence", [])
        else:
            sequence_names = sorted(
                p.name for p in path.glob("response-*.txt")
            )
        sequence = [(path / name).read_text("utf-8") for name in sequence_names]
        return cls(sequence, digest_map)

    def complete(self, prompt: str, cfg: GenConfig) -> str:
        digest = prompt_digest(prompt)
        with self._lock:
            if digest in self._digests:
                return self._digests[digest]
            if self._cursor >= len(self._sequence):
                raise ScriptExhausted(
                    f"mock script exhausted after {self._cursor} sequential responses"
                )
            response = self._sequence[self._cursor]
            self._cursor += 1
            return response

    @property
    def calls_made(self) -> int:
        return self._cursor


def save_mock_script(path, sequence=(), digest_responses: Optional[dict[str, str]] = None):
    """Write a script directory consumable by ScriptedMockProvider."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    index = {"digests": {}, "sequence": []}
    counter = 0
    for text in sequence:
        counter += 1
        name = f"response-{counter:03d}.txt"
        (path / name).write_text(text, "utf-8")
        index["sequence"].append(name)
    for digest, text in sorted((digest_responses or {}).items()):
        counter += 1
        name = f"response-{counter:03d}.txt"
        (path / name).write_text(text, "utf-8")
        index["digests"][digest] = name
    (path / INDEX_NAME).write_text(json.dumps(index, indent=2, sort_keys=True), "utf-8")


class RecordingProvider:
    """Wraps another provider and records prompt/response pairs so a run
    can later be replayed offline through the scripted mock."""

    def __init__(self, inner):
        self.inner = inner
        self.pairs: list[tuple[str, str, str]] = []  # (digest, prompt, response)
        self._lock = threading.Lock()

    def complete(self, prompt: str, cfg: GenConfig) -> str:
        response = self.inner.complete(prompt, cfg)
        with self._lock:
            self.pairs.append((prompt_digest(prompt), prompt, response))
        return response

    def save_script(self, path):
        save_mock_script(path, digest_responses={d: r for d, _, r in self.pairs})


class LiveHttpProvider:
    """Chat-completion style HTTP client; credentials never reach logs."""

    def __init__(self, binding: ProviderBinding, log_dir=None):
        if binding.kind != "live":
            raise ProviderRejection("LiveHttpProvider requires a live binding")
        self.binding = binding
        self.log_dir = Path(log_dir) if log_dir else None
        self._semaphore = threading.Semaphore(binding.concurrency)
        self._counter = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str, cfg: GenConfig) -> str:
        import requests

        body = {
            "model": self.binding.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.binding.credential}"}
        last_error = None
        with self._semaphore:
            for _ in range(self.binding.retries + 1):
                try:
                    response = requests.post(
                        self.binding.endpoint,
                        json=body,
                        headers=headers,
                        timeout=self.binding.timeout,
                    )
                except requests.Timeout as exc:
                    last_error = exc
                    continue
                except requests.RequestException as exc:
                    raise ProviderRejection(f"provider request failed: {exc}") from exc
                if response.status_code != 200:
                    raise ProviderRejection(
                        f"provider returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                payload = response.json()
                try:
                    text = payload["choices"][0]["message"]["content"]
                except (KeyError, IndexError, TypeError) as exc:
                    raise ProviderRejection("malformed provider response body") from exc
                self._log(body, payload)
                return text
        raise ProviderTimeout(
            f"provider timed out after {self.binding.retries + 1} attempts"
        ) from last_error

    def _log(self, request_body, response_body):
        if self.log_dir is None:
            return
        self.log_dir.mkdir(parents=True, exist_ok=True)
        with self._lock:
            self._counter += 1
            n = self._counter
        record = {
            "request": dict(request_body, authorization="<redacted>"),
            "response": response_body,
        }
        (self.log_dir / f"exchange-{n:04d}.json").write_text(
            json.dumps(record, indent=2, sort_keys=True), "utf-8"
        )


def build_provider(binding: ProviderBinding, log_dir=None):
    if binding.kind == "mock":
        return ScriptedMockProvider.from_dir(binding.script_dir)
    return LiveHttpProvider(binding, log_dir)


def complete(binding: ProviderBinding, prompt: str, cfg: GenConfig) -> str:
    """One-shot convenience; loops should build a provider once instead."""
    return build_provider(binding).complete(prompt, cfg)

"""Uniform access to any instructable LLM, plus a deterministic mock.

The gateway renders prompts and moves text; it never interprets model
output. Parsing is each consumer's job.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Mapping, Protocol

import requests

from .errors import BackendUnavailable, FixtureMiss, ValidationError
from .prompts import PromptTask, TaskSpec, default_tasks

logger = logging.getLogger(__name__)

ENV_URL = "FACTFORGE_LLM_URL"
ENV_TOKEN = "FACTFORGE_LLM_TOKEN"
ENV_MODEL = "FACTFORGE_LLM_MODEL"


def fixture_key(prompt: str) -> str:
    """SHA-256 of the rendered prompt; the mock fixture file's key."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def render_prompt(task: PromptTask, payload: str,
                  tasks: Mapping[PromptTask, TaskSpec] | None = None) -> str:
    """Deterministic concatenation: instruction, demonstrations, payload.

    Injective per task: the payload sits verbatim between fixed frames,
    so distinct payloads always yield distinct prompts.
    """
    spec = (tasks or _DEFAULT_TASKS)[task]
    if not spec.demonstrations:
        raise ValidationError(f"task {task.value} has no demonstrations")
    blocks = [spec.instruction]
    for demo_in, demo_out in spec.demonstrations:
        blocks.append(f"INPUT:\n{demo_in}\nOUTPUT:\n{demo_out}")
    blocks.append(f"INPUT:\n{payload}\nOUTPUT:\n")
    return "\n\n".join(blocks)


_DEFAULT_TASKS = default_tasks()


class LlmBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


class MockBackend:
    """Deterministic fixture-table backend for hermetic tests.

    The table maps ``fixture_key(prompt)`` to the response text and is
    read-only after construction; identical prompts always produce
    identical output.
    """

    def __init__(self, fixtures: Mapping[str, str]):
        self._fixtures = dict(fixtures)
        self.calls = 0

    @classmethod
    def from_file(cls, path: str) -> "MockBackend":
        with open(path, encoding="utf-8") as fh:
            table = json.load(fh)
        if not isinstance(table, dict):
            raise ValidationError(f"fixture file {path} must hold a JSON object")
        return cls(table)

    def complete(self, prompt: str) -> str:
        self.calls += 1
        key = fixture_key(prompt)
        try:
            return self._fixtures[key]
        except KeyError:
            head = prompt if len(prompt) <= 200 else prompt[:200] + "..."
            raise FixtureMiss(
                f"no fixture for prompt key {key} (prompt tail: {head[-120:]!r})"
            ) from None


@dataclass
class HttpBackend:
    """Generic completion endpoint: POST {model, prompt, max_tokens}.

    The response text is extracted at ``response_path`` (dot-separated,
    integers index into lists), so any completion-style API can be
    plugged in. Transient failures are retried with exponential backoff;
    credentials are read from the environment and never logged.
    """

    url: str
    model: str = "default"
    token_env: str = ENV_TOKEN
    timeout_s: float = 30.0
    max_retries: int = 3
    backoff_base_s: float = 1.0
    max_tokens: int = 512
    response_path: str = "text"
    _session: requests.Session = field(default_factory=requests.Session, repr=False)

    def complete(self, prompt: str) -> str:
        headers = {}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {"model": self.model, "prompt": prompt, "max_tokens": self.max_tokens}
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_base_s * 2 ** (attempt - 1))
            try:
                resp = self._session.post(self.url, json=body, headers=headers,
                                          timeout=self.timeout_s)
            except requests.RequestException as exc:
                last_error = type(exc).__name__
                logger.warning("llm request failed (%s), attempt %d/%d",
                               last_error, attempt + 1, self.max_retries + 1)
                continue
            if resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                logger.warning("llm endpoint returned %s, attempt %d/%d",
                               last_error, attempt + 1, self.max_retries + 1)
                continue
            if resp.status_code != 200:
                raise BackendUnavailable(
                    f"llm endpoint rejected the request: HTTP {resp.status_code}",
                    retriable=False,
                )
            return self._extract(resp)
        raise BackendUnavailable(f"llm endpoint unreachable after retries: {last_error}")

    def _extract(self, resp: requests.Response) -> str:
        try:
            node = resp.json()
        except ValueError as exc:
            raise BackendUnavailable(f"llm endpoint sent non-JSON: {exc}",
                                     retriable=False) from None
        for part in self.response_path.split("."):
            try:
                node = node[int(part)] if part.lstrip("-").isdigit() else node[part]
            except (KeyError, IndexError, TypeError):
                raise BackendUnavailable(
                    f"response field {self.response_path!r} missing", retriable=False
                ) from None
        if not isinstance(node, str):
            raise BackendUnavailable(
                f"response field {self.response_path!r} is not text", retriable=False
            )
        return node


def complete(task: PromptTask, payload: str, backend: LlmBackend,
             tasks: Mapping[PromptTask, TaskSpec] | None = None) -> str:
    """Render the prompt for one task and return the raw model text."""
    if not payload.strip():
        raise ValidationError("payload must be non-empty")
    return backend.complete(render_prompt(task, payload, tasks))


def ask(query: str, backend: LlmBackend) -> str:
    """Forward a free-form user question to the backend, untemplated."""
    if not query.strip():
        raise ValidationError("query must be non-empty")
    return backend.complete(query)

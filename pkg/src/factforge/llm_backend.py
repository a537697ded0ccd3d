"""Pluggable LLM backend: live chat-completions client, disk cache, and a
deterministic mock for offline runs.

Every request flows through the same path: cache lookup, transport call with
bounded retries, JSON payload validation (with one automatic re-prompt on a
malformed response), then an atomic cache write of the successful raw text.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol

import requests

from .errors import (
    BackendError,
    ConfigurationError,
    PayloadParseError,
    PayloadSchemaError,
    TransientFailureError,
)
from .segmenter import DEFAULT_CONFIG, segment

logger = logging.getLogger(__name__)

TASK_SUMMARIZE = "summarize"
TASK_DECOMPOSE = "decompose"
TASK_ENTAIL = "entail"
TASKS = (TASK_SUMMARIZE, TASK_DECOMPOSE, TASK_ENTAIL)

API_KEY_ENV = "FACTFORGE_API_KEY"
API_BASE_ENV = "FACTFORGE_API_BASE"

DEFAULT_CACHE_DIR = ".factforge-cache"

MAX_ATTEMPTS = 5
_BACKOFF_BASE_SECONDS = 0.5

_FORMAT_REMINDER = (
    "Reminder: respond **only** with a single JSON object in exactly the "
    "format requested above, with no extra text."
)


@dataclass(frozen=True)
class LlmRequest:
    task: str
    prompt: str
    model_id: str
    temperature: float = 0.0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")


@dataclass(frozen=True)
class LlmResponse:
    raw_text: str
    parsed: object
    from_cache: bool = False


def cache_key(req: LlmRequest) -> str:
    """Stable digest of (task, prompt, model_id, temperature)."""
    identity = json.dumps(
        {
            "task": req.task,
            "prompt": req.prompt,
            "model_id": req.model_id,
            "temperature": req.temperature,
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(identity.encode("utf-8")).hexdigest()


def extract_json_object(raw_text: str) -> dict:
    """Return the first balanced JSON object in raw_text.

    Tolerates surrounding prose and Markdown code fences; strings and escape
    sequences inside the object are respected while matching braces.
    """
    start = raw_text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(raw_text)):
            ch = raw_text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    candidate = raw_text[start : i + 1]
                    try:
                        obj = json.loads(candidate)
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
        start = raw_text.find("{", start + 1)
    raise PayloadParseError("no balanced JSON object found in response")


def parse_json_payload(raw_text: str, task: str):
    """Extract and validate the task payload from a raw model response.

    summarize -> str, decompose -> list[str] (non-empty), entail -> bool.
    """
    if not raw_text:
        raise PayloadParseError("empty response text")
    obj = extract_json_object(raw_text)
    if task == TASK_SUMMARIZE:
        value = obj.get("summary")
        if not isinstance(value, str) or not value.strip():
            raise PayloadSchemaError(f"summarize payload needs a 'summary' string, got {obj!r}")
        return value
    if task == TASK_DECOMPOSE:
        value = obj.get("facts")
        if (
            not isinstance(value, list)
            or not value
            or not all(isinstance(f, str) and f.strip() for f in value)
        ):
            raise PayloadSchemaError(
                f"decompose payload needs a non-empty 'facts' string list, got {obj!r}"
            )
        return list(value)
    if task == TASK_ENTAIL:
        value = obj.get("entails")
        if not isinstance(value, bool):
            raise PayloadSchemaError(f"entail payload needs a boolean 'entails', got {obj!r}")
        return value
    raise ValueError(f"unknown task {task!r}")


class Transport(Protocol):
    """One raw completion call; retries and caching live in the backend."""

    name: str

    def send(self, req: LlmRequest) -> str: ...


class HttpTransport:
    """POST {base_url}/chat/completions with the standard chat body."""

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        timeout: float = 120.0,
        session: requests.Session | None = None,
    ):
        self.base_url = (base_url or os.environ.get(API_BASE_ENV) or "").rstrip("/")
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        self.session = session or requests.Session()
        self.name = "live"
        if not self.base_url:
            raise ConfigurationError(f"no API base URL; set {API_BASE_ENV}")
        if not self.api_key:
            raise ConfigurationError(f"no API credential; set {API_KEY_ENV}")

    def send(self, req: LlmRequest) -> str:
        body = {
            "model": req.model_id,
            "temperature": req.temperature,
            "messages": [{"role": "user", "content": req.prompt}],
        }
        try:
            resp = self.session.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransientFailureError(f"connection failure: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientFailureError(
                f"retryable HTTP {resp.status_code}", status=resp.status_code
            )
        if resp.status_code != 200:
            raise BackendError(
                f"HTTP {resp.status_code}: {resp.text[:200]}", status=resp.status_code
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from exc


# ---------------------------------------------------------------------------
# Deterministic mock transport. The rules are intentionally simple enough to
# apply by hand, so every downstream behaviour has a desk-computable oracle:
#   summarize: first, middle (index n//2) and last document sentences, joined
#   decompose: sentence split, then conjunction split on " and " / ", ";
#              continuation fragments that start lowercase inherit the first
#              word of the sentence as their subject
#   entail:    true iff >= 60% of the fact's distinct content words
#              (lowercased, stopwords removed) occur in the sentence
# ---------------------------------------------------------------------------

MOCK_STOPWORDS = frozenset(
    """
    a an the is are was were be been being am of in on at to for with by from
    as and or but not no it its this that these those he she they we you i
    his her their our your has have had do does did will would can could than
    then there here when where which who whom what why how all any both each
    into over under about after before between during out up down only also
    very so such own same s t d ll re ve
    """.split()
)

_WORD = re.compile(r"[a-z0-9']+")


def content_words(text: str) -> set[str]:
    return {w for w in _WORD.findall(text.lower()) if w not in MOCK_STOPWORDS}


def mock_entails(sentence: str, fact: str) -> bool:
    """True iff at least 60% of the fact's content words occur in the sentence."""
    fact_words = content_words(fact)
    if not fact_words:
        return False
    sent_words = set(_WORD.findall(sentence.lower()))
    return len(fact_words & sent_words) / len(fact_words) >= 0.6


_CONJ_SPLIT = re.compile(r",\s+and\s+|\s+and\s+|,\s+")


def mock_split_facts(sentence: str) -> list[str]:
    """Deterministic conjunction split used by the mock decomposer."""
    facts: list[str] = []
    for sent in segment(sentence, DEFAULT_CONFIG):
        subject = sent.split()[0]
        fragments = [f.strip() for f in _CONJ_SPLIT.split(sent) if f.strip()]
        for i, frag in enumerate(fragments):
            if i > 0 and frag[0].islower():
                frag = f"{subject} {frag}"
            if not frag.endswith((".", "?", "!")):
                frag += "."
            facts.append(frag)
    return facts


def mock_summary_sentences(sentences: list[str]) -> list[str]:
    picks = sorted({0, len(sentences) // 2, len(sentences) - 1})
    return [sentences[i] for i in picks]


class MockTransport:
    """Pure function of the prompt; usable as an offline test oracle."""

    name = "mock"

    def send(self, req: LlmRequest) -> str:
        if req.task == TASK_SUMMARIZE:
            document = self._slot(req.prompt, "Document:", "\nPlease generate a summary")
            sentences = segment(document, DEFAULT_CONFIG)
            summary = " ".join(mock_summary_sentences(sentences))
            return json.dumps({"summary": summary})
        if req.task == TASK_DECOMPOSE:
            sentence = self._slot(req.prompt, "Sentence:", "\nPlease respond", last=True)
            return json.dumps({"facts": mock_split_facts(sentence)})
        if req.task == TASK_ENTAIL:
            sentence = self._slot(req.prompt, "Sentence:", "\nFact:")
            fact = self._slot(req.prompt, "Fact:", "\nDecide whether")
            return json.dumps({"entails": mock_entails(sentence, fact)})
        raise ValueError(f"unknown task {req.task!r}")

    @staticmethod
    def _slot(prompt: str, start_marker: str, end_marker: str, last: bool = False) -> str:
        end = prompt.rfind(end_marker)
        if end == -1:
            raise BackendError(
                f"mock transport cannot find {end_marker!r}; prompt template not recognized"
            )
        find = prompt.rfind if last else prompt.find
        start = find(start_marker, 0, end)
        if start == -1:
            raise BackendError(
                f"mock transport cannot find {start_marker!r}; prompt template not recognized"
            )
        return prompt[start + len(start_marker) : end].strip()


class ResponseCache:
    """Append-only directory of raw responses, one file per request digest."""

    def __init__(self, directory: str | Path = DEFAULT_CACHE_DIR):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, digest: str) -> Path:
        return self.directory / digest

    def get(self, digest: str) -> str | None:
        path = self.path_for(digest)
        if path.exists():
            return path.read_text("utf-8")
        return None

    def put(self, digest: str, raw_text: str) -> None:
        # Write-temp-then-rename keeps concurrent writers of one key safe.
        path = self.path_for(digest)
        if path.exists():
            return
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{digest[:12]}.")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(raw_text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class LlmBackend:
    """Cache-first completion interface shared by all three tasks."""

    def __init__(
        self,
        transport: Transport,
        cache: ResponseCache | None = None,
        max_in_flight: int = 4,
        sleep=time.sleep,
    ):
        self.transport = transport
        self.cache = cache if cache is not None else ResponseCache()
        self._semaphore = threading.Semaphore(max_in_flight)
        self._sleep = sleep
        self._lock = threading.Lock()
        self.n_requests = 0
        self.n_cache_hits = 0

    @property
    def name(self) -> str:
        return self.transport.name

    def complete(self, req: LlmRequest) -> LlmResponse:
        digest = cache_key(req)
        cached = self.cache.get(digest)
        if cached is not None:
            with self._lock:
                self.n_cache_hits += 1
            return LlmResponse(cached, parse_json_payload(cached, req.task), from_cache=True)

        raw = self._send_with_retries(req)
        try:
            parsed = parse_json_payload(raw, req.task)
        except (PayloadParseError, PayloadSchemaError) as exc:
            logger.warning("malformed %s response (%s); re-prompting once", req.task, exc)
            retry_req = replace(req, prompt=f"{req.prompt}\n\n{_FORMAT_REMINDER}")
            raw = self._send_with_retries(retry_req)
            parsed = parse_json_payload(raw, req.task)
        self.cache.put(digest, raw)
        return LlmResponse(raw, parsed, from_cache=False)

    def _send_with_retries(self, req: LlmRequest) -> str:
        delay = _BACKOFF_BASE_SECONDS
        last_exc: TransientFailureError | None = None
        for attempt in range(1, MAX_ATTEMPTS + 1):
            with self._semaphore:
                with self._lock:
                    self.n_requests += 1
                try:
                    return self.transport.send(req)
                except TransientFailureError as exc:
                    last_exc = exc
                    if attempt == MAX_ATTEMPTS:
                        break
                    logger.debug(
                        "transient failure on attempt %d/%d: %s", attempt, MAX_ATTEMPTS, exc
                    )
            self._sleep(delay)
            delay *= 2
        raise TransientFailureError(
            f"retries exhausted after {MAX_ATTEMPTS} attempts: {last_exc}"
        )


def make_backend(
    mode: str,
    cache_dir: str | Path = DEFAULT_CACHE_DIR,
    max_in_flight: int = 4,
    base_url: str | None = None,
    api_key: str | None = None,
) -> LlmBackend:
    """Build a backend from a CLI-style mode string ("live" or "mock")."""
    cache = ResponseCache(cache_dir)
    if mode == "mock":
        return LlmBackend(MockTransport(), cache, max_in_flight)
    if mode == "live":
        return LlmBackend(HttpTransport(base_url, api_key), cache, max_in_flight)
    raise ConfigurationError(f"unknown backend mode {mode!r} (expected 'live' or 'mock')")

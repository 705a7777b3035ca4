"""Provider-agnostic LLM evaluation client with retries and response parsing.

Real providers speak a generic chat-completion HTTP contract; the per-provider
differences (URL shape, auth header, response path) live in small adapter
descriptors. A deterministic mock provider supports fully offline runs: its
score is the word count of the prompt's Data section modulo 5.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from .errors import (
    AuthError,
    MalformedResponse,
    MissingKey,
    NoJsonFound,
    ProviderUnavailable,
    RateLimited,
    ScoreNotInteger,
    ScoreOutOfRange,
)

BACKOFF_BASE_S = 1.0


@dataclass
class ProviderConfig:
    provider_id: str = "mock"
    endpoint_url: str = ""
    credential_ref: str = ""
    timeout_s: float = 60.0
    max_retries: int = 3
    max_concurrency: int = 4
    temperature: float = 0.0


@dataclass
class EvaluationResult:
    session_id: str
    rubric_id: int
    provider_id: str
    score: int
    reason: str
    raw_response: str
    attempt_count: int

    def __post_init__(self):
        if self.score not in (0, 1, 2, 3, 4):
            raise ScoreOutOfRange(f"score {self.score} outside 0..4")


# ---------------------------------------------------------------------------
# Response parsing
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z]*\n?|```")


def parse_evaluation(text: str):
    """Extract (score, reason) from the first JSON object carrying both keys."""
    cleaned = _FENCE_RE.sub("", text)
    decoder = json.JSONDecoder()
    pos = cleaned.find("{")
    found_object = False
    while pos != -1:
        try:
            obj, _ = decoder.raw_decode(cleaned, pos)
        except json.JSONDecodeError:
            pos = cleaned.find("{", pos + 1)
            continue
        if isinstance(obj, dict):
            found_object = True
            if "score" in obj and "reason" in obj:
                score = obj["score"]
                reason = obj["reason"]
                if isinstance(score, bool) or not isinstance(score, int):
                    raise ScoreNotInteger(f"score is {score!r}")
                if score not in (0, 1, 2, 3, 4):
                    raise ScoreOutOfRange(f"score {score} outside 0..4")
                if not isinstance(reason, str) or not reason.strip():
                    raise MissingKey("reason must be a non-empty string")
                return score, reason
        pos = cleaned.find("{", pos + 1)
    if found_object:
        raise MissingKey("no JSON object with both 'score' and 'reason'")
    raise NoJsonFound("no JSON object in response")


# ---------------------------------------------------------------------------
# Mock provider
# ---------------------------------------------------------------------------

def _data_section(prompt: str) -> str:
    marker = "\nData:\n"
    idx = prompt.rfind(marker)
    return prompt[idx + len(marker):] if idx != -1 else ""


def mock_response(prompt: str) -> str:
    """Deterministic canned response keyed on the Data section word count."""
    words = len(_data_section(prompt).split())
    return json.dumps({"score": words % 5, "reason": f"mock: {words} words"})


# ---------------------------------------------------------------------------
# HTTP adapters
# ---------------------------------------------------------------------------

def _openai_request(prompt: str, config: ProviderConfig, key: str):
    url = config.endpoint_url or "https://api.openai.com/v1/chat/completions"
    headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
    body = {
        "model": config.provider_id,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": config.temperature,
    }
    return url, headers, body


def _openai_extract(payload: dict) -> str:
    return payload["choices"][0]["message"]["content"]


def _gemini_request(prompt: str, config: ProviderConfig, key: str):
    url = config.endpoint_url or (
        f"https://generativelanguage.googleapis.com/v1beta/models/"
        f"{config.provider_id}:generateContent")
    headers = {"x-goog-api-key": key, "Content-Type": "application/json"}
    body = {
        "contents": [{"parts": [{"text": prompt}]}],
        "generationConfig": {"temperature": config.temperature},
    }
    return url, headers, body


def _gemini_extract(payload: dict) -> str:
    return payload["candidates"][0]["content"]["parts"][0]["text"]


_ADAPTERS = (
    ("gemini", _gemini_request, _gemini_extract),
    ("gpt", _openai_request, _openai_extract),
    ("o1", _openai_request, _openai_extract),
)


def _http_transport(prompt: str, config: ProviderConfig) -> str:
    for prefix, build, extract in _ADAPTERS:
        if config.provider_id.startswith(prefix):
            break
    else:
        raise ProviderUnavailable(f"no adapter for provider '{config.provider_id}'")
    key = os.environ.get(config.credential_ref, "") if config.credential_ref else ""
    if not key:
        raise AuthError(f"credential env var '{config.credential_ref}' not set")
    url, headers, body = build(prompt, config, key)
    resp = requests.post(url, headers=headers, json=body, timeout=config.timeout_s)
    if resp.status_code in (401, 403):
        raise AuthError(f"provider rejected credentials (HTTP {resp.status_code})")
    if resp.status_code == 429:
        raise RateLimited("provider rate limit hit")
    if resp.status_code >= 400:
        raise ProviderUnavailable(f"provider error HTTP {resp.status_code}")
    try:
        return extract(resp.json())
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise MalformedResponse(f"unexpected response envelope: {e}") from e


# ---------------------------------------------------------------------------
# Evaluation with retry
# ---------------------------------------------------------------------------

_semaphores = {}
_semaphore_lock = threading.Lock()


def _concurrency_gate(config: ProviderConfig) -> threading.Semaphore:
    with _semaphore_lock:
        sem = _semaphores.get(config.provider_id)
        if sem is None:
            sem = threading.Semaphore(config.max_concurrency)
            _semaphores[config.provider_id] = sem
        return sem


def evaluate(prompt: str,
             config: ProviderConfig,
             session_id: str = "",
             rubric_id: int = 0,
             transport: Optional[Callable] = None,
             sleep: Callable = time.sleep) -> EvaluationResult:
    """Send one prompt, retrying transport and parse failures with backoff.

    `transport` maps (prompt, config) to the raw response text; it defaults to
    the mock rule for provider "mock" and HTTP otherwise. AuthError aborts
    immediately (retrying a bad credential cannot help).
    """
    if transport is None:
        transport = (lambda p, c: mock_response(p)) if config.provider_id == "mock" \
            else _http_transport
    gate = _concurrency_gate(config)
    last_error = None
    attempts = 0
    for attempt in range(config.max_retries + 1):
        if attempt > 0:
            sleep(BACKOFF_BASE_S * (2 ** (attempt - 1)))
        attempts = attempt + 1
        with gate:
            try:
                raw = transport(prompt, config)
            except AuthError:
                raise
            except (RateLimited, ProviderUnavailable, requests.RequestException) as e:
                last_error = e
                continue
        try:
            score, reason = parse_evaluation(raw)
        except MalformedResponse as e:
            last_error = e
            continue
        return EvaluationResult(
            session_id=session_id,
            rubric_id=rubric_id,
            provider_id=config.provider_id,
            score=score,
            reason=reason,
            raw_response=raw,
            attempt_count=attempts,
        )
    if isinstance(last_error, RateLimited):
        raise RateLimited(f"rate limited after {attempts} attempts") from last_error
    if isinstance(last_error, MalformedResponse):
        raise MalformedResponse(f"unparseable after {attempts} attempts: {last_error}") from last_error
    raise ProviderUnavailable(f"gave up after {attempts} attempts: {last_error}") from last_error


def mock_evaluate(prompt: str, session_id: str = "", rubric_id: int = 0) -> EvaluationResult:
    """Offline deterministic evaluation (see mock_response for the rule)."""
    return evaluate(prompt, ProviderConfig(provider_id="mock"),
                    session_id=session_id, rubric_id=rubric_id)


def result_to_json(result: EvaluationResult, include_raw: bool = True) -> str:
    obj = {
        "session_id": result.session_id,
        "rubric_id": result.rubric_id,
        "provider_id": result.provider_id,
        "score": result.score,
        "reason": result.reason,
        "attempt_count": result.attempt_count,
    }
    if include_raw:
        obj["raw_response"] = result.raw_response
    return json.dumps(obj, ensure_ascii=False)


def result_from_json(line: str) -> EvaluationResult:
    obj = json.loads(line)
    return EvaluationResult(
        session_id=obj["session_id"],
        rubric_id=obj["rubric_id"],
        provider_id=obj["provider_id"],
        score=obj["score"],
        reason=obj["reason"],
        raw_response=obj.get("raw_response", ""),
        attempt_count=obj.get("attempt_count", 1),
    )

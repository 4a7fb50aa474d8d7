"""Judge backends: an OpenAI-compatible chat-completions client and a mock.

The HTTP backend retries rate limits, server errors and timeouts with
exponential backoff, never retries a rejected credential, and caps the number
of in-flight requests at ``JudgeConfig.parallelism``.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass

import httpx

from .errors import AuthFailure, BackendUnavailable, EmptyCompletion, JudgeError, UnknownModel
from .model import QualityKey, Strategy
from .prompts import PromptBundle
from .verdict import JudgeVerdict, VerdictKind, render_final_line

logger = logging.getLogger(__name__)

API_KEY_ENV = "XARJUDGE_API_KEY"
BACKENDS = ("http_chat", "mock")
RETRYABLE_STATUS = frozenset({408, 409, 429}) | frozenset(range(500, 600))


@dataclass(frozen=True)
class JudgeConfig:
    backend_kind: str = "mock"
    model_name: str = "gpt-4-turbo"
    temperature: float = 0.0
    max_attempts: int = 3
    base_url: str = "https://api.openai.com/v1"
    timeout_seconds: float = 60.0
    parallelism: int = 4
    backoff_seconds: float = 1.0

    def __post_init__(self) -> None:
        if self.backend_kind not in BACKENDS:
            raise ValueError(f"backend_kind must be one of {BACKENDS}, got {self.backend_kind!r}")
        if not self.temperature >= 0:
            raise ValueError("temperature must be >= 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if not self.timeout_seconds > 0:
            raise ValueError("timeout_seconds must be > 0")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.backoff_seconds < 0:
            raise ValueError("backoff_seconds must be >= 0")


@dataclass(frozen=True)
class JudgeResponse:
    raw_text: str
    latency_ms: float
    attempt_count: int


def mock_judge(bundle: PromptBundle, oracle: QualityKey) -> str:
    """Answer as a perfectly informed judge would, according to ``oracle``.

    Each option is represented by its best-ranked contributor.
    """
    best_rank = {}
    for opt in bundle.options:
        missing = [m for m in opt.contributors if m not in oracle]
        if missing:
            raise UnknownModel(f"model(s) {missing} absent from the quality key")
        best_rank[opt.label] = min(oracle.rank(m) for m in opt.contributors)

    reasoning = (
        f"Let me compare the {len(bundle.options)} candidate explanation(s) step by step.\n"
        "I check which events each one cites and whether they fit the predicted activity.\n"
    )
    if bundle.strategy is Strategy.BEST_AMONG_K:
        chosen = min(best_rank, key=lambda lab: (best_rank[lab], lab))
        verdict = JudgeVerdict(VerdictKind.BEST_CHOICE, chosen_label=chosen)
    else:
        scores = {lab: oracle.likert_score(oracle.order[r]) for lab, r in best_rank.items()}
        verdict = JudgeVerdict(VerdictKind.LIKERT_SCORES, scores=scores)
    return reasoning + render_final_line(verdict)


class MockJudge:
    def __init__(self, oracle: QualityKey | list | tuple) -> None:
        self.oracle = oracle if isinstance(oracle, QualityKey) else QualityKey(tuple(oracle))

    def complete(self, bundle: PromptBundle) -> JudgeResponse:
        start = time.perf_counter()
        text = mock_judge(bundle, self.oracle)
        return JudgeResponse(text, (time.perf_counter() - start) * 1000.0, 1)


class HttpChatJudge:
    """Client for ``POST {base_url}/chat/completions``."""

    def __init__(self, config: JudgeConfig, api_key: str | None = None,
                 transport: httpx.BaseTransport | None = None) -> None:
        key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        if not key:
            raise AuthFailure(f"no API key: set the {API_KEY_ENV} environment variable")
        self.config = config
        self._slots = threading.BoundedSemaphore(config.parallelism)
        self._client = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            timeout=config.timeout_seconds,
            headers={"Authorization": f"Bearer {key}"},
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "HttpChatJudge":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def payload(self, bundle: PromptBundle) -> dict:
        return {
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": bundle.system_message},
                {"role": "user", "content": bundle.user_message},
            ],
        }

    def complete(self, bundle: PromptBundle) -> JudgeResponse:
        cfg = self.config
        body = self.payload(bundle)
        last_problem = "no attempt made"
        start = time.perf_counter()
        for attempt in range(1, cfg.max_attempts + 1):
            try:
                with self._slots:
                    resp = self._client.post("/chat/completions", json=body)
            except httpx.TimeoutException as exc:
                last_problem = f"timeout: {exc}"
            except httpx.TransportError as exc:
                last_problem = f"transport error: {exc}"
            else:
                status = resp.status_code
                if status in (401, 403):
                    raise AuthFailure(f"endpoint rejected the credential (HTTP {status})")
                if status in RETRYABLE_STATUS:
                    last_problem = f"HTTP {status}"
                elif status >= 400:
                    raise JudgeError(f"HTTP {status}: {resp.text[:200]}")
                else:
                    text = _completion_text(resp)
                    if not text.strip():
                        raise EmptyCompletion(f"window {bundle.window_id}: empty completion")
                    latency = (time.perf_counter() - start) * 1000.0
                    return JudgeResponse(text, latency, attempt)
            logger.warning("judge attempt %d/%d for window %s failed: %s",
                           attempt, cfg.max_attempts, bundle.window_id, last_problem)
            if attempt < cfg.max_attempts:
                time.sleep(cfg.backoff_seconds * 2 ** (attempt - 1))
        raise BackendUnavailable(
            f"window {bundle.window_id}: gave up after {cfg.max_attempts} attempt(s), last: {last_problem}")


def _completion_text(resp: httpx.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise JudgeError(f"unexpected response body: {exc}") from exc
    return content or ""


def make_judge(config: JudgeConfig, oracle: QualityKey | None = None, **kwargs):
    if config.backend_kind == "mock":
        if oracle is None:
            raise ValueError("the mock backend needs a quality key")
        return MockJudge(oracle)
    return HttpChatJudge(config, **kwargs)


def complete(config: JudgeConfig, bundle: PromptBundle, oracle: QualityKey | None = None) -> JudgeResponse:
    judge = make_judge(config, oracle)
    try:
        return judge.complete(bundle)
    finally:
        if isinstance(judge, HttpChatJudge):
            judge.close()

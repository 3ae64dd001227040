"""Teacher trajectory collection over an HTTP chat-completions API.

For every question the sampler issues a fixed number of requests with seeds
``seed_base + sample_index``, applies the minimum-word-count filter, and
returns records in (record order, sample index) order no matter how the
requests complete. Short or failed responses are recorded, never dropped, so
attempted = kept + filtered + failed always holds.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import requests

from .dataset import read_jsonl_objs, write_jsonl_objs

API_KEY_ENV = "REASONFORGE_API_KEY"


class SamplerError(Exception):
    pass


class ChatRequestError(SamplerError):
    """A request failed after exhausting its retry budget."""


@dataclass(frozen=True, slots=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_seconds: float = 0.5  # sleeps backoff * attempt between tries


@dataclass(frozen=True, slots=True)
class SampleConfig:
    endpoint: str
    model: str
    samples_per_question: int = 5
    max_tokens: int = 10_000
    temperature: float = 1.0
    seed_base: int = 0
    min_words: int = 20
    max_in_flight: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    timeout_seconds: float = 120.0

    def validate(self):
        if not self.endpoint:
            raise SamplerError("endpoint must be set")
        if not self.model:
            raise SamplerError("model must be set")
        if self.samples_per_question < 1:
            raise SamplerError("samples_per_question must be >= 1")
        if self.max_tokens < 1:
            raise SamplerError("max_tokens must be >= 1")
        if self.min_words < 0:
            raise SamplerError("min_words must be >= 0")
        if self.max_in_flight < 1:
            raise SamplerError("max_in_flight must be >= 1")
        if self.retry.max_attempts < 1:
            raise SamplerError("retry.max_attempts must be >= 1")


@dataclass(frozen=True, slots=True)
class TrajectoryRecord:
    record_id: str
    sample_index: int
    seed: int
    text: str
    word_count: int
    kept: bool
    teacher: str
    latency_ms: float = 0.0
    finish_reason: str = ""

    def to_obj(self) -> dict:
        return {
            "record_id": self.record_id,
            "sample_index": self.sample_index,
            "seed": self.seed,
            "text": self.text,
            "word_count": self.word_count,
            "kept": self.kept,
            "teacher": self.teacher,
            "latency_ms": self.latency_ms,
            "finish_reason": self.finish_reason,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "TrajectoryRecord":
        return cls(
            record_id=obj["record_id"],
            sample_index=obj["sample_index"],
            seed=obj["seed"],
            text=obj["text"],
            word_count=obj["word_count"],
            kept=obj["kept"],
            teacher=obj["teacher"],
            latency_ms=obj.get("latency_ms", 0.0),
            finish_reason=obj.get("finish_reason", ""),
        )


def filter_short(text: str, min_words: int) -> bool:
    """True when the text has at least ``min_words`` whitespace tokens."""
    return len(text.split()) >= min_words


def chat_complete(cfg: SampleConfig, question: str, seed: int) -> tuple[str, str]:
    """One chat request; returns (text, finish_reason).

    Retries HTTP >= 400, network errors, and malformed bodies per the retry
    policy, then raises ChatRequestError. The bearer token is read from
    REASONFORGE_API_KEY when set.
    """
    url = cfg.endpoint.rstrip("/") + "/chat/completions"
    payload = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": question}],
        "temperature": cfg.temperature,
        "seed": seed,
        "max_tokens": cfg.max_tokens,
    }
    headers = {}
    token = os.environ.get(API_KEY_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    last_error = None
    for attempt in range(1, cfg.retry.max_attempts + 1):
        try:
            resp = requests.post(
                url, json=payload, headers=headers, timeout=cfg.timeout_seconds
            )
            if resp.status_code >= 400:
                raise ChatRequestError(f"HTTP {resp.status_code}")
            data = resp.json()
            choice = data["choices"][0]
            return choice["message"]["content"], choice.get("finish_reason") or ""
        except (requests.RequestException, ChatRequestError, KeyError,
                IndexError, TypeError, ValueError) as exc:
            last_error = exc
            if attempt < cfg.retry.max_attempts:
                time.sleep(cfg.retry.backoff_seconds * attempt)
    raise ChatRequestError(
        f"request failed after {cfg.retry.max_attempts} attempts: {last_error}"
    )


def sample_trajectories(records: Sequence, cfg: SampleConfig) -> list[TrajectoryRecord]:
    """Sample ``cfg.samples_per_question`` responses per record.

    Per-request failures are recorded as failed trajectories (empty text,
    finish_reason ``error:...``, kept False); they never abort the batch.
    """
    cfg.validate()
    tasks = [
        (record, index)
        for record in records
        for index in range(cfg.samples_per_question)
    ]

    def run_one(task) -> TrajectoryRecord:
        record, index = task
        seed = cfg.seed_base + index
        t0 = time.monotonic()
        failed = False
        finish = ""
        text = ""
        try:
            text, finish = chat_complete(cfg, record.question, seed)
        except ChatRequestError as exc:
            failed = True
            finish = f"error:{exc}"
        latency_ms = (time.monotonic() - t0) * 1000.0
        word_count = len(text.split())
        return TrajectoryRecord(
            record_id=record.id,
            sample_index=index,
            seed=seed,
            text=text,
            word_count=word_count,
            kept=not failed and word_count >= cfg.min_words,
            teacher=cfg.model,
            latency_ms=latency_ms,
            finish_reason=finish,
        )

    if not tasks:
        return []
    with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
        return list(pool.map(run_one, tasks))


def write_trajectories(trajectories: Sequence[TrajectoryRecord], path) -> None:
    write_jsonl_objs((t.to_obj() for t in trajectories), path)


def read_trajectories(path) -> list[TrajectoryRecord]:
    return [TrajectoryRecord.from_obj(obj) for obj in read_jsonl_objs(path)]

"""Chat-completion endpoint client with retries, a disk cache and a request log.

Wire contract: ``POST {base_url}/chat/completions`` with
``{"model", "messages": [{"role": "user", "content": prompt}], "temperature"}``
and a bearer token read from an environment variable; the reply text is
``choices[0].message.content``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from ..errors import CredentialMissing, EndpointFailure

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})


class RateLimiter:
    """Enforces a minimum interval between request starts across threads."""

    def __init__(self, min_interval: float = 0.0, clock=time.monotonic, sleep=time.sleep):
        self.min_interval = min_interval
        self._clock = clock
        self._sleep = sleep
        self._next = 0.0
        self._lock = threading.Lock()

    def wait(self) -> None:
        if self.min_interval <= 0:
            return
        with self._lock:
            now = self._clock()
            start = max(now, self._next)
            self._next = start + self.min_interval
        if start > now:
            self._sleep(start - now)


@dataclass
class EndpointClient:
    base_url: str
    model: str
    temperature: float = 1.0
    max_retries: int = 4
    backoff: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 120.0
    cache_dir: Path | None = None
    log_path: Path | None = None
    max_concurrency: int = 4
    min_interval: float = 0.0
    transport: httpx.BaseTransport | None = None
    sleep: Callable[[float], None] = time.sleep

    requests_sent: int = field(default=0, init=False)
    _http: httpx.Client | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        if self.log_path is not None:
            self.log_path = Path(self.log_path)
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self._slots = threading.BoundedSemaphore(max(1, self.max_concurrency))
        self._limiter = RateLimiter(self.min_interval)
        self._key_locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    # -------------------------------------------------------------- cache

    def cache_key(self, prompt: str) -> str:
        payload = json.dumps([prompt, self.model, self.temperature], ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _cache_path(self, key: str) -> Path | None:
        return None if self.cache_dir is None else self.cache_dir / f"{key}.json"

    def cached(self, prompt: str) -> str | None:
        path = self._cache_path(self.cache_key(prompt))
        if path is not None and path.exists():
            return json.loads(path.read_text(encoding="utf-8"))["response"]
        return None

    def _store(self, key: str, prompt: str, response: str) -> None:
        path = self._cache_path(key)
        if path is None:
            return
        tmp = path.with_suffix(".tmp")
        record = {"model": self.model, "temperature": self.temperature, "prompt": prompt, "response": response}
        tmp.write_text(json.dumps(record, ensure_ascii=False), encoding="utf-8")
        tmp.replace(path)

    def _log(self, **event) -> None:
        if self.log_path is None:
            return
        line = json.dumps(event, ensure_ascii=False, sort_keys=True)
        with self._guard, open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    # ------------------------------------------------------------ requests

    def _client(self) -> httpx.Client:
        with self._guard:
            if self._http is None:
                self._http = httpx.Client(timeout=self.timeout, transport=self.transport)
            return self._http

    def close(self) -> None:
        if self._http is not None:
            self._http.close()
            self._http = None

    def _lock_for(self, key: str) -> threading.Lock:
        with self._guard:
            return self._key_locks.setdefault(key, threading.Lock())

    def complete(self, prompt: str, triple_id: str | None = None) -> str:
        """Reply text for ``prompt``; served from cache when available.

        Transient failures (network errors, 408/409/429/5xx) are retried up to
        ``max_retries`` times following the ``backoff`` schedule.  Raises
        :class:`CredentialMissing` before any request when the credential is
        unset, and :class:`EndpointFailure` once retries are exhausted.
        """
        key = self.cache_key(prompt)
        with self._lock_for(key):
            hit = self.cached(prompt)
            if hit is not None:
                self._log(event="cache-hit", triple_id=triple_id, key=key)
                return hit
            api_key = os.environ.get(self.api_key_env)
            if not api_key:
                raise CredentialMissing(f"environment variable {self.api_key_env} is not set")
            with self._slots:
                text = self._request(prompt, key, api_key, triple_id)
            self._store(key, prompt, text)
            return text

    def _request(self, prompt: str, key: str, api_key: str, triple_id: str | None) -> str:
        url = self.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                delay = self.backoff[min(attempt - 1, len(self.backoff) - 1)] if self.backoff else 0.0
                self.sleep(delay)
            self._limiter.wait()
            with self._guard:
                self.requests_sent += 1
            try:
                resp = self._client().post(url, json=body, headers=headers)
            except httpx.TransportError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                self._log(event="request", triple_id=triple_id, key=key, attempt=attempt, status=None, error=last_error)
                continue
            self._log(event="request", triple_id=triple_id, key=key, attempt=attempt, status=resp.status_code)
            if resp.status_code == 200:
                try:
                    text = resp.json()["choices"][0]["message"]["content"]
                except (ValueError, KeyError, IndexError, TypeError) as exc:
                    raise EndpointFailure(f"malformed completion payload: {exc}", triple_id) from exc
                self._log(event="response", triple_id=triple_id, key=key, chars=len(text))
                return text
            last_error = f"HTTP {resp.status_code}"
            if resp.status_code not in RETRYABLE_STATUS:
                break
            logger.info("triple %s: %s, retrying", triple_id, last_error)
        raise EndpointFailure(f"endpoint request failed ({last_error})", triple_id)

    def oracle(self, triple_id: str | None = None) -> Callable[[str], str]:
        """A prompt -> reply callable bound to a triple id for logging."""
        return lambda prompt: self.complete(prompt, triple_id)


def generate_endpoint(prompt, client: EndpointClient, triple_id: str | None = None) -> str:
    text = prompt.text if hasattr(prompt, "text") else str(prompt)
    return client.complete(text, triple_id)

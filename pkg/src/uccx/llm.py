"""Chat-model providers: live HTTP, replay cache, and offline mock.

Every completion is addressed by a request fingerprint (a stable hash of the
prompt and sampling settings). The live provider records each response into
a content-addressed cache directory; the replay provider serves only from
that cache, so experiments rerun bit-for-bit without network access; the
mock provider synthesizes responses straight from ground truth and needs no
cache at all.

Cache writes go through a temp file and an atomic rename, so a crashed run
never leaves a half-written entry behind.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

from uccx.components import LONG_COMPONENTS, ComponentKind, UCComponents
from uccx.corpus import Corpus, Scenario

API_KEY_ENV = "UCCX_API_KEY"
DEFAULT_MODEL = "gpt-3.5-turbo"
DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT_TOKENS = 1024
MAX_ATTEMPTS = 3
BACKOFF_START_SECONDS = 1.0
DEFAULT_MAX_IN_FLIGHT = 2


class ProviderError(RuntimeError):
    """A provider could not produce a response."""


class CacheMissError(ProviderError):
    """Replay was asked for a fingerprint the cache has never seen."""

    def __init__(self, fingerprint: str):
        super().__init__(
            f"no cached response for fingerprint {fingerprint}; "
            "run the live provider once to record it"
        )
        self.fingerprint = fingerprint


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    model_id: str = DEFAULT_MODEL
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS

    def fingerprint(self) -> str:
        """Stable content hash; any field change changes the fingerprint."""
        canonical = json.dumps(
            {
                "prompt": self.prompt,
                "model_id": self.model_id,
                "temperature": self.temperature,
                "max_output_tokens": self.max_output_tokens,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def as_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
        }


@dataclass(frozen=True)
class ChatResponse:
    text: str
    provider_id: str
    request_fingerprint: str
    created_at: str

    def as_dict(self) -> dict:
        return {
            "text": self.text,
            "provider_id": self.provider_id,
            "request_fingerprint": self.request_fingerprint,
            "created_at": self.created_at,
        }


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


class ChatProvider(Protocol):
    provider_id: str
    max_in_flight: int

    def complete(self, request: ChatRequest) -> ChatResponse: ...


# --- replay cache -----------------------------------------------------------


class ReplayCache:
    """Content-addressed response store: one JSON file per fingerprint."""

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)

    def path_for(self, fingerprint: str) -> Path:
        return self.cache_dir / f"{fingerprint}.json"

    def get(self, fingerprint: str) -> ChatResponse | None:
        path = self.path_for(fingerprint)
        if not path.exists():
            return None
        doc = json.loads(path.read_text("utf-8"))
        rec = doc["response"]
        return ChatResponse(
            text=rec["text"],
            provider_id=rec["provider_id"],
            request_fingerprint=fingerprint,
            created_at=rec["created_at"],
        )

    def put(self, request: ChatRequest, response: ChatResponse) -> None:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        doc = {"request": request.as_dict(), "response": response.as_dict()}
        payload = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
        fd, tmp = tempfile.mkstemp(
            dir=self.cache_dir, prefix=".tmp-", suffix=".json"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(payload)
            os.replace(tmp, self.path_for(response.request_fingerprint))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class ReplayProvider:
    """Serves completions only from a previously recorded cache."""

    provider_id = "replay"

    def __init__(self, cache_dir: str | Path, max_in_flight: int = DEFAULT_MAX_IN_FLIGHT):
        self.cache = ReplayCache(cache_dir)
        self.max_in_flight = max_in_flight

    def complete(self, request: ChatRequest) -> ChatResponse:
        cached = self.cache.get(request.fingerprint())
        if cached is None:
            raise CacheMissError(request.fingerprint())
        return cached


# --- live provider ----------------------------------------------------------


class LiveProvider:
    """Chat-completions HTTP adapter with retry, backoff, and recording.

    The wire format is the common chat-completions shape: POST
    ``{base_url}/chat/completions`` with model, messages, temperature, and
    max_tokens; the answer text is ``choices[0].message.content``. The
    credential comes from the UCCX_API_KEY environment variable. Transport
    and HTTP 5xx/429 failures retry up to 3 attempts with exponential
    backoff starting at 1 second. A bounded semaphore keeps at most
    ``max_in_flight`` requests outstanding.
    """

    provider_id = "live"

    def __init__(
        self,
        base_url: str,
        *,
        cache_dir: str | Path | None = None,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        session=None,
        sleep: Callable[[float], None] = time.sleep,
        api_key: str | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.cache = ReplayCache(cache_dir) if cache_dir else None
        self.max_in_flight = max_in_flight
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._sleep = sleep
        self._api_key = api_key
        if session is None:
            import requests

            session = requests.Session()
        self._session = session

    def _headers(self) -> dict:
        key = self._api_key or os.environ.get(API_KEY_ENV)
        if not key:
            raise ProviderError(
                f"no API key: set the {API_KEY_ENV} environment variable"
            )
        return {
            "Authorization": f"Bearer {key}",
            "Content-Type": "application/json",
        }

    def complete(self, request: ChatRequest) -> ChatResponse:
        fingerprint = request.fingerprint()
        if self.cache is not None:
            cached = self.cache.get(fingerprint)
            if cached is not None:
                return cached

        body = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        url = f"{self.base_url}/chat/completions"
        headers = self._headers()  # a missing key fails fast, not per attempt
        last_error: Exception | None = None
        delay = BACKOFF_START_SECONDS
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                with self._semaphore:
                    resp = self._session.post(
                        url, json=body, headers=headers, timeout=120
                    )
                if resp.status_code in (429,) or resp.status_code >= 500:
                    raise ProviderError(
                        f"HTTP {resp.status_code} from {url}"
                    )
                if resp.status_code != 200:
                    # Client errors do not retry: the request itself is bad.
                    raise _NoRetry(
                        f"HTTP {resp.status_code} from {url}: {resp.text[:200]}"
                    )
                payload = resp.json()
                text = payload["choices"][0]["message"]["content"]
                break
            except _NoRetry as exc:
                raise ProviderError(str(exc)) from exc
            except Exception as exc:  # transport errors and retryable HTTP
                last_error = exc
                if attempt == MAX_ATTEMPTS:
                    raise ProviderError(
                        f"giving up after {MAX_ATTEMPTS} attempts: {exc}"
                    ) from exc
                self._sleep(delay)
                delay *= 2
        else:  # pragma: no cover - loop always breaks or raises
            raise ProviderError(str(last_error))

        response = ChatResponse(
            text=text,
            provider_id=self.provider_id,
            request_fingerprint=fingerprint,
            created_at=_utcnow(),
        )
        if self.cache is not None:
            self.cache.put(request, response)
        return response


class _NoRetry(Exception):
    pass


# --- mock provider ----------------------------------------------------------


def render_components(components: UCComponents) -> str:
    """Render components in the exact answer layout the parser expects.

    Short components answer on the heading line, elements comma-separated;
    long components answer as hyphen bullets under the heading. An empty
    slot renders as the literal word None, which the parser normalizes back
    to an empty list.
    """
    lines: list[str] = []
    for kind, elements in components.items():
        if not elements:
            lines.append(f"{kind.label}: None")
        elif kind in LONG_COMPONENTS:
            lines.append(f"{kind.label}:")
            lines.extend(f"- {el}" for el in elements)
        else:
            lines.append(f"{kind.label}: {', '.join(elements)}")
    return "\n".join(lines)


def mock_from_ground_truth(components: UCComponents) -> ChatResponse:
    """A response whose text is the canonical rendering of ``components``."""
    text = render_components(components)
    return ChatResponse(
        text=text,
        provider_id="mock",
        request_fingerprint="",
        created_at=_utcnow(),
    )


class MockProvider:
    """Offline provider answering from fixtures or ground truth.

    Fixtures are keyed by scenario id. A rendered prompt carries the
    scenario's text rather than its id, so the provider resolves the id by
    finding which known scenario's text appears inside the prompt. Unknown
    prompts raise, which keeps silent garbage out of experiments.
    """

    provider_id = "mock"

    def __init__(
        self,
        fixtures: Mapping[str, str],
        scenario_texts: Mapping[str, str],
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    ):
        self.fixtures = dict(fixtures)
        self.scenario_texts = dict(scenario_texts)
        self.max_in_flight = max_in_flight

    @classmethod
    def from_ground_truth(
        cls,
        corpus: Corpus | Sequence[Scenario],
        ground_truth: Mapping[str, UCComponents],
    ) -> "MockProvider":
        scenarios = list(corpus)
        fixtures = {
            s.id: render_components(ground_truth[s.id])
            for s in scenarios
            if s.id in ground_truth
        }
        return cls(fixtures, {s.id: s.text for s in scenarios})

    def _scenario_id_for(self, prompt: str) -> str:
        for sid, text in self.scenario_texts.items():
            if text in prompt:
                return sid
        raise ProviderError(
            "mock provider got a prompt containing no known scenario text"
        )

    def complete(self, request: ChatRequest) -> ChatResponse:
        sid = self._scenario_id_for(request.prompt)
        if sid not in self.fixtures:
            raise ProviderError(f"mock provider has no fixture for {sid!r}")
        return ChatResponse(
            text=self.fixtures[sid],
            provider_id=self.provider_id,
            request_fingerprint=request.fingerprint(),
            created_at=_utcnow(),
        )

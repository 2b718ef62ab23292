"""Text embedders for the semantic-similarity metric.

Two implementations share one tiny interface (an id, a dimension, and
``embed(text) -> vector``):

* :class:`BagEmbedder` is fully offline and deterministic: each lowercased
  token hashes into one of ``dim`` buckets and the vector counts tokens per
  bucket. Identical texts embed identically; texts sharing tokens land
  strictly between 0 and 1 in cosine; token-disjoint texts with no bucket
  collisions score 0. It exists so every pipeline runs without a network.
* :class:`HttpEmbedder` adapts an embeddings HTTP endpoint with the same
  record/replay cache design as the chat providers.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from uccx.text import tokenize

DEFAULT_DIM = 1024
API_KEY_ENV = "UCCX_API_KEY"


class EmbedderError(RuntimeError):
    pass


class Embedder(Protocol):
    embedder_id: str
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity with an explicit rule for zero vectors.

    Two zero vectors count as identical (1.0); a zero vector against a
    nonzero one shares nothing (0.0).
    """
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class BagEmbedder:
    """Deterministic hashed bag-of-tokens embedder."""

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.embedder_id = f"bag-{dim}"

    def bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(text):
            vec[self.bucket(token.lower())] += 1.0
        return vec


def bag_embedder(dim: int = DEFAULT_DIM) -> BagEmbedder:
    return BagEmbedder(dim)


class HttpEmbedder:
    """Embeddings endpoint adapter with a content-addressed replay cache.

    POSTs ``{base_url}/embeddings`` with model and input; reads
    ``data[0].embedding``. Responses are cached by a hash of (model, text)
    with atomic writes; ``offline=True`` serves from the cache only and
    raises on a miss, mirroring the chat replay provider.
    """

    def __init__(
        self,
        base_url: str,
        *,
        model_id: str = "text-embedding-ada-002",
        dim: int = DEFAULT_DIM,
        cache_dir: str | Path | None = None,
        offline: bool = False,
        max_in_flight: int = 2,
        session=None,
        sleep: Callable[[float], None] = time.sleep,
        api_key: str | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.dim = dim
        self.embedder_id = f"http-{model_id}"
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.offline = offline
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._sleep = sleep
        self._api_key = api_key
        self._session = session

    def _fingerprint(self, text: str) -> str:
        canonical = json.dumps(
            {"model_id": self.model_id, "text": text},
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def _cache_path(self, fingerprint: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{fingerprint}.json"

    def embed(self, text: str) -> np.ndarray:
        fingerprint = self._fingerprint(text)
        path = self._cache_path(fingerprint)
        if path is not None and path.exists():
            doc = json.loads(path.read_text("utf-8"))
            return np.asarray(doc["embedding"], dtype=np.float64)
        if self.offline:
            raise EmbedderError(
                f"no cached embedding for fingerprint {fingerprint}; "
                "run once online to record it"
            )
        vector = self._fetch(text)
        if path is not None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            doc = {"model_id": self.model_id, "text": text,
                   "embedding": vector.tolist()}
            fd, tmp = tempfile.mkstemp(
                dir=self.cache_dir, prefix=".tmp-", suffix=".json"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(json.dumps(doc) + "\n")
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return vector

    def _fetch(self, text: str) -> np.ndarray:
        if self._session is None:
            import requests

            self._session = requests.Session()
        key = self._api_key or os.environ.get(API_KEY_ENV)
        if not key:
            raise EmbedderError(
                f"no API key: set the {API_KEY_ENV} environment variable"
            )
        headers = {"Authorization": f"Bearer {key}"}
        body = {"model": self.model_id, "input": text}
        url = f"{self.base_url}/embeddings"
        delay = 1.0
        for attempt in range(1, 4):
            try:
                with self._semaphore:
                    resp = self._session.post(
                        url, json=body, headers=headers, timeout=120
                    )
                if resp.status_code in (429,) or resp.status_code >= 500:
                    raise _Retryable(f"HTTP {resp.status_code} from {url}")
                if resp.status_code != 200:
                    raise EmbedderError(
                        f"HTTP {resp.status_code} from {url}: {resp.text[:200]}"
                    )
                payload = resp.json()
                return np.asarray(
                    payload["data"][0]["embedding"], dtype=np.float64
                )
            except EmbedderError:
                raise
            except Exception as exc:
                if attempt == 3:
                    raise EmbedderError(
                        f"giving up after 3 attempts: {exc}"
                    ) from exc
                self._sleep(delay)
                delay *= 2
        raise EmbedderError("unreachable")  # pragma: no cover


class _Retryable(Exception):
    pass

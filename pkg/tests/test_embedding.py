import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uccx.embedding import (
    BagEmbedder,
    EmbedderError,
    HttpEmbedder,
    bag_embedder,
    cosine,
)


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload if payload is not None else {}
        self.text = text

    def json(self):
        return self._payload


def ok(vector):
    return FakeResponse(200, {"data": [{"embedding": vector}]})


class FakeSession:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers})
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def http_embedder(session, tmp_path=None, **kwargs):
    kwargs.setdefault("api_key", "k")
    sleeps = []
    embedder = HttpEmbedder(
        "https://api.example.org/v1",
        session=session,
        sleep=sleeps.append,
        cache_dir=tmp_path,
        **kwargs,
    )
    return embedder, sleeps


def test_cosine_identical():
    v = np.array([1.0, 2.0, 3.0])
    assert cosine(v, v) == pytest.approx(1.0)


def test_cosine_orthogonal():
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_cosine_zero_vector_rules():
    zero = np.zeros(3)
    one = np.ones(3)
    assert cosine(zero, zero) == 1.0
    assert cosine(zero, one) == 0.0
    assert cosine(one, zero) == 0.0


def test_bag_embedder_is_deterministic():
    a = BagEmbedder(64).embed("view past orders")
    b = BagEmbedder(64).embed("view past orders")
    assert np.array_equal(a, b)


def test_bag_embedder_counts_tokens():
    e = BagEmbedder(64)
    vec = e.embed("app app orders")
    assert vec[e.bucket("app")] == 2.0
    assert vec[e.bucket("orders")] == 1.0
    assert vec.sum() == 3.0


def test_bag_embedder_is_case_insensitive():
    e = BagEmbedder(64)
    assert np.array_equal(e.embed("Orders"), e.embed("orders"))


def test_bag_embedder_id_and_dim():
    e = bag_embedder()
    assert e.dim == 1024
    assert e.embedder_id == "bag-1024"
    assert BagEmbedder(16).embedder_id == "bag-16"


def test_bag_embedder_rejects_bad_dim():
    with pytest.raises(ValueError):
        BagEmbedder(0)


def test_bag_similarity_orders_sensibly():
    e = BagEmbedder(1024)
    gt = e.embed("view past orders")
    close = e.embed("view orders")
    far = e.embed("delete the account")
    assert cosine(gt, close) > cosine(gt, far)


def test_http_embedder_fetches_and_parses():
    session = FakeSession([ok([1.0, 2.0])])
    embedder, _ = http_embedder(session)
    vec = embedder.embed("hello")
    assert np.array_equal(vec, np.array([1.0, 2.0]))
    call = session.calls[0]
    assert call["url"] == "https://api.example.org/v1/embeddings"
    assert call["json"] == {"model": "text-embedding-ada-002", "input": "hello"}
    assert call["headers"]["Authorization"] == "Bearer k"
    assert embedder.embedder_id == "http-text-embedding-ada-002"


def test_http_embedder_caches(tmp_path):
    session = FakeSession([ok([1.0, 2.0])])
    embedder, _ = http_embedder(session, tmp_path)
    embedder.embed("hello")
    embedder.embed("hello")
    assert len(session.calls) == 1
    files = [p.name for p in tmp_path.iterdir()]
    assert len(files) == 1 and files[0].endswith(".json")


def test_http_embedder_offline_serves_cache(tmp_path):
    session = FakeSession([ok([3.0])])
    online, _ = http_embedder(session, tmp_path)
    online.embed("hello")
    offline, _ = http_embedder(FakeSession([]), tmp_path, offline=True)
    assert np.array_equal(offline.embed("hello"), np.array([3.0]))


def test_http_embedder_offline_miss_raises(tmp_path):
    offline, _ = http_embedder(FakeSession([]), tmp_path, offline=True)
    with pytest.raises(EmbedderError, match="no cached embedding"):
        offline.embed("never seen")


def test_http_embedder_retries_5xx():
    session = FakeSession([FakeResponse(500), FakeResponse(429), ok([1.0])])
    embedder, sleeps = http_embedder(session)
    embedder.embed("hello")
    assert len(session.calls) == 3
    assert sleeps == [1.0, 2.0]


def test_http_embedder_gives_up():
    session = FakeSession([FakeResponse(500)] * 3)
    embedder, _ = http_embedder(session)
    with pytest.raises(EmbedderError, match="giving up after 3 attempts"):
        embedder.embed("hello")


def test_http_embedder_client_error_no_retry():
    session = FakeSession([FakeResponse(404, text="nope")])
    embedder, sleeps = http_embedder(session)
    with pytest.raises(EmbedderError, match="HTTP 404"):
        embedder.embed("hello")
    assert len(session.calls) == 1
    assert sleeps == []


def test_http_embedder_fingerprint_depends_on_model():
    a, _ = http_embedder(FakeSession([]))
    b, _ = http_embedder(FakeSession([]), model_id="other-model")
    assert a._fingerprint("x") != b._fingerprint("x")
    assert a._fingerprint("x") == a._fingerprint("x")


@given(
    st.lists(
        st.floats(min_value=-100, max_value=100, allow_nan=False),
        min_size=2, max_size=8,
    ),
    st.randoms(),
)
def test_cosine_symmetric_and_bounded(values, rng):
    a = np.array(values)
    shuffled = list(values)
    rng.shuffle(shuffled)
    b = np.array(shuffled)
    assert cosine(a, b) == pytest.approx(cosine(b, a))
    assert -1.0 - 1e-9 <= cosine(a, b) <= 1.0 + 1e-9

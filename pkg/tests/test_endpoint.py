import json
import threading

import httpx
import pytest

from resumegen.errors import CredentialMissing, EndpointFailure
from resumegen.rendering.endpoint import EndpointClient, RateLimiter


def _ok(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def _client(handler, tmp_path=None, **kw):
    kw.setdefault("sleep", lambda s: None)
    return EndpointClient(
        base_url="http://mock/v1",
        model="m",
        transport=httpx.MockTransport(handler),
        cache_dir=tmp_path / "cache" if tmp_path else None,
        log_path=tmp_path / "log.jsonl" if tmp_path else None,
        **kw,
    )


def test_retry_after_429(api_key, tmp_path):
    statuses = [429, 200]
    seen = []

    def handler(request):
        seen.append(json.loads(request.content))
        return _ok("hi") if statuses.pop(0) == 200 else httpx.Response(429)

    delays = []
    c = _client(handler, tmp_path, sleep=delays.append)
    assert c.complete("p", "t1") == "hi"
    assert c.requests_sent == 2 and delays == [1.0]
    assert seen[0] == {"model": "m", "messages": [{"role": "user", "content": "p"}], "temperature": 1.0}
    events = [json.loads(l) for l in (tmp_path / "log.jsonl").read_text().splitlines()]
    assert [e.get("status") for e in events if e["event"] == "request"] == [429, 200]


def test_credential_missing_before_request(monkeypatch):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    calls = []
    c = _client(lambda r: calls.append(r) or _ok("x"))
    with pytest.raises(CredentialMissing):
        c.complete("p")
    assert calls == [] and c.requests_sent == 0


def test_authorization_header(api_key):
    def handler(request):
        assert request.headers["Authorization"] == "Bearer test-key"
        return _ok("ok")

    assert _client(handler).complete("p") == "ok"


def test_exhausted_retries_and_fatal_status(api_key):
    delays = []
    c = _client(lambda r: httpx.Response(503), max_retries=3, sleep=delays.append)
    with pytest.raises(EndpointFailure) as exc:
        c.complete("p", "t9")
    assert exc.value.triple_id == "t9"
    assert c.requests_sent == 4 and delays == [1.0, 2.0, 4.0]
    c = _client(lambda r: httpx.Response(401))
    with pytest.raises(EndpointFailure):
        c.complete("p")
    assert c.requests_sent == 1


def test_transport_error_is_retried(api_key):
    attempts = []

    def handler(request):
        attempts.append(1)
        if len(attempts) == 1:
            raise httpx.ConnectError("down")
        return _ok("back")

    assert _client(handler).complete("p") == "back"


def test_malformed_payload(api_key):
    with pytest.raises(EndpointFailure):
        _client(lambda r: httpx.Response(200, json={"nope": 1})).complete("p")


def test_cache_dedup_across_clients_and_threads(api_key, tmp_path):
    count = []
    lock = threading.Lock()

    def handler(request):
        with lock:
            count.append(1)
        return _ok("reply:" + json.loads(request.content)["messages"][0]["content"])

    c = _client(handler, tmp_path)
    threads = [threading.Thread(target=c.complete, args=(f"p{i % 3}",)) for i in range(12)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(count) == 3
    again = _client(handler, tmp_path)
    assert again.complete("p1") == "reply:p1" and len(count) == 3
    assert again.cached("p2") == "reply:p2"
    # model and temperature are part of the key
    other = EndpointClient("http://mock/v1", "m", temperature=0.0, transport=httpx.MockTransport(handler), cache_dir=tmp_path / "cache")
    other.complete("p1")
    assert len(count) == 4


def test_oracle_binds_triple_id(api_key, tmp_path):
    c = _client(lambda r: _ok("7"), tmp_path)
    assert c.oracle("t5")("count?") == "7"
    events = [json.loads(l) for l in (tmp_path / "log.jsonl").read_text().splitlines()]
    assert {e["triple_id"] for e in events} == {"t5"}


def test_rate_limiter_spacing():
    now = [0.0]
    slept = []

    def sleep(s):
        slept.append(s)
        now[0] += s

    rl = RateLimiter(0.5, clock=lambda: now[0], sleep=sleep)
    for _ in range(3):
        rl.wait()
    assert slept == [0.5, 0.5]

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class MockEndpoint:
    """Chat-completion server on localhost.

    Replies come from ``replies`` (exact prompt match), then ``responder``,
    then ``default``.  ``script`` holds status codes to return before the next
    successful reply; after ``fail_after`` successful replies every request
    gets a 503.  Every received prompt is recorded.
    """

    def __init__(self):
        self.replies: dict[str, str] = {}
        self.responder = None
        self.default = "4"
        self.script: list[int] = []
        self.fail_after: int | None = None
        self.served = 0
        self.prompts: list[str] = []
        self.lock = threading.Lock()
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                prompt = body["messages"][0]["content"]
                with mock.lock:
                    mock.prompts.append(prompt)
                    status = mock.script.pop(0) if mock.script else 200
                    if status == 200 and mock.fail_after is not None and mock.served >= mock.fail_after:
                        status = 503
                    mock.served += status == 200
                if status != 200:
                    self.send_response(status)
                    self.end_headers()
                    return
                text = mock.replies.get(prompt)
                if text is None and mock.responder is not None:
                    text = mock.responder(prompt)
                if text is None:
                    text = mock.default
                payload = json.dumps({"choices": [{"message": {"role": "assistant", "content": text}}]}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}/v1"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def mock_endpoint():
    with MockEndpoint() as m:
        yield m


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "test-key")


ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(key: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE[key] = f"{'PASS' if passed else 'FAIL'}  {key}: {detail}"
        print(ACCEPTANCE[key])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (len(k.split()[0]), k)):
            terminalreporter.write_line(ACCEPTANCE[key])

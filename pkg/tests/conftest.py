import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class StubChatServer:
    """Deterministic chat-completions stub for sampler and judge tests.

    ``reply_fn(payload)`` produces the response text; ``fail_next`` makes the
    next N requests answer 500. Every request (path, payload, auth header) is
    captured for payload-contract assertions.
    """

    def __init__(self):
        self.requests = []
        self.fail_next = 0
        self.reply_fn = lambda payload: (
            f"stub reply seed={payload.get('seed')} " + "word " * 24
        ).strip()
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    stub.requests.append(
                        {
                            "path": self.path,
                            "payload": payload,
                            "authorization": self.headers.get("Authorization"),
                        }
                    )
                    fail = stub.fail_next > 0
                    if fail:
                        stub.fail_next -= 1
                if fail:
                    self.send_response(500)
                    self.end_headers()
                    return
                text = stub.reply_fn(payload)
                body = json.dumps(
                    {
                        "choices": [
                            {
                                "message": {"content": text},
                                "finish_reason": "stop",
                            }
                        ]
                    }
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self._server.server_port}"

    def start(self):
        self._thread.start()

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_server():
    server = StubChatServer()
    server.start()
    yield server
    server.stop()

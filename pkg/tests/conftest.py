import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from zslreq.embedding import load_lexicon

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def mini_lexicon():
    return load_lexicon(FIXTURES / "mini_vectors.txt")


class StubEmbeddingServer:
    """Tiny /embed endpoint with a scriptable response.

    ``responder(texts)`` returns (status, payload); payload may be a dict
    (sent as JSON) or raw bytes (sent as-is, for malformed-body tests).
    """

    def __init__(self, responder):
        self.responder = responder
        self.requests = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length))
                outer.requests.append(body)
                status, payload = outer.responder(body.get("texts", []))
                raw = (
                    payload
                    if isinstance(payload, bytes)
                    else json.dumps(payload).encode("utf-8")
                )
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def __enter__(self):
        self._thread.start()
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_server():
    servers = []

    def factory(responder):
        server = StubEmbeddingServer(responder)
        servers.append(server)
        return server

    yield factory
    for server in servers:
        server.__exit__()


def echo_responder(vectors_by_text):
    """Responder mapping exact texts to fixed vectors."""

    def respond(texts):
        rows = [vectors_by_text[t] for t in texts]
        dim = len(rows[0]) if rows else 0
        return 200, {"model": "stub", "dim": dim, "embeddings": rows}

    return respond

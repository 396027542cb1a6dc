"""HTTP embedding client against an in-process stub service.

The stub implements only the documented wire protocol and serves the same
trigram vectors as the offline backend, so remote-path results must equal
lexical-path results exactly.
"""
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from navscore import (
    BackendError,
    enhanced_score,
    lexical_backend,
    normalize,
    remote_backend,
    token_match_f1,
)

VECTORIZER = lexical_backend()


class StubHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # keep test output clean
        pass

    def _send(self, status, payload):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path != "/v1/health":
            self._send(404, {"error": "not found"})
            return
        if self.server.mode == "unhealthy":
            self._send(503, {"error": "model not loaded"})
            return
        self._send(200, {"status": "ok", "model": self.server.model, "dim": self.server.dim})

    def do_POST(self):
        if self.path != "/v1/token_embeddings":
            self._send(404, {"error": "not found"})
            return
        self.server.request_count += 1
        if self.server.mode == "server_error":
            self._send(500, {"error": "boom"})
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            payload = json.loads(self.rfile.read(length))
            texts = payload["texts"]
            assert isinstance(texts, list)
        except Exception:
            self._send(400, {"error": "malformed request"})
            return

        if self.server.mode == "dim_flip":
            dim = 512 if self.server.request_count == 1 else 256
            items = [
                {"tokens": list(normalize(t).tokens),
                 "vectors": [[0.0] * dim for _ in normalize(t).tokens]}
                for t in texts
            ]
            self._send(200, {"model": self.server.model, "dim": dim, "items": items})
            return
        if self.server.mode == "misaligned":
            items = [{"tokens": ["a", "b"], "vectors": [[0.0] * self.server.dim]} for _ in texts]
            self._send(200, {"model": self.server.model, "dim": self.server.dim, "items": items})
            return

        items = []
        for text in texts:
            emb = VECTORIZER.embed([text])[0]
            items.append({
                "tokens": list(emb.tokens),
                "vectors": [row.tolist() for row in emb.vectors],
            })
        self._send(200, {"model": self.server.model, "dim": self.server.dim, "items": items})


@pytest.fixture()
def stub():
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
    server.mode = "ok"
    server.model = "trigram-stub"
    server.dim = 512
    server.request_count = 0
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()


def endpoint_of(server):
    host, port = server.server_address
    return f"http://{host}:{port}"


class TestProtocol:
    def test_health(self, stub):
        backend = remote_backend(endpoint_of(stub))
        payload = backend.health()
        assert payload == {"status": "ok", "model": "trigram-stub", "dim": 512}
        assert backend.identity == f"remote:trigram-stub@{endpoint_of(stub)}"

    def test_identity_before_first_contact(self, stub):
        backend = remote_backend(endpoint_of(stub))
        assert backend.identity == f"remote:{endpoint_of(stub)}"

    def test_embed_alignment(self, stub):
        backend = remote_backend(endpoint_of(stub))
        texts = ["turn left", "", "go straight ahead"]
        items = backend.embed(texts)
        assert len(items) == len(texts)
        for text, item in zip(texts, items):
            assert item.tokens == normalize(text).tokens
            assert item.vectors.shape == (len(item.tokens), 512)

    def test_empty_text_list_needs_no_requests(self, stub):
        backend = remote_backend(endpoint_of(stub))
        assert backend.embed([]) == []
        assert stub.request_count == 0

    def test_batching_respects_max_batch(self, stub):
        backend = remote_backend(endpoint_of(stub), max_batch=2)
        backend.embed(["one", "two", "three", "four", "five"])
        assert stub.request_count == 3  # 2 + 2 + 1

    def test_unhealthy_service_raises(self, stub):
        stub.mode = "unhealthy"
        with pytest.raises(BackendError, match="unhealthy"):
            remote_backend(endpoint_of(stub)).health()

    def test_server_error_raises(self, stub):
        stub.mode = "server_error"
        with pytest.raises(BackendError, match="HTTP 500"):
            remote_backend(endpoint_of(stub)).embed(["hello"])

    def test_dimension_change_detected(self, stub):
        stub.mode = "dim_flip"
        backend = remote_backend(endpoint_of(stub), max_batch=1)
        with pytest.raises(BackendError, match="dimension changed"):
            backend.embed(["first", "second"])

    def test_misaligned_item_rejected(self, stub):
        stub.mode = "misaligned"
        with pytest.raises(BackendError, match="misaligned"):
            remote_backend(endpoint_of(stub)).embed(["hello"])

    def test_unreachable_endpoint_raises(self):
        backend = remote_backend("http://127.0.0.1:9", timeout=0.3)
        with pytest.raises(BackendError, match="unreachable"):
            backend.embed(["hello"])


class TestWireEquivalence:
    """Identical vectors over the wire give bitwise-identical scores."""

    def test_token_match_f1_matches_lexical_path(self, stub):
        remote = remote_backend(endpoint_of(stub))
        local = lexical_backend()
        pairs = [
            ("turn left then walk forward", "walk forward then turn left"),
            ("go straight to the desk", "walk ahead to the desk"),
            ("yes there is a table", "yes there is a table"),
        ]
        for ref, pred in pairs:
            via_wire = token_match_f1(ref, pred, remote)
            direct = token_match_f1(ref, pred, local)
            assert (via_wire.precision, via_wire.recall, via_wire.f1) == (
                direct.precision, direct.recall, direct.f1,
            ), (ref, pred)

    def test_full_breakdown_matches_lexical_path(self, stub):
        remote = remote_backend(endpoint_of(stub))
        local = lexical_backend()
        ref, pred = "Go straight for a few steps and turn left.", "Walk forward then turn left."
        via_wire = enhanced_score(ref, pred, remote)
        direct = enhanced_score(ref, pred, local)
        assert via_wire.to_dict() == direct.to_dict()

    def test_round_trip_preserves_vectors_exactly(self, stub):
        remote = remote_backend(endpoint_of(stub))
        local = lexical_backend()
        wire = remote.embed(["walking walker walked"])[0]
        direct = local.embed(["walking walker walked"])[0]
        assert wire.tokens == direct.tokens
        assert np.array_equal(wire.vectors, direct.vectors)

"""
Scoring with a remote embedding service
=======================================

The scorer is backend-agnostic: anything that maps texts to per-token unit
vectors can drive the semantic term. ``RemoteBackend`` speaks a small HTTP
protocol — ``GET /v1/health`` and ``POST /v1/token_embeddings`` — so heavy
models can live in a separate process (see the sidecar package) while this
library stays lightweight.

Start a service first, e.g.::

    navscore-sidecar --model /path/to/bert --port 8900

then run this script. Without a running service it prints the health error
and falls back to the lexical backend.
"""

from navscore import BackendError, remote_backend, score_texts

ENDPOINT = "http://127.0.0.1:8900"

backend = remote_backend(ENDPOINT, timeout=2.0)
try:
    health = backend.health()
except BackendError as exc:
    print("remote service unavailable:", exc)
    print("falling back to the lexical backend")
    backend = None
else:
    print("service healthy:", health)
    print("backend identity:", backend.identity)

reference = "Walk forward and turn left at the shelf."
prediction = "Go straight, then take a left at the shelf."

breakdown = (
    score_texts(reference, prediction, backend=backend)
    if backend is not None
    else score_texts(reference, prediction)
)
print()
print("final_score:", round(breakdown.final_score, 4))
print("semantic_similarity:", round(breakdown.semantic_similarity, 4))

# Error handling contract: connection failures, non-200 responses, and
# malformed payloads all surface as BackendError — the CLI maps that to
# exit code 3 so batch jobs can tell "bad input" from "service down".
probe = remote_backend("http://127.0.0.1:9", timeout=0.5)
try:
    probe.embed(["turn left"])
except BackendError as exc:
    print()
    print("unreachable endpoint raises BackendError:", exc)

"""Token-embedding HTTP service for the navscore remote backend.

Wraps a pretrained bidirectional-transformer encoder behind the small wire
protocol the metric library's remote backend speaks:

* ``GET /v1/health`` → ``{"status": "ok", "model": ..., "dim": ...}``
* ``POST /v1/token_embeddings`` with ``{"texts": [...]}`` →
  ``{"model": ..., "dim": ..., "items": [{"tokens": [...], "vectors":
  [[...], ...], "truncated": bool}, ...]}``, one item per input text, one
  L2-normalized vector per token, special/padding tokens stripped.
* Errors: HTTP 400 for a malformed request, 503 until the model has
  loaded, both with a ``{"error": ...}`` body.

Subword tokens are returned as-is (no word-level pooling); the consumer's
greedy matcher works at whatever granularity the tokenizer produces.
"""
from __future__ import annotations

import argparse
import logging
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass

import torch
from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse
from transformers import AutoModel, AutoTokenizer

log = logging.getLogger("navscore_sidecar")


@dataclass(frozen=True)
class SidecarConfig:
    """Deployment parameters for the embedding service.

    ``model`` is a local directory or hub identifier accepted by the
    transformers ``from_pretrained`` loaders. ``max_tokens`` caps the
    tokenized length of each text (including special tokens); longer texts
    are truncated and flagged in the response.
    """

    model: str
    host: str = "127.0.0.1"
    port: int = 8900
    batch_size: int = 32
    max_tokens: int = 128

    def __post_init__(self) -> None:
        if not self.model:
            raise ValueError("model must be a non-empty identifier or path")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_tokens < 4:
            raise ValueError(f"max_tokens must be >= 4, got {self.max_tokens}")
        if not 0 < self.port < 65536:
            raise ValueError(f"port must be in 1..65535, got {self.port}")


class TokenEmbedder:
    """Tokenizer/encoder pair producing unit-norm per-token vectors.

    Inference runs in eval mode under a lock, so identical requests yield
    identical responses and concurrent callers are safe. Instances hold no
    per-request state.
    """

    def __init__(self, model: str, *, batch_size: int = 32, max_tokens: int = 128):
        self.tokenizer = AutoTokenizer.from_pretrained(model)
        self.model = AutoModel.from_pretrained(model).eval()
        self.dim = int(self.model.config.hidden_size)
        self.batch_size = batch_size
        self.max_tokens = max_tokens
        self._lock = threading.Lock()

    def embed_texts(self, texts: list[str]) -> list[dict]:
        """Embed each text, returning wire-protocol item dicts in order."""
        items: list[dict] = []
        for start in range(0, len(texts), self.batch_size):
            items.extend(self._embed_batch(texts[start:start + self.batch_size]))
        return items

    def _embed_batch(self, texts: list[str]) -> list[dict]:
        # The lock covers tokenization as well as the forward pass: the
        # tokenizer mutates internal truncation/padding state per call and
        # is not safe under concurrent use.
        with self._lock:
            return self._embed_batch_locked(texts)

    def _embed_batch_locked(self, texts: list[str]) -> list[dict]:
        clipped = [
            self.tokenizer(text, add_special_tokens=True, truncation=True,
                           max_length=self.max_tokens)["input_ids"]
            for text in texts
        ]
        full_lengths = [
            len(self.tokenizer(text, add_special_tokens=True)["input_ids"])
            for text in texts
        ]
        batch = self.tokenizer.pad({"input_ids": clipped}, padding=True,
                                   return_tensors="pt")
        with torch.inference_mode():
            hidden = self.model(**batch).last_hidden_state

        items = []
        for row, ids in enumerate(clipped):
            special = self.tokenizer.get_special_tokens_mask(
                ids, already_has_special_tokens=True
            )
            keep = [i for i, flag in enumerate(special) if not flag]
            vectors = hidden[row, keep]
            norms = vectors.norm(dim=1, keepdim=True).clamp_min(1e-12)
            items.append({
                "tokens": self.tokenizer.convert_ids_to_tokens([ids[i] for i in keep]),
                "vectors": (vectors / norms).tolist(),
                "truncated": full_lengths[row] > len(ids),
            })
        return items


def create_app(config: SidecarConfig, embedder: TokenEmbedder | None = None,
               *, background_load: bool | None = None) -> FastAPI:
    """Build the service application.

    Pass a ready ``embedder`` to serve immediately, or leave it None to
    load the configured model in a background thread at startup — requests
    arriving before the load finishes get HTTP 503.
    """
    if background_load is None:
        background_load = embedder is None

    def load_model() -> None:
        try:
            app.state.embedder = TokenEmbedder(
                config.model, batch_size=config.batch_size,
                max_tokens=config.max_tokens,
            )
            log.info("model %s loaded, dim=%d", config.model, app.state.embedder.dim)
        except Exception:
            log.exception("failed to load model %s", config.model)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.embedder is None and background_load:
            threading.Thread(target=load_model, daemon=True).start()
        yield

    app = FastAPI(title="navscore-sidecar", lifespan=lifespan)
    app.state.config = config
    app.state.embedder = embedder

    @app.get("/v1/health")
    async def health(request: Request):
        ready = request.app.state.embedder
        if ready is None:
            return JSONResponse({"error": "model not loaded"}, status_code=503)
        return {"status": "ok", "model": config.model, "dim": ready.dim}

    @app.post("/v1/token_embeddings")
    async def token_embeddings(request: Request):
        ready = request.app.state.embedder
        if ready is None:
            return JSONResponse({"error": "model not loaded"}, status_code=503)
        try:
            payload = await request.json()
        except Exception:
            return JSONResponse({"error": "request body is not valid JSON"},
                                status_code=400)
        if not isinstance(payload, dict):
            return JSONResponse({"error": "request body must be a JSON object"},
                                status_code=400)
        texts = payload.get("texts")
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return JSONResponse({"error": '"texts" must be a list of strings'},
                                status_code=400)
        items = await run_in_threadpool(ready.embed_texts, texts)
        return {"model": config.model, "dim": ready.dim, "items": items}

    return app


def serve(config: SidecarConfig) -> None:
    """Run the service until interrupted (model loads at startup)."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level="info")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navscore-sidecar",
        description="Serve token-level contextual embeddings over HTTP "
                    "for the navscore remote backend.",
    )
    parser.add_argument("--model", required=True,
                        help="encoder to load: a local directory or a hub model id")
    parser.add_argument("--host", default="127.0.0.1", help="bind address")
    parser.add_argument("--port", type=int, default=8900, help="bind port")
    parser.add_argument("--batch-size", type=int, default=32,
                        help="texts per inference batch")
    parser.add_argument("--max-tokens", type=int, default=128,
                        help="per-text token cap; longer texts are truncated "
                             "and flagged")
    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    serve(SidecarConfig(model=args.model, host=args.host, port=args.port,
                        batch_size=args.batch_size, max_tokens=args.max_tokens))


def run() -> None:
    main()


if __name__ == "__main__":
    run()

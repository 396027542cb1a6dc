"""Token-level similarity over pluggable embedding backends.

The core is a greedy soft-matching F1: every reference token is matched to
its most similar prediction token (recall side) and vice versa (precision
side), with optional per-token weights. Two backends ship in the box: a
deterministic character-trigram hashing backend that needs no network or
model files, and an HTTP client for an external embedding service.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol, Sequence, runtime_checkable

import numpy as np
import requests

from .instructions import DirectionLexicon, Instruction, extract_actions, normalize


class BackendError(RuntimeError):
    """An embedding backend could not produce usable vectors."""


@dataclass(frozen=True)
class TokenEmbeddings:
    """Tokens of one text with one embedding row per token (shape (n, dim))."""

    tokens: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.tokens):
            raise ValueError(
                f"vectors shape {self.vectors.shape} does not match {len(self.tokens)} tokens"
            )


@runtime_checkable
class EmbeddingBackend(Protocol):
    """Anything that can turn texts into per-token embeddings."""

    @property
    def identity(self) -> str: ...

    def embed(self, texts: Sequence[str]) -> list[TokenEmbeddings]: ...


@dataclass(frozen=True)
class SimilarityResult:
    precision: float
    recall: float
    f1: float


def _pairwise_cosine(ref: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Cosine similarity matrix clamped to [0, 1].

    Rows that are bitwise identical are pinned to exactly 1.0 so that a text
    compared with itself scores a clean 1 regardless of floating-point
    rounding in the dot products.
    """
    ref_norms = np.linalg.norm(ref, axis=1, keepdims=True)
    pred_norms = np.linalg.norm(pred, axis=1, keepdims=True)
    ref_unit = np.divide(ref, ref_norms, out=np.zeros_like(ref, dtype=float), where=ref_norms > 0)
    pred_unit = np.divide(
        pred, pred_norms, out=np.zeros_like(pred, dtype=float), where=pred_norms > 0
    )
    sim = np.clip(ref_unit @ pred_unit.T, 0.0, 1.0)
    near_one = np.argwhere(sim >= 1.0 - 1e-9)
    for i, j in near_one:
        if np.array_equal(ref[i], pred[j]):
            sim[i, j] = 1.0
    return sim


def _weight_vector(tokens: Sequence[str], weights: Mapping[str, float] | None) -> np.ndarray:
    if weights is None:
        return np.ones(len(tokens))
    return np.array([float(weights.get(tok, 1.0)) for tok in tokens])


def token_match_f1(
    ref: Instruction | str,
    pred: Instruction | str,
    backend: EmbeddingBackend,
    weights: Mapping[str, float] | None = None,
) -> SimilarityResult:
    """Greedy soft-matching precision/recall/F1 between two texts.

    Recall averages, over reference tokens, each token's best cosine match
    among prediction tokens; precision is the mirror image; F1 is their
    harmonic mean. `weights` maps token strings to non-negative emphasis
    factors (unlisted tokens weigh 1). Two empty texts score (1, 1, 1); one
    empty text scores (0, 0, 0).
    """
    ref_instr = ref if isinstance(ref, Instruction) else normalize(ref)
    pred_instr = pred if isinstance(pred, Instruction) else normalize(pred)
    if not ref_instr.tokens and not pred_instr.tokens:
        return SimilarityResult(1.0, 1.0, 1.0)
    if not ref_instr.tokens or not pred_instr.tokens:
        return SimilarityResult(0.0, 0.0, 0.0)

    ref_emb, pred_emb = backend.embed([ref_instr.raw, pred_instr.raw])
    if ref_emb.vectors.shape[1] != pred_emb.vectors.shape[1]:
        raise BackendError(
            f"backend {backend.identity!r} returned mismatched dimensions "
            f"{ref_emb.vectors.shape[1]} vs {pred_emb.vectors.shape[1]}"
        )
    if not ref_emb.tokens or not pred_emb.tokens:
        return SimilarityResult(0.0, 0.0, 0.0)

    sim = _pairwise_cosine(ref_emb.vectors, pred_emb.vectors)
    w_ref = _weight_vector(ref_emb.tokens, weights)
    w_pred = _weight_vector(pred_emb.tokens, weights)
    if w_ref.sum() <= 0 or w_pred.sum() <= 0:
        return SimilarityResult(0.0, 0.0, 0.0)

    recall = min(1.0, float((w_ref * sim.max(axis=1)).sum() / w_ref.sum()))
    precision = min(1.0, float((w_pred * sim.max(axis=0)).sum() / w_pred.sum()))
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = min(1.0, 2.0 * precision * recall / (precision + recall))
    return SimilarityResult(precision=precision, recall=recall, f1=f1)


def weighted_directional_similarity(
    ref: Instruction | str,
    pred: Instruction | str,
    backend: EmbeddingBackend,
    lexicon: DirectionLexicon | None = None,
    boost_factor: float = 2.0,
) -> SimilarityResult:
    """Token-match F1 with direction-bearing tokens weighted up.

    Every token inside a phrase the lexicon recognizes, on either side,
    carries `boost_factor` weight; all other tokens weigh 1. With
    boost_factor=1 this reduces to the unweighted score.
    """
    if boost_factor < 1.0:
        raise ValueError(f"boost_factor must be >= 1, got {boost_factor}")
    lexicon = lexicon or DirectionLexicon.default()
    ref_instr = ref if isinstance(ref, Instruction) else normalize(ref)
    pred_instr = pred if isinstance(pred, Instruction) else normalize(pred)
    weights: dict[str, float] = {}
    for instr in (ref_instr, pred_instr):
        for action in extract_actions(instr, lexicon):
            for token in action.surface.split():
                weights[token] = boost_factor
    return token_match_f1(ref_instr, pred_instr, backend, weights=weights)


_LEXICAL_DIM = 512


class LexicalBackend:
    """Character-trigram hashing embeddings: deterministic, offline, fast.

    Each token is padded to "#token#", its character trigrams are hashed
    (CRC-32 mod 512) into a count vector, and the vector is L2-normalized.
    Shared trigrams give related surface forms ("walk"/"walking") high
    cosine; unrelated words land near zero.
    """

    identity = f"lexical-trigram-{_LEXICAL_DIM}"

    def __init__(self):
        self._cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        padded = f"#{token}#"
        vec = np.zeros(_LEXICAL_DIM)
        for i in range(len(padded) - 2):
            gram = padded[i : i + 3]
            vec[zlib.crc32(gram.encode("utf-8")) % _LEXICAL_DIM] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        vec.flags.writeable = False
        self._cache[token] = vec
        return vec

    def embed(self, texts: Sequence[str]) -> list[TokenEmbeddings]:
        out = []
        for text in texts:
            tokens = normalize(text).tokens
            if tokens:
                vectors = np.stack([self._token_vector(tok) for tok in tokens])
            else:
                vectors = np.zeros((0, _LEXICAL_DIM))
            out.append(TokenEmbeddings(tokens=tokens, vectors=vectors))
        return out


def lexical_backend() -> LexicalBackend:
    return LexicalBackend()


class RemoteBackend:
    """Client for an HTTP token-embedding service.

    Speaks a small JSON protocol: POST {endpoint}/v1/token_embeddings with
    {"texts": [...]} and expect {"model", "dim", "items": [{"tokens",
    "vectors"}, ...]} aligned with the request. GET {endpoint}/v1/health
    reports the served model and dimension. All transport and shape problems
    surface as BackendError.
    """

    def __init__(self, endpoint: str, timeout: float = 5.0, max_batch: int = 32):
        if max_batch < 1:
            raise ValueError(f"max_batch must be >= 1, got {max_batch}")
        self._endpoint = endpoint.rstrip("/")
        self._timeout = timeout
        self._max_batch = max_batch
        self._session = requests.Session()
        self._model: str | None = None
        self._dim: int | None = None

    @property
    def endpoint(self) -> str:
        return self._endpoint

    @property
    def identity(self) -> str:
        if self._model is not None:
            return f"remote:{self._model}@{self._endpoint}"
        return f"remote:{self._endpoint}"

    def health(self) -> dict:
        try:
            response = self._session.get(f"{self._endpoint}/v1/health", timeout=self._timeout)
        except requests.RequestException as exc:
            raise BackendError(f"embedding service unreachable at {self._endpoint}: {exc}") from exc
        if response.status_code != 200:
            raise BackendError(
                f"embedding service unhealthy at {self._endpoint}: HTTP {response.status_code}"
            )
        payload = response.json()
        if payload.get("status") != "ok":
            raise BackendError(f"embedding service unhealthy: {payload!r}")
        self._model = str(payload.get("model", ""))
        self._dim = int(payload.get("dim", 0))
        return payload

    def _post_batch(self, texts: Sequence[str]) -> list[TokenEmbeddings]:
        try:
            response = self._session.post(
                f"{self._endpoint}/v1/token_embeddings",
                json={"texts": list(texts)},
                timeout=self._timeout,
            )
        except requests.RequestException as exc:
            raise BackendError(f"embedding service unreachable at {self._endpoint}: {exc}") from exc
        if response.status_code != 200:
            detail = ""
            try:
                detail = response.json().get("error", "")
            except ValueError:
                pass
            raise BackendError(
                f"embedding request failed: HTTP {response.status_code}"
                + (f" ({detail})" if detail else "")
            )
        try:
            payload = response.json()
        except ValueError as exc:
            raise BackendError(f"embedding service returned non-JSON body: {exc}") from exc
        return self._parse_payload(payload, expected=len(texts))

    def _parse_payload(self, payload: dict, expected: int) -> list[TokenEmbeddings]:
        if not isinstance(payload, dict) or "items" not in payload:
            raise BackendError(f"malformed embedding response: {type(payload).__name__}")
        model = payload.get("model")
        dim = payload.get("dim")
        if not isinstance(model, str) or not isinstance(dim, int) or dim < 1:
            raise BackendError("malformed embedding response: missing model/dim")
        if self._dim is not None and dim != self._dim:
            raise BackendError(f"embedding dimension changed from {self._dim} to {dim}")
        self._model, self._dim = model, dim
        items = payload["items"]
        if not isinstance(items, list) or len(items) != expected:
            raise BackendError(
                f"embedding response has {len(items) if isinstance(items, list) else '?'} items, "
                f"expected {expected}"
            )
        out = []
        for item in items:
            tokens = item.get("tokens")
            vectors = item.get("vectors")
            if not isinstance(tokens, list) or not isinstance(vectors, list):
                raise BackendError("malformed embedding item: missing tokens/vectors")
            if len(tokens) != len(vectors):
                raise BackendError(
                    f"embedding item misaligned: {len(tokens)} tokens, {len(vectors)} vectors"
                )
            if tokens:
                array = np.asarray(vectors, dtype=float)
                if array.ndim != 2 or array.shape[1] != dim:
                    raise BackendError(
                        f"embedding vectors have shape {array.shape}, expected (*, {dim})"
                    )
            else:
                array = np.zeros((0, dim))
            out.append(TokenEmbeddings(tokens=tuple(str(t) for t in tokens), vectors=array))
        return out

    def embed(self, texts: Sequence[str]) -> list[TokenEmbeddings]:
        out: list[TokenEmbeddings] = []
        for start in range(0, len(texts), self._max_batch):
            out.extend(self._post_batch(texts[start : start + self._max_batch]))
        return out


def remote_backend(endpoint: str, timeout: float = 5.0, max_batch: int = 32) -> RemoteBackend:
    return RemoteBackend(endpoint, timeout=timeout, max_batch=max_batch)

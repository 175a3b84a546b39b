"""Sentence embeddings: a deterministic local backend and a remote HTTP client.

The local backend is a signed hashed bag-of-words. It is not a semantic model;
it exists so the whole pipeline runs offline with bit-reproducible vectors.
Token hashing uses blake2b with a fixed key, so vectors are stable across
processes and platforms.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyTextError,
    RemoteUnavailableError,
    ZeroVectorError,
)
from .textnorm import tokenize

DEFAULT_DIMENSION: int = 384

_HASH_KEY = b"recallkit-embed-v1"


@dataclass(frozen=True)
class EmbedderSpec:
    """Configuration for embedding backends."""

    dimension: int = DEFAULT_DIMENSION
    backend: str = "deterministic_local"  # or "remote"
    normalize: bool = True

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("embedding dimension must be positive")
        if self.backend not in ("deterministic_local", "remote"):
            raise ValueError(f"unknown embedder backend: {self.backend}")


class Embedder(Protocol):
    spec: EmbedderSpec

    def embed(self, text: str) -> np.ndarray: ...


def _token_bucket_sign(token: str, dimension: int) -> tuple[int, float]:
    digest = hashlib.blake2b(token.encode("utf-8"), key=_HASH_KEY, digest_size=16).digest()
    value = int.from_bytes(digest, "big")
    bucket = value % dimension
    sign = 1.0 if (value >> 127) & 1 == 0 else -1.0
    return bucket, sign


class HashedBowEmbedder:
    """Deterministic signed hashed bag-of-words, L2-normalized by default."""

    def __init__(self, spec: EmbedderSpec | None = None):
        self.spec = spec or EmbedderSpec()

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyTextError("cannot embed text that is empty after normalization")
        vec = np.zeros(self.spec.dimension, dtype=np.float64)
        for token in tokens:
            bucket, sign = _token_bucket_sign(token, self.spec.dimension)
            vec[bucket] += sign
        if self.spec.normalize:
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                # All token contributions cancelled (needs opposing hash
                # collisions); fall back to a fixed unit vector rather than
                # violate the unit-norm invariant.
                vec[0] = 1.0
            else:
                vec /= norm
        return vec


class RemoteEmbedder:
    """Client for an HTTP embedding endpoint: POST {"text"} -> {"embedding"}.

    Endpoint and timeout come from the constructor; the bearer token is read
    from the environment so secrets never live in config files.
    """

    def __init__(
        self,
        spec: EmbedderSpec,
        endpoint: str,
        *,
        timeout_s: float = 10.0,
        token_env: str = "RECALLKIT_EMBED_TOKEN",
    ):
        self.spec = spec
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.token_env = token_env

    def embed(self, text: str) -> np.ndarray:
        import httpx

        if not text.strip():
            raise EmptyTextError("cannot embed empty text")
        headers = {}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            resp = httpx.post(
                self.endpoint, json={"text": text}, headers=headers, timeout=self.timeout_s
            )
        except httpx.TimeoutException as exc:
            raise RemoteUnavailableError(f"embedding endpoint timed out: {exc}", retryable=True)
        except httpx.HTTPError as exc:
            raise RemoteUnavailableError(f"embedding endpoint unreachable: {exc}", retryable=True)
        if resp.status_code >= 500:
            raise RemoteUnavailableError(
                f"embedding endpoint returned {resp.status_code}", retryable=True
            )
        if resp.status_code != 200:
            raise RemoteUnavailableError(
                f"embedding endpoint returned {resp.status_code}", retryable=False
            )
        values = resp.json().get("embedding")
        if not isinstance(values, list) or len(values) != self.spec.dimension:
            raise RemoteUnavailableError(
                "embedding endpoint returned a malformed vector", retryable=False
            )
        vec = np.asarray(values, dtype=np.float64)
        if self.spec.normalize:
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                raise RemoteUnavailableError(
                    "embedding endpoint returned a zero vector", retryable=False
                )
            vec = vec / norm
        return vec


def embed(spec: EmbedderSpec, text: str) -> np.ndarray:
    """Embed with the deterministic local backend described by `spec`.

    Remote embedding needs an endpoint; construct a RemoteEmbedder for that.
    """
    if spec.backend != "deterministic_local":
        raise ValueError("embed() only serves the deterministic_local backend")
    return HashedBowEmbedder(spec).embed(text)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; rejects mismatched or zero vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatchError(f"cosine shapes differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine is undefined for zero-magnitude vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))

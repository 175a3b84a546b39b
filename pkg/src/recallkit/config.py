"""Engine configuration: one dataclass, YAML loading, component factories.

Secrets never appear here. Remote backends read their bearer tokens from the
environment; config files carry endpoints and tuning knobs only.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import yaml

from .backends import ExtractiveMockBackend, RemoteBackend
from .embedding import EmbedderSpec, HashedBowEmbedder, RemoteEmbedder
from .errors import IoFailureError
from .ingest import DEFAULT_CAPACITY_CHARS, DEFAULT_FLUSH_THRESHOLD_CHARS
from .store import DEFAULT_K, DEFAULT_TOKEN_BUDGET, MemoryStore, RetrievalConfig


@dataclass(frozen=True)
class EngineConfig:
    """Everything needed to assemble a running engine."""

    capacity_chars: int = DEFAULT_CAPACITY_CHARS
    flush_threshold_chars: int = DEFAULT_FLUSH_THRESHOLD_CHARS
    dimension: int = 384
    k: int = DEFAULT_K
    token_budget: int = DEFAULT_TOKEN_BUDGET
    tokenizer: str = "chars_div_4"
    embedder_backend: str = "deterministic_local"  # or "remote"
    text_backend: str = "extractive_mock"  # or "remote"
    embed_endpoint: str | None = None
    llm_endpoint: str | None = None
    store_path: str | None = None
    log_path: str | None = None

    def __post_init__(self):
        if self.capacity_chars < 1:
            raise ValueError("capacity_chars must be positive")
        if self.flush_threshold_chars < 1:
            raise ValueError("flush_threshold_chars must be positive")
        if self.embedder_backend not in ("deterministic_local", "remote"):
            raise ValueError(f"unknown embedder backend: {self.embedder_backend}")
        if self.text_backend not in ("extractive_mock", "remote"):
            raise ValueError(f"unknown text backend: {self.text_backend}")
        if self.embedder_backend == "remote" and not self.embed_endpoint:
            raise ValueError("remote embedder needs embed_endpoint")
        if self.text_backend == "remote" and not self.llm_endpoint:
            raise ValueError("remote text backend needs llm_endpoint")

    @property
    def retrieval(self) -> RetrievalConfig:
        return RetrievalConfig(k=self.k, token_budget=self.token_budget, tokenizer=self.tokenizer)


def load_config(path: str | Path) -> EngineConfig:
    """Read an EngineConfig from a YAML mapping; unknown keys are rejected."""
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read config file {path}: {exc}") from exc
    doc = yaml.safe_load(raw) or {}
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must contain a mapping")
    known = {f.name for f in fields(EngineConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return EngineConfig(**doc)


def make_embedder(cfg: EngineConfig):
    spec = EmbedderSpec(dimension=cfg.dimension, backend=cfg.embedder_backend)
    if cfg.embedder_backend == "remote":
        return RemoteEmbedder(spec, cfg.embed_endpoint)
    return HashedBowEmbedder(spec)


def make_backend(cfg: EngineConfig):
    if cfg.text_backend == "remote":
        return RemoteBackend(cfg.llm_endpoint)
    return ExtractiveMockBackend()


def make_store(cfg: EngineConfig) -> MemoryStore:
    return MemoryStore(cfg.dimension)

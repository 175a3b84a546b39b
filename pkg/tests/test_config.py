from __future__ import annotations

import pytest

from recallkit.backends import ExtractiveMockBackend, RemoteBackend
from recallkit.config import (
    EngineConfig,
    load_config,
    make_backend,
    make_embedder,
    make_store,
)
from recallkit.embedding import HashedBowEmbedder, RemoteEmbedder
from recallkit.errors import IoFailureError
from recallkit.store import MemoryStore


class TestEngineConfig:
    def test_defaults(self):
        cfg = EngineConfig()
        assert cfg.capacity_chars == 75
        assert cfg.flush_threshold_chars == 300
        assert cfg.dimension == 384
        assert cfg.k == 10
        assert cfg.token_budget == 4096
        assert cfg.embedder_backend == "deterministic_local"
        assert cfg.text_backend == "extractive_mock"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"capacity_chars": 0},
            {"flush_threshold_chars": 0},
            {"embedder_backend": "other"},
            {"text_backend": "other"},
            {"embedder_backend": "remote"},
            {"text_backend": "remote"},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            EngineConfig(**kwargs)

    def test_remote_backends_need_endpoints(self):
        cfg = EngineConfig(
            embedder_backend="remote",
            embed_endpoint="http://localhost:1/e",
            text_backend="remote",
            llm_endpoint="http://localhost:1/g",
        )
        assert cfg.embed_endpoint is not None

    def test_retrieval_projection(self):
        cfg = EngineConfig(k=3, token_budget=64, tokenizer="whitespace_words")
        retrieval = cfg.retrieval
        assert (retrieval.k, retrieval.token_budget, retrieval.tokenizer) == (
            3,
            64,
            "whitespace_words",
        )


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text(
            "capacity_chars: 50\nk: 5\ntokenizer: whitespace_words\n", "utf-8"
        )
        cfg = load_config(path)
        assert cfg.capacity_chars == 50
        assert cfg.k == 5
        assert cfg.tokenizer == "whitespace_words"
        assert cfg.flush_threshold_chars == 300

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("", "utf-8")
        assert load_config(path) == EngineConfig()

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("capacity_chars: 50\nmystery_knob: 1\n", "utf-8")
        with pytest.raises(ValueError, match="mystery_knob"):
            load_config(path)

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("- just\n- a\n- list\n", "utf-8")
        with pytest.raises(ValueError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailureError):
            load_config(tmp_path / "absent.yaml")


class TestFactories:
    def test_local_components(self):
        cfg = EngineConfig(dimension=64)
        embedder = make_embedder(cfg)
        assert isinstance(embedder, HashedBowEmbedder)
        assert embedder.spec.dimension == 64
        assert isinstance(make_backend(cfg), ExtractiveMockBackend)
        store = make_store(cfg)
        assert isinstance(store, MemoryStore)
        assert store.dimension == 64

    def test_remote_components(self):
        cfg = EngineConfig(
            embedder_backend="remote",
            embed_endpoint="http://localhost:1/e",
            text_backend="remote",
            llm_endpoint="http://localhost:1/g",
        )
        embedder = make_embedder(cfg)
        assert isinstance(embedder, RemoteEmbedder)
        assert embedder.endpoint == "http://localhost:1/e"
        backend = make_backend(cfg)
        assert isinstance(backend, RemoteBackend)
        assert backend.endpoint == "http://localhost:1/g"

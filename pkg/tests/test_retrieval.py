from __future__ import annotations

import pytest

from recallkit.backends import GenerationRequest, GenerationResult
from recallkit.errors import EmptyQueryError
from recallkit.retrieval import (
    answer_query,
    compress_answer,
    embedding_input,
    is_dont_know,
)
from recallkit.store import MemoryStore, RetrievalConfig, assemble_relevant


class FixedBackend:
    """Backend stub that answers every generation with one fixed string."""

    name = "fixed"

    def __init__(self, text: str):
        self.text = text
        self.prompts: list[str] = []

    def generate(self, req: GenerationRequest) -> GenerationResult:
        self.prompts.append(req.prompt)
        return GenerationResult(text=self.text, latency_ms=1, backend_used=self.name)


def seeded_store(embedder) -> MemoryStore:
    from recallkit.store import MemoryBlock

    store = MemoryStore(embedder.spec.dimension)
    texts = [
        "Emily practices violin every morning before school.",
        "Ethan plays soccer at the Montessori field on Fridays.",
        "The family hiked the Barton Creek Greenbelt in March.",
    ]
    store.insert_many(
        [
            MemoryBlock(
                id=f"seed-{i}",
                text=t,
                embedding=embedder.embed(t),
                start_timestamp=1000 * (i + 1),
                session_id="seed",
            )
            for i, t in enumerate(texts)
        ]
    )
    return store


class TestIsDontKnow:
    @pytest.mark.parametrize(
        "answer",
        [
            "Unknown",
            "unknown",
            "UNKNOWN",
            "Unknown to me",
            "I don't know the answer.",
            "Sorry, I do not know that.",
        ],
    )
    def test_declines(self, answer):
        assert is_dont_know(answer)

    @pytest.mark.parametrize(
        "answer",
        [
            "The answer is unknown territory",
            "Unknowable things",
            "He knows the answer",
            "42",
            "",
        ],
    )
    def test_attempts(self, answer):
        assert not is_dont_know(answer)


class TestEmbeddingInput:
    def test_query_comes_first(self):
        assert embedding_input("who", "the context") == "who the context"

    def test_empty_context_contributes_nothing(self):
        assert embedding_input("who", "") == "who"


class TestCompressAnswer:
    def test_shortens_via_backend(self):
        backend = FixedBackend("short")
        out = compress_answer("q", "c", "a much longer raw answer", backend)
        assert out == "short"

    def test_falls_back_when_longer(self):
        backend = FixedBackend("this text is far longer than the raw answer was")
        out = compress_answer("q", "c", "raw answer", backend)
        assert out == "raw answer"

    def test_falls_back_when_empty(self):
        backend = FixedBackend("   ")
        out = compress_answer("q", "c", "raw answer", backend)
        assert out == "raw answer"

    def test_binds_the_concise_template(self):
        backend = FixedBackend("x")
        compress_answer("the query", "the context", "the answer", backend)
        prompt = backend.prompts[0]
        assert prompt.startswith("Make the answer more concise")
        assert "Query: the query\n" in prompt
        assert "Answer: the answer\n" in prompt


class TestAnswerQuery:
    def test_empty_query_rejected(self, embedder, backend):
        store = MemoryStore(embedder.spec.dimension)
        with pytest.raises(EmptyQueryError):
            answer_query("   ", "", store, embedder, backend)

    def test_empty_store_answers_unknown(self, embedder, backend):
        store = MemoryStore(embedder.spec.dimension)
        trace = answer_query("where is the violin", "", store, embedder, backend)
        assert trace.hit_ids == ()
        assert trace.assembled_memories == ""
        assert trace.raw_answer == "Unknown"
        assert trace.category_hint == "dont_know"

    def test_trace_invariants(self, embedder, backend):
        store = seeded_store(embedder)
        trace = answer_query(
            "when does Emily practice violin",
            "we were talking about morning routines",
            store,
            embedder,
            backend,
        )
        assert set(trace.hit_ids) <= {b.id for b in store.blocks()}
        sims = list(trace.hit_similarities)
        assert sims == sorted(sims, reverse=True)
        assert len(trace.hit_ids) == len(sims) == len(store)
        assert trace.assembled_memories in trace.prompt
        assert trace.query in trace.prompt
        assert len(trace.concise_answer) <= len(trace.raw_answer)
        assert trace.category_hint == "answered"
        assert not trace.query_inferred
        assert trace.generation_latency_ms >= 1

    def test_assembly_matches_search(self, embedder, backend):
        store = seeded_store(embedder)
        cfg = RetrievalConfig(k=2)
        trace = answer_query("violin practice", "", store, embedder, backend, cfg)
        hits = store.search(embedder.embed("violin practice"), cfg)
        assert trace.hit_ids == tuple(h.id for h in hits)
        assert trace.assembled_memories == assemble_relevant(hits, cfg)

    def test_answers_from_memory(self, embedder, backend):
        store = seeded_store(embedder)
        trace = answer_query("when does Emily practice violin", "", store, embedder, backend)
        assert trace.raw_answer == "Emily practices violin every morning before school."

    def test_concise_false_skips_second_pass(self, embedder, backend):
        store = seeded_store(embedder)
        trace = answer_query(
            "when does Emily practice violin", "", store, embedder, backend, concise=False
        )
        assert trace.concise_answer == trace.raw_answer

    def test_concise_never_longer_even_with_bad_backend(self, embedder):
        # A backend that pads its second answer cannot make concise longer.
        class PaddingBackend:
            name = "padding"

            def __init__(self):
                self.calls = 0

            def generate(self, req: GenerationRequest) -> GenerationResult:
                self.calls += 1
                text = "base" if self.calls == 1 else "much longer than base ever was"
                return GenerationResult(text=text, latency_ms=1, backend_used=self.name)

        store = seeded_store(embedder)
        trace = answer_query("anything at all", "", store, embedder, PaddingBackend())
        assert trace.raw_answer == "base"
        assert trace.concise_answer == "base"

    def test_context_normalized_in_trace(self, embedder, backend):
        store = seeded_store(embedder)
        trace = answer_query("violin", "  spaced   context  ", store, embedder, backend)
        assert trace.context_snapshot == "spaced context"

    def test_query_inferred_flag_recorded(self, embedder, backend):
        store = seeded_store(embedder)
        trace = answer_query(
            "violin", "", store, embedder, backend, query_inferred=True
        )
        assert trace.query_inferred

"""Answering pipeline: embed, retrieve, assemble, prompt, generate, compress.

The embedding input is always `query + " " + context` with the query first;
an empty context contributes nothing. Conciseness is a second generation pass
over the raw answer; it mechanically falls back to the raw answer whenever
the pass produces something longer or empty, so a concise answer is never
longer than its raw counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .backends import GenerationRequest, GenerationResult
from .embedding import Embedder
from .errors import EmptyQueryError
from .prompts import build_prompt, load_template
from .store import MemoryStore, RetrievalConfig, assemble_relevant
from .textnorm import normalize_ws

# Raw answers matching any of these (see is_dont_know) count as "don't know".
DONT_KNOW_PATTERNS: tuple[str, ...] = ("unknown", "i do not know", "i don't know")


class TextBackend(Protocol):
    name: str

    def generate(self, req: GenerationRequest) -> GenerationResult: ...


@dataclass(frozen=True)
class AnswerTrace:
    """Everything observable about one answer pipeline run."""

    query: str
    context_snapshot: str
    hit_ids: tuple[str, ...]
    hit_similarities: tuple[float, ...]
    assembled_memories: str
    prompt: str
    raw_answer: str
    concise_answer: str
    category_hint: str  # "answered" | "dont_know"
    query_inferred: bool = False
    generation_latency_ms: int = 0


def is_dont_know(answer: str) -> bool:
    """True when an answer is a decline rather than an attempt."""
    low = normalize_ws(answer).lower()
    if low == DONT_KNOW_PATTERNS[0] or low.startswith(f"{DONT_KNOW_PATTERNS[0]} "):
        return True
    return any(p in low for p in DONT_KNOW_PATTERNS[1:])


def embedding_input(query: str, context: str) -> str:
    return f"{query} {context}" if context else query


def compress_answer(query: str, context: str, raw_answer: str, backend: TextBackend) -> str:
    """Conciseness pass; falls back to the raw answer rather than degrade it."""
    prompt = build_prompt(
        load_template("concise_suggestion"),
        {"Current Context": context, "Query": query, "Retrieved Answer": raw_answer},
    )
    result = backend.generate(GenerationRequest(prompt=prompt))
    concise = result.text.strip()
    if not concise or len(concise) > len(raw_answer):
        return raw_answer
    return concise


def answer_query(
    query: str,
    context: str,
    store: MemoryStore,
    embedder: Embedder,
    backend: TextBackend,
    cfg: RetrievalConfig | None = None,
    *,
    concise: bool = True,
    query_inferred: bool = False,
) -> AnswerTrace:
    cfg = cfg or RetrievalConfig()
    query = normalize_ws(query)
    if not query:
        raise EmptyQueryError("query is empty after normalization")
    context = normalize_ws(context)

    query_vec = embedder.embed(embedding_input(query, context))
    hits = store.search(query_vec, cfg) if len(store) else []
    assembled = assemble_relevant(hits, cfg)

    prompt = build_prompt(
        load_template("contextual_query"),
        {"External Memories": assembled, "Current Context": context, "Query": query},
    )
    result = backend.generate(GenerationRequest(prompt=prompt))
    raw_answer = result.text.strip()

    concise_answer = (
        compress_answer(query, context, raw_answer, backend) if concise else raw_answer
    )
    return AnswerTrace(
        query=query,
        context_snapshot=context,
        hit_ids=tuple(h.id for h in hits),
        hit_similarities=tuple(h.similarity for h in hits),
        assembled_memories=assembled,
        prompt=prompt,
        raw_answer=raw_answer,
        concise_answer=concise_answer,
        category_hint="dont_know" if is_dont_know(raw_answer) else "answered",
        query_inferred=query_inferred,
        generation_latency_ms=result.latency_ms,
    )

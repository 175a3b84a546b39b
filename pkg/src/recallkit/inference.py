"""Queryless operation: infer the question the user is about to need answered.

The inferred query is built from the tail of the current conversation window
and then runs through the ordinary answering pipeline with the conciseness
pass on. Inference output is normalized to end with a question mark.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import GenerationRequest
from .embedding import Embedder
from .errors import EmptyContextError
from .prompts import build_prompt, load_template
from .retrieval import AnswerTrace, TextBackend, answer_query
from .store import MemoryStore, RetrievalConfig
from .textnorm import normalize_ws


@dataclass(frozen=True)
class InferredQuery:
    text: str
    source_context: str


def infer_query(context: str, backend: TextBackend) -> InferredQuery:
    context = normalize_ws(context)
    if not context:
        raise EmptyContextError("cannot infer a query from an empty context")
    prompt = build_prompt(load_template("queryless_inference"), {"Current Context": context})
    result = backend.generate(GenerationRequest(prompt=prompt))
    text = normalize_ws(result.text)
    if not text.endswith("?"):
        text = f"{text}?"
    return InferredQuery(text=text, source_context=context)


def queryless_answer(
    context: str,
    store: MemoryStore,
    embedder: Embedder,
    backend: TextBackend,
    cfg: RetrievalConfig | None = None,
) -> AnswerTrace:
    inferred = infer_query(context, backend)
    return answer_query(
        inferred.text,
        context,
        store,
        embedder,
        backend,
        cfg,
        concise=True,
        query_inferred=True,
    )

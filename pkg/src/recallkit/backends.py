"""Text generation backends behind one protocol.

The extractive mock understands the three prompt shapes this package builds
and answers them deterministically with no model and no network:

* contextual answer prompts: return the memories sentence with the highest
  content-token overlap against the query (weight 2) and the current context
  (weight 1); "Unknown" when nothing overlaps at all.
* concise prompts: drop answer words that are stop words or already present
  in the context or query; if nothing survives, pass the answer through.
* query inference prompts: build a templated wh-question from the trailing
  clause of the conversation via a small rule table.

Every non-"Unknown" token the mock emits for an answer prompt occurs in the
relevant-memories section; it never invents content.
"""

from __future__ import annotations

import math
import os
import string
import time
from dataclasses import dataclass

from .errors import MalformedPromptError, PromptTooLargeError, RemoteUnavailableError
from .textnorm import (
    content_tokens,
    normalize_ws,
    split_sentences,
    stopwords,
    tokenize,
)

MOCK_MAX_PROMPT_CHARS: int = 100_000

_CONTEXTUAL_HEAD = "You are a helpful assistant that provides memory cues"
_CONCISE_HEAD = "Make the answer more concise"
_QUERYLESS_HEAD = "You are an assistant interface between user and a memory system"

UNKNOWN_ANSWER = "Unknown"


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 256
    backend: str = "extractive_mock"  # or "remote"

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")


@dataclass(frozen=True)
class GenerationResult:
    text: str
    latency_ms: int
    backend_used: str


def _section(prompt: str, start: str, end: str) -> str:
    i = prompt.find(start)
    if i == -1:
        raise MalformedPromptError(f"missing prompt header: {start.strip()!r}")
    i += len(start)
    j = prompt.find(end, i)
    if j == -1:
        raise MalformedPromptError(f"missing prompt header: {end.strip()!r}")
    return prompt[i:j]


def extract_answer(memories: str, context: str, query: str) -> str:
    """Best-overlap sentence from the memories, or "Unknown"."""
    sentences: list[str] = []
    for line in memories.split("\n"):
        sentences.extend(split_sentences(line))
    query_toks = set(content_tokens(query))
    context_toks = set(content_tokens(context))
    best_sentence = ""
    best_score = 0
    for sentence in sentences:
        toks = set(content_tokens(sentence))
        score = 2 * len(toks & query_toks) + len(toks & context_toks)
        if score > best_score:
            best_sentence, best_score = sentence, score
    return best_sentence if best_score > 0 else UNKNOWN_ANSWER


def compress_tokens(answer: str, context: str, query: str) -> str:
    """Keep only answer words that add information over the context and query."""
    stop = stopwords()
    drop = set(tokenize(context)) | set(tokenize(query))
    kept: list[str] = []
    for word in normalize_ws(answer).split():
        toks = tokenize(word)
        if any(len(t) > 1 and t not in stop and t not in drop for t in toks):
            kept.append(word.strip(string.punctuation))
    compressed = " ".join(w for w in kept if w)
    return compressed if compressed else normalize_ws(answer)


_NAMING_MARKERS = ("called", "named")


def infer_question(conversation: str) -> str:
    """Deterministic wh-question for the trailing clause of the conversation."""
    ctx = normalize_ws(conversation)
    clause = ""
    for part in reversed([p.strip() for p in _split_clauses(ctx)]):
        if part:
            clause = part
            break
    if not clause:
        clause = ctx
    toks = tokenize(clause)
    content = content_tokens(clause)
    if toks and toks[-1] in _NAMING_MARKERS:
        head = content[:-1] if content and content[-1] == toks[-1] else content
        tail = " ".join(head[-4:]) if head else "it"
        return f"What is {tail} {toks[-1]}?"
    incomplete = bool(toks) and (toks[-1] in stopwords() or clause.endswith(","))
    tail = " ".join(content[-4:]) if content else "that"
    if incomplete:
        return f"What comes after {tail}?"
    return f"What about {tail}?"


def _split_clauses(text: str) -> list[str]:
    out: list[str] = []
    buf: list[str] = []
    for ch in text:
        if ch in ".!?":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    out.append("".join(buf))
    return out


class ExtractiveMockBackend:
    """Offline deterministic backend; recognizes the package's prompt shapes."""

    name = "extractive_mock"

    def generate(self, req: GenerationRequest) -> GenerationResult:
        start_ns = time.perf_counter_ns()
        prompt = req.prompt
        if len(prompt) > MOCK_MAX_PROMPT_CHARS:
            raise PromptTooLargeError(
                f"prompt has {len(prompt)} chars, mock limit is {MOCK_MAX_PROMPT_CHARS}"
            )
        if prompt.startswith(_CONTEXTUAL_HEAD):
            memories = _section(prompt, "Relevant memories: ", "\nThe current context contains")
            context = _section(prompt, "Current context: ", "\nThe query is the question")
            query = _section(prompt, "Query: ", "\nAnswer:")
            text = extract_answer(memories, context, query)
        elif prompt.startswith(_CONCISE_HEAD):
            context = _section(prompt, "Current context: ", "\nQuery: ")
            query = _section(prompt, "Query: ", "\nAnswer: ")
            answer = _section(prompt, "Answer: ", "\nConcise answer:")
            text = compress_tokens(answer, context, query)
        elif prompt.startswith(_QUERYLESS_HEAD):
            conversation = _section(prompt, "Recent conversation: ", "\nWhat do you think")
            text = infer_question(conversation)
        else:
            raise MalformedPromptError("prompt matches no known template head")
        latency_ms = max(1, math.ceil((time.perf_counter_ns() - start_ns) / 1_000_000))
        return GenerationResult(text=text, latency_ms=latency_ms, backend_used=self.name)


class RemoteBackend:
    """Client for an HTTP completion endpoint: POST {"prompt", ...} -> {"text"}."""

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        *,
        timeout_s: float = 30.0,
        max_prompt_chars: int = 48_000,
        token_env: str = "RECALLKIT_LLM_TOKEN",
    ):
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.max_prompt_chars = max_prompt_chars
        self.token_env = token_env

    def generate(self, req: GenerationRequest) -> GenerationResult:
        import httpx

        if len(req.prompt) > self.max_prompt_chars:
            raise PromptTooLargeError(
                f"prompt has {len(req.prompt)} chars, limit is {self.max_prompt_chars}"
            )
        headers = {}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        start_ns = time.perf_counter_ns()
        try:
            resp = httpx.post(
                self.endpoint,
                json={
                    "prompt": req.prompt,
                    "temperature": req.temperature,
                    "max_tokens": req.max_output_tokens,
                },
                headers=headers,
                timeout=self.timeout_s,
            )
        except httpx.TimeoutException as exc:
            raise RemoteUnavailableError(f"completion endpoint timed out: {exc}", retryable=True)
        except httpx.HTTPError as exc:
            raise RemoteUnavailableError(f"completion endpoint unreachable: {exc}", retryable=True)
        if resp.status_code >= 500:
            raise RemoteUnavailableError(
                f"completion endpoint returned {resp.status_code}", retryable=True
            )
        if resp.status_code != 200:
            raise RemoteUnavailableError(
                f"completion endpoint returned {resp.status_code}", retryable=False
            )
        text = resp.json().get("text")
        if not isinstance(text, str):
            raise RemoteUnavailableError("completion endpoint returned no text", retryable=False)
        latency_ms = max(1, math.ceil((time.perf_counter_ns() - start_ns) / 1_000_000))
        return GenerationResult(text=text.strip(), latency_ms=latency_ms, backend_used=self.name)


def generate(req: GenerationRequest) -> GenerationResult:
    """One-shot generation for the offline backend named in the request."""
    if req.backend != "extractive_mock":
        raise ValueError("generate() only serves extractive_mock; build a RemoteBackend instead")
    return ExtractiveMockBackend().generate(req)

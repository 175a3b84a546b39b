"""Corpus replay: deterministic end-to-end evaluation on the bundled personas.

Each case replays the full pipeline from scratch: persona transcript ingested
into a fresh store in one session, then a second live session primes the
context window and fires one trigger per mode. A virtual clock drives all
timing, so two runs of the same corpus produce byte-identical reports.

Labels follow a closed set: Correct (an answer key appears in the response),
DontKnow (the model declined), Incorrect (everything else), and
TranscriptionError (only ever assigned from case metadata, never inferred).
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .backends import ExtractiveMockBackend
from .embedding import HashedBowEmbedder
from .errors import InvalidCaseError, MissingAssetError
from .ingest import events_from_text
from .retrieval import answer_query, is_dont_know
from .session import MODES, Session, TickingBackend, VirtualClock
from .store import MemoryBlock, MemoryStore, RetrievalConfig
from .textnorm import normalize_match

LABELS = ("Correct", "DontKnow", "Incorrect", "TranscriptionError")

DEFAULT_TICK_MS: int = 5
DEFAULT_QUERY_MS_PER_CHAR: int = 50


@dataclass(frozen=True)
class CorpusCase:
    """One question about one persona, with per-mode trigger contexts."""

    id: str
    persona: str
    kind: str  # "general" | "specific"
    question: str
    answer_keys: tuple[str, ...]
    query_context: str
    queryless_context: str
    transcription_error: bool = False


@dataclass(frozen=True)
class Corpus:
    personas: dict[str, str]
    cases: tuple[CorpusCase, ...]


def _corpus_root() -> Path:
    root = resources.files("recallkit") / "corpus"
    return Path(str(root))


def load_corpus(root: str | Path | None = None) -> Corpus:
    """Load and validate the case file plus every persona transcript.

    Every answer key must appear verbatim (punctuation-insensitive) in its
    persona's transcript; a key that cannot be recovered from memory would
    make the case unwinnable by construction.
    """
    base = Path(root) if root is not None else _corpus_root()
    case_path = base / "cases.json"
    if not case_path.is_file():
        raise MissingAssetError(f"corpus case file not found: {case_path}")
    try:
        doc = json.loads(case_path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidCaseError(f"cannot parse {case_path}: {exc}") from exc

    personas: dict[str, str] = {}
    for name, rel in doc.get("personas", {}).items():
        path = base / rel
        if not path.is_file():
            raise MissingAssetError(f"persona transcript not found: {path}")
        text = path.read_text("utf-8").strip()
        if not text:
            raise InvalidCaseError(f"persona transcript is empty: {path}")
        personas[name] = text
    if not personas:
        raise InvalidCaseError("corpus declares no personas")

    cases: list[CorpusCase] = []
    seen: set[str] = set()
    for raw in doc.get("cases", []):
        try:
            case = CorpusCase(
                id=raw["id"],
                persona=raw["persona"],
                kind=raw["kind"],
                question=raw["question"],
                answer_keys=tuple(raw["answer_keys"]),
                query_context=raw["contexts"]["query"],
                queryless_context=raw["contexts"]["queryless"],
                transcription_error=bool(raw.get("transcription_error", False)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidCaseError(f"malformed case record: {exc}") from exc
        if case.id in seen:
            raise InvalidCaseError(f"duplicate case id: {case.id}")
        seen.add(case.id)
        if case.kind not in ("general", "specific"):
            raise InvalidCaseError(f"case {case.id}: unknown kind {case.kind!r}")
        if case.persona not in personas:
            raise InvalidCaseError(f"case {case.id}: unknown persona {case.persona!r}")
        if not case.answer_keys:
            raise InvalidCaseError(f"case {case.id}: no answer keys")
        haystack = normalize_match(personas[case.persona])
        for key in case.answer_keys:
            if not key.strip():
                raise InvalidCaseError(f"case {case.id}: blank answer key")
            if normalize_match(key) not in haystack:
                raise InvalidCaseError(
                    f"case {case.id}: key {key!r} never occurs in persona transcript"
                )
        cases.append(case)
    if not cases:
        raise InvalidCaseError("corpus declares no cases")
    return Corpus(personas=personas, cases=tuple(cases))


def label_response(
    answer: str,
    answer_keys: tuple[str, ...] | list[str],
    *,
    transcription_error: bool = False,
) -> str:
    """Assign one closed-set label to a response."""
    if transcription_error:
        return "TranscriptionError"
    normalized = normalize_match(answer)
    if any(normalize_match(key) in normalized for key in answer_keys):
        return "Correct"
    if is_dont_know(answer):
        return "DontKnow"
    return "Incorrect"


@dataclass(frozen=True)
class CaseResult:
    """Outcome of one case replayed in one trigger mode."""

    case_id: str
    persona: str
    kind: str
    mode: str
    question: str
    answer: str
    label: str
    response_chars: int
    query_time_ms: int | None
    process_time_ms: int
    hit_ids: tuple[str, ...]
    memory_hit: bool

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "persona": self.persona,
            "kind": self.kind,
            "mode": self.mode,
            "question": self.question,
            "answer": self.answer,
            "label": self.label,
            "response_chars": self.response_chars,
            "query_time_ms": self.query_time_ms,
            "process_time_ms": self.process_time_ms,
            "hit_ids": list(self.hit_ids),
            "memory_hit": self.memory_hit,
        }


def _ingest_persona(
    persona: str,
    text: str,
    store: MemoryStore,
    embedder: HashedBowEmbedder,
    backend,
) -> None:
    memory = Session(f"mem-{persona}", store=store, embedder=embedder, backend=backend)
    for event in events_from_text(text):
        memory.ingest(event)
    memory.close()


def _memory_hit(store: MemoryStore, hit_ids: tuple[str, ...], keys: tuple[str, ...]) -> bool:
    for bid in hit_ids:
        block = store.get(bid)
        if block is None:
            continue
        hay = normalize_match(block.text)
        if any(normalize_match(k) in hay for k in keys):
            return True
    return False


def replay_case(
    case: CorpusCase,
    persona_text: str,
    mode: str,
    *,
    tick_ms: int = DEFAULT_TICK_MS,
    query_ms_per_char: int = DEFAULT_QUERY_MS_PER_CHAR,
    retrieval: RetrievalConfig | None = None,
) -> CaseResult:
    """Replay one case in one mode against a freshly built store."""
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode}")
    embedder = HashedBowEmbedder()
    store = MemoryStore(embedder.spec.dimension)
    clock = VirtualClock()
    backend = TickingBackend(ExtractiveMockBackend(), clock, tick_ms=tick_ms)
    _ingest_persona(case.persona, persona_text, store, embedder, backend)

    live = Session(
        f"live-{case.id}-{mode}",
        store=store,
        embedder=embedder,
        backend=backend,
        retrieval=retrieval or RetrievalConfig(),
        clock=clock,
    )
    if mode == "baseline":
        record = live.trigger(
            "baseline", case.question, query_time_ms=query_ms_per_char * len(case.question)
        )
        question = case.question
    elif mode == "query":
        live.prime_context(case.query_context)
        record = live.trigger(
            "query", case.question, query_time_ms=query_ms_per_char * len(case.question)
        )
        question = case.question
    else:
        live.prime_context(case.queryless_context)
        record = live.trigger("queryless")
        question = record.inferred_query or ""

    answer = record.concise_answer
    return CaseResult(
        case_id=case.id,
        persona=case.persona,
        kind=case.kind,
        mode=mode,
        question=question,
        answer=answer,
        label=label_response(
            answer, case.answer_keys, transcription_error=case.transcription_error
        ),
        response_chars=record.response_chars,
        query_time_ms=record.query_time_ms,
        process_time_ms=record.process_time_ms,
        hit_ids=record.hit_ids,
        memory_hit=_memory_hit(store, record.hit_ids, case.answer_keys),
    )


@dataclass(frozen=True)
class ModeSummary:
    mode: str
    interactions: int
    response_chars_mean: float
    response_chars_sd: float
    query_time_s_mean: float | None
    query_time_s_sd: float | None
    process_time_s_mean: float
    process_time_s_sd: float
    labels: dict[str, int]
    label_pct: dict[str, float]
    hit_rate: float
    hit_rate_specific: float
    hit_rate_general: float


@dataclass(frozen=True)
class MetricsReport:
    cases: int
    modes: tuple[str, ...]
    summaries: dict[str, ModeSummary]
    results: tuple[CaseResult, ...]

    def to_dict(self) -> dict:
        return {
            "cases": self.cases,
            "modes": list(self.modes),
            "summaries": {
                mode: {
                    "interactions": s.interactions,
                    "response_chars": {
                        "mean": s.response_chars_mean,
                        "sd": s.response_chars_sd,
                    },
                    "query_time_s": (
                        None
                        if s.query_time_s_mean is None
                        else {"mean": s.query_time_s_mean, "sd": s.query_time_s_sd}
                    ),
                    "process_time_s": {
                        "mean": s.process_time_s_mean,
                        "sd": s.process_time_s_sd,
                    },
                    "labels": dict(s.labels),
                    "label_pct": dict(s.label_pct),
                    "hit_rate": s.hit_rate,
                    "hit_rate_specific": s.hit_rate_specific,
                    "hit_rate_general": s.hit_rate_general,
                }
                for mode, s in self.summaries.items()
            },
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render_table(self) -> str:
        lines: list[str] = []
        lines.append("Interaction cost by trigger mode")
        lines.append("-" * 70)
        header = f"{'mode':<10} {'n':>3}  {'response chars':>18}  {'query time (s)':>16}  {'process time (s)':>18}"
        lines.append(header)
        for mode in self.modes:
            s = self.summaries[mode]
            chars = f"{s.response_chars_mean:.1f} +/- {s.response_chars_sd:.1f}"
            if s.query_time_s_mean is None:
                qt = "-"
            else:
                qt = f"{s.query_time_s_mean:.2f} +/- {s.query_time_s_sd:.2f}"
            pt = f"{s.process_time_s_mean:.3f} +/- {s.process_time_s_sd:.3f}"
            lines.append(f"{mode:<10} {s.interactions:>3}  {chars:>18}  {qt:>16}  {pt:>18}")
        lines.append("")
        lines.append("Answer quality by trigger mode")
        lines.append("-" * 70)
        lines.append(
            f"{'mode':<10} " + " ".join(f"{label:>18}" for label in LABELS) + f" {'accuracy':>9}"
        )
        for mode in self.modes:
            s = self.summaries[mode]
            cells = " ".join(
                f"{s.labels.get(label, 0)} ({s.label_pct.get(label, 0.0):.1f}%)".rjust(18)
                for label in LABELS
            )
            lines.append(f"{mode:<10} {cells} {s.label_pct.get('Correct', 0.0):>8.1f}%")
        lines.append("")
        lines.append("Retrieval hit rate (any answer-bearing block in top-k):")
        for mode in self.modes:
            s = self.summaries[mode]
            lines.append(
                f"  {mode:<10} overall {s.hit_rate:.3f}  "
                f"specific {s.hit_rate_specific:.3f}  general {s.hit_rate_general:.3f}"
            )
        lines.append("")
        lines.append("Notes:")
        lines.append("  query time is simulated speaking time; queryless voices no query.")
        lines.append(
            "  TranscriptionError counts come from case metadata; the bundled corpus has none."
        )
        return "\n".join(lines) + "\n"


def _mean_sd(values: list[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    mean = statistics.fmean(values)
    sd = statistics.pstdev(values) if len(values) > 1 else 0.0
    return round(mean, 4), round(sd, 4)


def _rate(flags: list[bool]) -> float:
    return round(sum(flags) / len(flags), 4) if flags else 0.0


def summarize(results: list[CaseResult], modes: tuple[str, ...]) -> dict[str, ModeSummary]:
    summaries: dict[str, ModeSummary] = {}
    for mode in modes:
        rows = [r for r in results if r.mode == mode]
        chars_mean, chars_sd = _mean_sd([float(r.response_chars) for r in rows])
        qt = [r.query_time_ms / 1000.0 for r in rows if r.query_time_ms is not None]
        if qt:
            qt_mean, qt_sd = _mean_sd(qt)
        else:
            qt_mean = qt_sd = None
        pt_mean, pt_sd = _mean_sd([r.process_time_ms / 1000.0 for r in rows])
        labels = {label: sum(1 for r in rows if r.label == label) for label in LABELS}
        total = len(rows)
        label_pct = {
            label: round(100.0 * count / total, 1) if total else 0.0
            for label, count in labels.items()
        }
        summaries[mode] = ModeSummary(
            mode=mode,
            interactions=total,
            response_chars_mean=chars_mean,
            response_chars_sd=chars_sd,
            query_time_s_mean=qt_mean,
            query_time_s_sd=qt_sd,
            process_time_s_mean=pt_mean,
            process_time_s_sd=pt_sd,
            labels=labels,
            label_pct=label_pct,
            hit_rate=_rate([r.memory_hit for r in rows]),
            hit_rate_specific=_rate([r.memory_hit for r in rows if r.kind == "specific"]),
            hit_rate_general=_rate([r.memory_hit for r in rows if r.kind == "general"]),
        )
    return summaries


def replay_corpus(
    corpus: Corpus | None = None,
    *,
    modes: tuple[str, ...] = MODES,
    tick_ms: int = DEFAULT_TICK_MS,
    query_ms_per_char: int = DEFAULT_QUERY_MS_PER_CHAR,
    retrieval: RetrievalConfig | None = None,
) -> MetricsReport:
    """Replay every case in every requested mode; deterministic end to end."""
    corpus = corpus or load_corpus()
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode}")
    results: list[CaseResult] = []
    for mode in modes:
        for case in corpus.cases:
            results.append(
                replay_case(
                    case,
                    corpus.personas[case.persona],
                    mode,
                    tick_ms=tick_ms,
                    query_ms_per_char=query_ms_per_char,
                    retrieval=retrieval,
                )
            )
    return MetricsReport(
        cases=len(corpus.cases),
        modes=tuple(modes),
        summaries=summarize(results, tuple(modes)),
        results=tuple(results),
    )


def bench_store(
    *,
    n_blocks: int = 10_000,
    n_queries: int = 50,
    seed: int = 7,
    retrieval: RetrievalConfig | None = None,
) -> dict:
    """Wall-clock answer latency against a synthetic store of random vectors."""
    rng = np.random.default_rng(seed)
    embedder = HashedBowEmbedder()
    dim = embedder.spec.dimension
    vecs = rng.standard_normal((n_blocks, dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    store = MemoryStore(dim)
    store.insert_many(
        [
            MemoryBlock(
                id=f"bench-{i:06d}",
                text=f"synthetic memory block {i} about topic {i % 17}",
                embedding=vecs[i],
                start_timestamp=i,
                session_id="bench",
            )
            for i in range(n_blocks)
        ]
    )
    backend = ExtractiveMockBackend()
    cfg = retrieval or RetrievalConfig()
    samples_ms: list[float] = []
    for i in range(n_queries):
        query = f"what happened with topic {i % 17}"
        context = f"we were just talking about topic {i % 17}"
        t0 = time.perf_counter_ns()
        answer_query(query, context, store, embedder, backend, cfg, concise=True)
        samples_ms.append((time.perf_counter_ns() - t0) / 1e6)
    arr = np.asarray(samples_ms)
    return {
        "blocks": n_blocks,
        "queries": n_queries,
        "k": cfg.k,
        "mean_ms": round(float(arr.mean()), 3),
        "p50_ms": round(float(np.percentile(arr, 50)), 3),
        "p95_ms": round(float(np.percentile(arr, 95)), 3),
        "max_ms": round(float(arr.max()), 3),
    }

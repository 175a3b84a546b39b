"""Session lifecycle: live ingestion, trigger handling, interaction records.

A session owns one context buffer, one chunk stager, and a handle to the
long-term store. Trigger handling snapshots the context atomically, runs the
mode's pipeline, and appends an interaction record whether the run succeeded
or failed. Records are append-only and can be mirrored to a line-delimited
log file that survives restarts.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol

from .embedding import Embedder
from .errors import (
    CorruptRecordError,
    IoFailureError,
    ModeArgMismatchError,
    RecallError,
    SessionClosedError,
)
from .ingest import (
    DEFAULT_CAPACITY_CHARS,
    DEFAULT_FLUSH_THRESHOLD_CHARS,
    ChunkStager,
    ContextBuffer,
    TranscriptEvent,
)
from .inference import queryless_answer
from .retrieval import AnswerTrace, TextBackend, answer_query
from .store import MemoryBlock, MemoryStore, RetrievalConfig
from .textnorm import normalize_ws

MODES = ("baseline", "query", "queryless")


class Clock(Protocol):
    def now_ms(self) -> int: ...


class RealClock:
    """Wall-anchored monotonic clock in integer milliseconds."""

    def __init__(self):
        self._epoch_wall_ns = time.time_ns()
        self._epoch_perf_ns = time.perf_counter_ns()

    def now_ms(self) -> int:
        elapsed = time.perf_counter_ns() - self._epoch_perf_ns
        return (self._epoch_wall_ns + elapsed) // 1_000_000


class VirtualClock:
    """Deterministic clock for replays; time moves only when told to."""

    def __init__(self, start_ms: int = 0):
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def advance(self, ms: int) -> None:
        self._now_ms += ms


class TickingBackend:
    """Backend wrapper that advances a virtual clock on every generation."""

    def __init__(self, inner: TextBackend, clock: VirtualClock, tick_ms: int = 5):
        self.inner = inner
        self.clock = clock
        self.tick_ms = tick_ms
        self.name = inner.name

    def generate(self, req):
        self.clock.advance(self.tick_ms)
        return self.inner.generate(req)


@dataclass(frozen=True)
class InteractionRecord:
    """One trigger, successful or failed, as the user experienced it."""

    interaction_id: str
    session_id: str
    mode: str
    voiced_query: str | None
    inferred_query: str | None
    context_snapshot: str
    hit_ids: tuple[str, ...]
    raw_answer: str
    concise_answer: str
    response_chars: int
    query_time_ms: int | None
    process_time_ms: int
    created_at: int
    status: str = "ok"  # "ok" | "error"
    error: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hit_ids"] = list(self.hit_ids)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionRecord":
        d = dict(d)
        d["hit_ids"] = tuple(d.get("hit_ids", ()))
        return cls(**d)


class InteractionLog:
    """Append-only line-delimited record log."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, record: InteractionRecord) -> None:
        try:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        except OSError as exc:
            raise IoFailureError(f"cannot append to log {self.path}: {exc}") from exc

    def load(self) -> list[InteractionRecord]:
        if not self.path.exists():
            return []
        try:
            raw = self.path.read_text("utf-8")
        except OSError as exc:
            raise IoFailureError(f"cannot read log {self.path}: {exc}") from exc
        records = []
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(InteractionRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorruptRecordError(lineno, str(exc)) from exc
        return records


class Session:
    """Single conversational session bound to a store and backends."""

    def __init__(
        self,
        session_id: str,
        *,
        store: MemoryStore,
        embedder: Embedder,
        backend: TextBackend,
        capacity_chars: int = DEFAULT_CAPACITY_CHARS,
        flush_threshold_chars: int = DEFAULT_FLUSH_THRESHOLD_CHARS,
        retrieval: RetrievalConfig | None = None,
        clock: Clock | None = None,
        log: InteractionLog | None = None,
    ):
        self.session_id = session_id
        self.store = store
        self.embedder = embedder
        self.backend = backend
        self.buffer = ContextBuffer(capacity_chars=capacity_chars)
        self.stager = ChunkStager(flush_threshold_chars=flush_threshold_chars)
        self.retrieval = retrieval or RetrievalConfig()
        self.clock = clock or RealClock()
        self.log = log
        self.closed = False
        self._records: list[InteractionRecord] = []
        self._last_hits: dict[str, float] = {}
        self._last_event_ms: int | None = None
        self._block_seq = 0
        self._interaction_seq = 0
        self._lock = threading.Lock()

    # -- ingestion ---------------------------------------------------------

    def ingest(self, event: TranscriptEvent, *, encode: bool = True) -> list[MemoryBlock]:
        """Feed one event through the window; returns blocks encoded this step.

        `encode=False` updates the context window but discards evictions,
        for speech that should stay out of long-term memory.
        """
        if self.closed:
            raise SessionClosedError(f"session {self.session_id} is closed")
        with self._lock:
            if self._last_event_ms is not None and event.timestamp_ms < self._last_event_ms:
                raise ValueError("event timestamps must be non-decreasing within a session")
            self._last_event_ms = event.timestamp_ms
            evicted = self.buffer.append(event.text)
            if not encode:
                return []
            self.stager.stage(evicted, event.timestamp_ms)
            block = self.stager.flush()
            return [self._encode_block(block)] if block else []

    def prime_context(self, text: str) -> None:
        """Replace the context window with the tail of `text`; nothing is encoded."""
        if self.closed:
            raise SessionClosedError(f"session {self.session_id} is closed")
        with self._lock:
            self.buffer.reset()
            norm = normalize_ws(text)
            if norm:
                self.buffer.append(norm)

    def close(self) -> list[MemoryBlock]:
        """Flush any pending staged text and seal the session."""
        if self.closed:
            return []
        with self._lock:
            block = self.stager.flush(force=True)
            inserted = [self._encode_block(block)] if block else []
            self.closed = True
            return inserted

    def _encode_block(self, staged) -> MemoryBlock:
        self._block_seq += 1
        block = MemoryBlock(
            id=f"{self.session_id}-b{self._block_seq:04d}",
            text=staged.text,
            embedding=self.embedder.embed(staged.text),
            start_timestamp=staged.timestamp_ms,
            session_id=self.session_id,
        )
        self.store.insert(block)
        return block

    # -- triggers ----------------------------------------------------------

    def trigger(
        self,
        mode: str,
        voiced_query: str | None = None,
        *,
        query_time_ms: int | None = None,
    ) -> InteractionRecord:
        if self.closed:
            raise SessionClosedError(f"session {self.session_id} is closed")
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode}")
        if mode in ("baseline", "query") and not (voiced_query and voiced_query.strip()):
            raise ModeArgMismatchError(f"{mode} mode requires a voiced query")
        if mode == "queryless" and voiced_query is not None:
            raise ModeArgMismatchError("queryless mode must not carry a voiced query")

        snapshot = self.buffer.snapshot()
        started_ms = self.clock.now_ms()
        try:
            if mode == "baseline":
                # Baseline deliberately ignores the context window and skips
                # the conciseness pass: explicit query in, raw answer out.
                trace = answer_query(
                    voiced_query, "", self.store, self.embedder, self.backend,
                    self.retrieval, concise=False,
                )
            elif mode == "query":
                trace = answer_query(
                    voiced_query, snapshot, self.store, self.embedder, self.backend,
                    self.retrieval, concise=True,
                )
            else:
                trace = queryless_answer(
                    snapshot, self.store, self.embedder, self.backend, self.retrieval
                )
        except RecallError as exc:
            ended_ms = self.clock.now_ms()
            record = self._make_record(
                mode=mode,
                voiced_query=voiced_query if mode != "queryless" else None,
                inferred_query=None,
                snapshot=snapshot,
                trace=None,
                query_time_ms=query_time_ms if mode != "queryless" else None,
                process_time_ms=max(1, ended_ms - started_ms),
                created_at=ended_ms,
                error=exc,
            )
            self._append_record(record)
            raise
        ended_ms = self.clock.now_ms()
        record = self._make_record(
            mode=mode,
            voiced_query=voiced_query if mode != "queryless" else None,
            inferred_query=trace.query if mode == "queryless" else None,
            snapshot=snapshot,
            trace=trace,
            query_time_ms=query_time_ms if mode != "queryless" else None,
            process_time_ms=max(1, ended_ms - started_ms),
            created_at=ended_ms,
            error=None,
        )
        self._append_record(record)
        self._last_hits = dict(zip(trace.hit_ids, trace.hit_similarities))
        return record

    def _make_record(
        self,
        *,
        mode: str,
        voiced_query: str | None,
        inferred_query: str | None,
        snapshot: str,
        trace: AnswerTrace | None,
        query_time_ms: int | None,
        process_time_ms: int,
        created_at: int,
        error: Exception | None,
    ) -> InteractionRecord:
        self._interaction_seq += 1
        return InteractionRecord(
            interaction_id=f"{self.session_id}-i{self._interaction_seq:04d}",
            session_id=self.session_id,
            mode=mode,
            voiced_query=voiced_query,
            inferred_query=inferred_query,
            context_snapshot=snapshot,
            hit_ids=trace.hit_ids if trace else (),
            raw_answer=trace.raw_answer if trace else "",
            concise_answer=trace.concise_answer if trace else "",
            response_chars=len(trace.concise_answer) if trace else 0,
            query_time_ms=query_time_ms,
            process_time_ms=process_time_ms,
            created_at=created_at,
            status="ok" if error is None else "error",
            error=None if error is None else type(error).__name__,
        )

    def _append_record(self, record: InteractionRecord) -> None:
        self._records.append(record)
        if self.log is not None:
            self.log.append(record)

    # -- inspection --------------------------------------------------------

    def list_interactions(self, mode: str | None = None) -> list[InteractionRecord]:
        """Records in creation order (newest last), optionally filtered by mode."""
        if mode is None:
            return list(self._records)
        return [r for r in self._records if r.mode == mode]

    def last_hit_similarities(self) -> dict[str, float]:
        return dict(self._last_hits)

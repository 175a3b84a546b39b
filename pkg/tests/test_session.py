from __future__ import annotations

import json

import pytest

from recallkit.backends import ExtractiveMockBackend, GenerationRequest
from recallkit.embedding import HashedBowEmbedder
from recallkit.errors import (
    CorruptRecordError,
    ModeArgMismatchError,
    PromptTooLargeError,
    SessionClosedError,
)
from recallkit.harness import load_corpus
from recallkit.ingest import TranscriptEvent, events_from_text
from recallkit.session import (
    MODES,
    InteractionLog,
    InteractionRecord,
    RealClock,
    Session,
    TickingBackend,
    VirtualClock,
)
from recallkit.store import MemoryStore


def fresh_session(session_id="s1", *, clock=None, log=None, backend=None, **kwargs) -> Session:
    embedder = HashedBowEmbedder()
    return Session(
        session_id,
        store=MemoryStore(embedder.spec.dimension),
        embedder=embedder,
        backend=backend or ExtractiveMockBackend(),
        clock=clock,
        log=log,
        **kwargs,
    )


def sample_record(i=1, **overrides) -> InteractionRecord:
    base = dict(
        interaction_id=f"s1-i{i:04d}",
        session_id="s1",
        mode="query",
        voiced_query="what was said",
        inferred_query=None,
        context_snapshot="recent words",
        hit_ids=("b1", "b2"),
        raw_answer="the full sentence",
        concise_answer="sentence",
        response_chars=8,
        query_time_ms=700,
        process_time_ms=10,
        created_at=123456,
    )
    base.update(overrides)
    return InteractionRecord(**base)


class TestClocks:
    def test_real_clock_is_monotonic(self):
        clock = RealClock()
        a = clock.now_ms()
        b = clock.now_ms()
        assert b >= a

    def test_virtual_clock_moves_only_on_advance(self):
        clock = VirtualClock(start_ms=100)
        assert clock.now_ms() == 100
        clock.advance(25)
        assert clock.now_ms() == 125

    def test_ticking_backend_advances_per_generation(self):
        clock = VirtualClock()
        backend = TickingBackend(ExtractiveMockBackend(), clock, tick_ms=5)
        assert backend.name == "extractive_mock"
        prompt = (
            "You are a helpful assistant that provides memory cues to a human.\n"
            "Relevant memories: The sky is blue.\n"
            "The current context contains the conversation between the two humans.\n"
            "Current context: \n"
            "The query is the question asked by the human to you.\n"
            "Query: what color is the sky\n"
            "Answer:"
        )
        backend.generate(GenerationRequest(prompt=prompt))
        backend.generate(GenerationRequest(prompt=prompt))
        assert clock.now_ms() == 10


class TestIngestion:
    def test_william_persona_block_goldens(self):
        # Pinned end-to-end chunking of the bundled william transcript.
        corpus = load_corpus()
        session = fresh_session("mem-william")
        events = events_from_text(corpus.personas["william"])
        assert len(events) == 17
        for event in events:
            session.ingest(event)
        closing = session.close()
        assert len(closing) == 1
        blocks = session.store.blocks()
        assert [b.id for b in blocks] == [f"mem-william-b{i:04d}" for i in range(1, 7)]
        assert [b.start_timestamp for b in blocks] == [1000, 4000, 7000, 9000, 12000, 15000]
        assert blocks[0].text.startswith("My name is William Thompson")

    def test_encode_false_discards_evictions(self):
        session = fresh_session(capacity_chars=10, flush_threshold_chars=10)
        for i in range(20):
            out = session.ingest(
                TranscriptEvent(text=f"word{i} filler", timestamp_ms=i), encode=False
            )
            assert out == []
        assert session.close() == []
        assert len(session.store) == 0

    def test_timestamps_must_not_decrease(self):
        session = fresh_session()
        session.ingest(TranscriptEvent(text="first", timestamp_ms=100))
        with pytest.raises(ValueError):
            session.ingest(TranscriptEvent(text="second", timestamp_ms=99))
        session.ingest(TranscriptEvent(text="third", timestamp_ms=100))

    def test_blocks_flush_while_ingesting(self):
        session = fresh_session(capacity_chars=10, flush_threshold_chars=20)
        emitted = []
        for i in range(10):
            emitted += session.ingest(TranscriptEvent(text="abcdefgh", timestamp_ms=i))
        assert emitted
        assert all(b.session_id == "s1" for b in emitted)
        assert len(session.store) == len(emitted)

    def test_closed_session_rejects_everything(self):
        session = fresh_session()
        session.close()
        with pytest.raises(SessionClosedError):
            session.ingest(TranscriptEvent(text="x", timestamp_ms=1))
        with pytest.raises(SessionClosedError):
            session.prime_context("x")
        with pytest.raises(SessionClosedError):
            session.trigger("baseline", "a question")

    def test_close_flushes_staged_evictions_once(self):
        session = fresh_session(capacity_chars=10)
        session.ingest(TranscriptEvent(text="plenty of text beyond the tiny window", timestamp_ms=1))
        first = session.close()
        assert len(first) == 1
        assert session.close() == []

    def test_close_leaves_window_tail_unencoded(self):
        # Only evicted text is remembered; the live window dies with the
        # session.
        session = fresh_session()
        session.ingest(TranscriptEvent(text="short remark", timestamp_ms=1))
        assert session.close() == []
        assert len(session.store) == 0


class TestPrimeContext:
    def test_replaces_window_with_tail(self):
        session = fresh_session(capacity_chars=15)
        session.ingest(TranscriptEvent(text="older words here", timestamp_ms=1))
        session.prime_context("completely new priming text")
        snap = session.buffer.snapshot()
        assert len(snap) <= 15
        assert "completely new priming text".endswith(snap)

    def test_nothing_encoded(self):
        session = fresh_session(capacity_chars=10)
        session.prime_context("a very long priming context that exceeds the window")
        assert len(session.store) == 0

    def test_empty_prime_clears(self):
        session = fresh_session()
        session.ingest(TranscriptEvent(text="words", timestamp_ms=1))
        session.prime_context("   ")
        assert session.buffer.snapshot() == ""


class TestTrigger:
    def _seeded(self, clock=None, backend=None) -> Session:
        # Low flush threshold so early sentences reach long-term memory
        # while the session stays open.
        session = fresh_session(clock=clock, backend=backend, flush_threshold_chars=60)
        for event in events_from_text(
            "Emily practices violin every morning. Ethan plays soccer on Fridays. "
            "The family hikes the greenbelt monthly. They share dinner every Sunday "
            "evening at home together with friends from the neighborhood block."
        ):
            session.ingest(event)
        assert len(session.store) > 0
        return session

    def test_mode_set(self):
        assert MODES == ("baseline", "query", "queryless")

    def test_unknown_mode(self):
        session = fresh_session()
        with pytest.raises(ValueError):
            session.trigger("chat", "hello")

    @pytest.mark.parametrize("mode", ["baseline", "query"])
    def test_voiced_modes_require_query(self, mode):
        session = fresh_session()
        with pytest.raises(ModeArgMismatchError):
            session.trigger(mode)
        with pytest.raises(ModeArgMismatchError):
            session.trigger(mode, "   ")

    def test_queryless_rejects_voiced_query(self):
        session = fresh_session()
        with pytest.raises(ModeArgMismatchError):
            session.trigger("queryless", "surprise")

    def test_baseline_skips_conciseness_and_context(self):
        clock = VirtualClock()
        session = self._seeded(clock=clock)
        session.prime_context("morning routines and practice")
        record = session.trigger("baseline", "when does Emily practice violin", query_time_ms=900)
        assert record.mode == "baseline"
        assert record.raw_answer == record.concise_answer
        assert record.query_time_ms == 900
        assert record.voiced_query == "when does Emily practice violin"
        assert record.inferred_query is None
        # The snapshot is recorded even though baseline ignores it.
        assert record.context_snapshot == session.buffer.snapshot()

    def test_query_mode_compresses(self):
        session = self._seeded()
        session.prime_context("we were discussing morning practice routines")
        record = session.trigger("query", "when does Emily practice violin")
        assert record.mode == "query"
        assert len(record.concise_answer) <= len(record.raw_answer)
        assert record.response_chars == len(record.concise_answer)

    def test_queryless_records_inferred_query(self):
        session = self._seeded()
        session.prime_context("Her morning starts early. Emily practices the violin every")
        record = session.trigger("queryless")
        assert record.mode == "queryless"
        assert record.voiced_query is None
        assert record.inferred_query is not None
        assert record.inferred_query.endswith("?")
        assert record.query_time_ms is None

    def test_interaction_ids_are_sequential(self):
        session = self._seeded()
        r1 = session.trigger("baseline", "when does Emily practice violin")
        r2 = session.trigger("baseline", "who plays soccer")
        assert r1.interaction_id == "s1-i0001"
        assert r2.interaction_id == "s1-i0002"

    def test_process_time_from_virtual_clock(self):
        clock = VirtualClock()
        backend = TickingBackend(ExtractiveMockBackend(), clock, tick_ms=5)
        session = self._seeded(clock=clock, backend=backend)
        baseline = session.trigger("baseline", "when does Emily practice violin")
        assert baseline.process_time_ms == 5
        session.prime_context("morning practice")
        query = session.trigger("query", "when does Emily practice violin")
        assert query.process_time_ms == 10
        session.prime_context("Emily practices the violin every")
        queryless = session.trigger("queryless")
        assert queryless.process_time_ms == 15

    def test_pipeline_error_recorded_then_reraised(self):
        class ExplodingBackend:
            name = "exploding"

            def generate(self, req):
                raise PromptTooLargeError("synthetic failure")

        session = self._seeded(backend=ExplodingBackend())
        with pytest.raises(PromptTooLargeError):
            session.trigger("baseline", "when does Emily practice violin")
        records = session.list_interactions()
        assert len(records) == 1
        assert records[0].status == "error"
        assert records[0].error == "PromptTooLargeError"
        assert records[0].raw_answer == ""
        assert records[0].process_time_ms >= 1

    def test_list_interactions_filters_by_mode(self):
        session = self._seeded()
        session.trigger("baseline", "when does Emily practice violin")
        session.prime_context("soccer on Fridays")
        session.trigger("query", "who plays soccer")
        assert len(session.list_interactions()) == 2
        assert [r.mode for r in session.list_interactions("query")] == ["query"]
        assert session.list_interactions("queryless") == []

    def test_last_hit_similarities_updated(self):
        session = self._seeded()
        assert session.last_hit_similarities() == {}
        record = session.trigger("baseline", "when does Emily practice violin")
        sims = session.last_hit_similarities()
        assert set(sims) == set(record.hit_ids)
        assert all(isinstance(v, float) for v in sims.values())


class TestInteractionRecord:
    def test_dict_round_trip(self):
        record = sample_record()
        back = InteractionRecord.from_dict(record.to_dict())
        assert back == record
        assert isinstance(record.to_dict()["hit_ids"], list)

    def test_error_record_round_trip(self):
        record = sample_record(status="error", error="EmptyQueryError", hit_ids=())
        assert InteractionRecord.from_dict(record.to_dict()) == record


class TestInteractionLog:
    def test_append_and_load(self, tmp_path):
        log = InteractionLog(tmp_path / "log.jsonl")
        records = [sample_record(i) for i in range(1, 4)]
        for record in records:
            log.append(record)
        assert log.load() == records

    def test_missing_file_loads_empty(self, tmp_path):
        assert InteractionLog(tmp_path / "absent.jsonl").load() == []

    def test_corrupt_line_reports_number(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = InteractionLog(path)
        log.append(sample_record())
        with path.open("a", encoding="utf-8") as fh:
            fh.write("{bad json\n")
        with pytest.raises(CorruptRecordError) as err:
            log.load()
        assert err.value.line_number == 2

    def test_session_mirrors_records_to_log(self, tmp_path):
        log = InteractionLog(tmp_path / "session.jsonl")
        session = fresh_session(log=log)
        record = session.trigger("baseline", "when does Emily practice violin")
        assert log.load() == [record]

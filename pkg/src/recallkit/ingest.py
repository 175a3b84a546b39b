"""Transcript ingestion: rolling context window and long-term chunk staging.

The context buffer keeps at most `capacity_chars` characters of the most
recent transcript (whitespace-normalized, spaces included in the count).
Everything evicted from the window accumulates in a stager and is flushed to
long-term memory in blocks once `flush_threshold_chars` is reached.

Eviction respects word boundaries: a token straddling the cut is evicted
whole so the window never holds a torn word. The single exception is a token
longer than the whole window, which is hard-split (its tail stays, its head
is evicted); space-joined reconstruction of blocks + pending + window is
exact whenever no token exceeds the window size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorruptRecordError, EmptyTextError, IoFailureError
from .textnorm import normalize_ws, split_sentences

DEFAULT_CAPACITY_CHARS: int = 75
DEFAULT_FLUSH_THRESHOLD_CHARS: int = 300


@dataclass(frozen=True, slots=True)
class TranscriptEvent:
    """One transcribed utterance. Text is stored whitespace-normalized."""

    text: str
    timestamp_ms: int
    speaker: str | None = None

    def __post_init__(self):
        normalized = normalize_ws(self.text)
        if not normalized:
            raise EmptyTextError("transcript event text is empty after normalization")
        object.__setattr__(self, "text", normalized)


@dataclass(frozen=True, slots=True)
class StagedBlock:
    """A chunk of evicted transcript ready for long-term encoding."""

    text: str
    timestamp_ms: int


def _split_for_capacity(joined: str, capacity: int) -> tuple[str, str]:
    """Split `joined` into (evicted, kept) with len(kept) <= capacity.

    The cut lands on a word boundary; the token under the naive cut point is
    evicted whole. A single token longer than `capacity` is hard-split.
    """
    if len(joined) <= capacity:
        return "", joined
    p = len(joined) - capacity
    if joined[p] == " ":
        cut = p + 1
    elif joined[p - 1] == " ":
        cut = p
    else:
        nxt = joined.find(" ", p)
        cut = p if nxt == -1 else nxt + 1
    return joined[:cut].rstrip(), joined[cut:]


@dataclass(slots=True)
class ContextBuffer:
    """Suffix window over the normalized transcript, at most capacity_chars."""

    capacity_chars: int = DEFAULT_CAPACITY_CHARS
    content: str = ""
    session_epoch: int = 0

    def append(self, text: str) -> str:
        """Append normalized text, return the evicted prefix ("" if none)."""
        joined = f"{self.content} {text}" if self.content else text
        evicted, kept = _split_for_capacity(joined, self.capacity_chars)
        self.content = kept
        return evicted

    def reset(self) -> None:
        self.content = ""
        self.session_epoch += 1

    def snapshot(self) -> str:
        # str is immutable, so handing out the reference is a stable copy.
        return self.content


@dataclass(slots=True)
class ChunkStager:
    """Accumulates evicted text until it is worth one long-term block."""

    flush_threshold_chars: int = DEFAULT_FLUSH_THRESHOLD_CHARS
    pending: str = ""
    oldest_pending_timestamp: int | None = None
    _last_flush_stamp: int | None = field(default=None, repr=False)

    def stage(self, evicted: str, timestamp_ms: int) -> None:
        if not evicted:
            return
        if self.pending:
            self.pending = f"{self.pending} {evicted}"
        else:
            self.pending = evicted
            self.oldest_pending_timestamp = timestamp_ms

    def flush(self, *, force: bool = False) -> StagedBlock | None:
        """Emit the pending text as one block, or None if below threshold.

        Block timestamps are strictly increasing within a stager even when
        source events share a timestamp; colliding stamps are bumped by 1 ms.
        """
        if not self.pending:
            return None
        if not force and len(self.pending) < self.flush_threshold_chars:
            return None
        stamp = self.oldest_pending_timestamp
        assert stamp is not None
        if self._last_flush_stamp is not None and stamp <= self._last_flush_stamp:
            stamp = self._last_flush_stamp + 1
        block = StagedBlock(text=self.pending, timestamp_ms=stamp)
        self.pending = ""
        self.oldest_pending_timestamp = None
        self._last_flush_stamp = stamp
        return block


def append_event(buffer: ContextBuffer, stager: ChunkStager, event: TranscriptEvent) -> str:
    """Feed one event through the window; staged eviction keeps the event's stamp."""
    evicted = buffer.append(event.text)
    stager.stage(evicted, event.timestamp_ms)
    return evicted


def events_from_text(
    text: str,
    *,
    start_ms: int = 0,
    step_ms: int = 1000,
    speaker: str | None = None,
) -> list[TranscriptEvent]:
    """Split prose into sentence-sized events with evenly spaced timestamps."""
    return [
        TranscriptEvent(text=s, timestamp_ms=start_ms + i * step_ms, speaker=speaker)
        for i, s in enumerate(split_sentences(text))
    ]


def read_transcript_file(path: str | Path) -> list[TranscriptEvent]:
    """Load line-delimited events: {"text": str, "timestamp_ms": int, "speaker"?: str}."""
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read transcript file {path}: {exc}") from exc
    events: list[TranscriptEvent] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            events.append(
                TranscriptEvent(
                    text=rec["text"],
                    timestamp_ms=int(rec["timestamp_ms"]),
                    speaker=rec.get("speaker"),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, EmptyTextError) as exc:
            raise CorruptRecordError(lineno, str(exc)) from exc
    return events

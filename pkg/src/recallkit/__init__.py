"""Retrieval-augmented conversational memory engine.

A rolling context window tracks live conversation; evicted text is chunked,
embedded, and stored as long-term memory blocks. Triggers answer voiced
queries (or infer unvoiced ones) by retrieving relevant blocks and running
them through prompt templates against a text backend, then compress the
answer into a short memory cue.
"""

from .backends import (
    ExtractiveMockBackend,
    GenerationRequest,
    GenerationResult,
    RemoteBackend,
)
from .config import EngineConfig, load_config, make_backend, make_embedder, make_store
from .embedding import EmbedderSpec, HashedBowEmbedder, RemoteEmbedder, cosine, embed
from .errors import (
    CorruptRecordError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyContextError,
    EmptyQueryError,
    EmptyTextError,
    InvalidCaseError,
    IoFailureError,
    MalformedPromptError,
    MissingAssetError,
    MissingBindingError,
    ModeArgMismatchError,
    PromptTooLargeError,
    RecallError,
    RemoteUnavailableError,
    SessionClosedError,
    UnknownPlaceholderError,
    ZeroVectorError,
)
from .harness import (
    CaseResult,
    Corpus,
    CorpusCase,
    MetricsReport,
    bench_store,
    label_response,
    load_corpus,
    replay_case,
    replay_corpus,
)
from .inference import InferredQuery, infer_query, queryless_answer
from .ingest import (
    ChunkStager,
    ContextBuffer,
    StagedBlock,
    TranscriptEvent,
    events_from_text,
    read_transcript_file,
)
from .prompts import PromptTemplate, build_prompt, load_template
from .retrieval import AnswerTrace, answer_query, compress_answer, is_dont_know
from .session import (
    MODES,
    InteractionLog,
    InteractionRecord,
    RealClock,
    Session,
    TickingBackend,
    VirtualClock,
)
from .store import (
    MemoryBlock,
    MemoryStore,
    RankedHit,
    RetrievalConfig,
    assemble_relevant,
    count_tokens,
    load,
    persist,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerTrace",
    "CaseResult",
    "ChunkStager",
    "ContextBuffer",
    "Corpus",
    "CorpusCase",
    "CorruptRecordError",
    "DimensionMismatchError",
    "DuplicateIdError",
    "EmbedderSpec",
    "EmptyContextError",
    "EmptyQueryError",
    "EmptyTextError",
    "EngineConfig",
    "ExtractiveMockBackend",
    "GenerationRequest",
    "GenerationResult",
    "HashedBowEmbedder",
    "InferredQuery",
    "InteractionLog",
    "InteractionRecord",
    "InvalidCaseError",
    "IoFailureError",
    "MODES",
    "MalformedPromptError",
    "MemoryBlock",
    "MemoryStore",
    "MetricsReport",
    "MissingAssetError",
    "MissingBindingError",
    "ModeArgMismatchError",
    "PromptTemplate",
    "PromptTooLargeError",
    "RankedHit",
    "RealClock",
    "RecallError",
    "RemoteBackend",
    "RemoteEmbedder",
    "RemoteUnavailableError",
    "RetrievalConfig",
    "Session",
    "SessionClosedError",
    "StagedBlock",
    "TickingBackend",
    "TranscriptEvent",
    "UnknownPlaceholderError",
    "VirtualClock",
    "ZeroVectorError",
    "answer_query",
    "assemble_relevant",
    "bench_store",
    "build_prompt",
    "compress_answer",
    "cosine",
    "count_tokens",
    "embed",
    "events_from_text",
    "infer_query",
    "is_dont_know",
    "label_response",
    "load",
    "load_config",
    "load_corpus",
    "load_template",
    "make_backend",
    "make_embedder",
    "make_store",
    "persist",
    "queryless_answer",
    "read_transcript_file",
    "replay_case",
    "replay_corpus",
]

"""Long-term memory: exact cosine kNN over encoded blocks plus budgeted assembly.

Search is a single matmul over a snapshot of the block matrix; readers never
observe a partially applied write. Ranking is fully deterministic: similarity
descending, then older start_timestamp, then id. Assembly drops the
lowest-similarity hits until the joined text fits the token budget, then
reorders the survivors by ascending timestamp.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CorruptRecordError,
    DimensionMismatchError,
    DuplicateIdError,
    IoFailureError,
    ZeroVectorError,
)

DEFAULT_K: int = 10
DEFAULT_TOKEN_BUDGET: int = 4096

_STORE_FORMAT = "recallkit-store-v1"


@dataclass(frozen=True)
class MemoryBlock:
    """One encoded chunk of evicted transcript."""

    id: str
    text: str
    embedding: np.ndarray
    start_timestamp: int
    session_id: str


@dataclass(frozen=True)
class RankedHit:
    block: MemoryBlock
    similarity: float

    @property
    def id(self) -> str:
        return self.block.id


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = DEFAULT_K
    token_budget: int = DEFAULT_TOKEN_BUDGET
    tokenizer: str = "chars_div_4"  # or "whitespace_words"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.token_budget < 1:
            raise ValueError("token budget must be positive")
        if self.tokenizer not in ("chars_div_4", "whitespace_words"):
            raise ValueError(f"unknown tokenizer: {self.tokenizer}")


def count_tokens(text: str, tokenizer: str = "chars_div_4") -> int:
    if tokenizer == "chars_div_4":
        return math.ceil(len(text) / 4)
    if tokenizer == "whitespace_words":
        return len(text.split())
    raise ValueError(f"unknown tokenizer: {tokenizer}")


class MemoryStore:
    """In-memory block store with atomic snapshot reads and serialized writes."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._blocks: dict[str, MemoryBlock] = {}
        self._lock = threading.Lock()
        # Rows live in an amortized growth buffer; rows below _count are never
        # rewritten, so slices handed out in _view stay valid snapshots.
        self._buf = np.empty((16, dimension), dtype=np.float64)
        self._norm_buf = np.empty(16, dtype=np.float64)
        self._count = 0
        # (ids, matrix rows, norms); replaced wholesale so readers are stable.
        self._view: tuple[tuple[str, ...], np.ndarray, np.ndarray] = (
            (),
            self._buf[:0],
            self._norm_buf[:0],
        )

    def __len__(self) -> int:
        return len(self._view[0])

    def get(self, block_id: str) -> MemoryBlock | None:
        return self._blocks.get(block_id)

    def blocks(self) -> list[MemoryBlock]:
        # Dict first, view second: deletes swap the dict out, inserts only add
        # to it, so a view captured after the dict always resolves.
        blocks = self._blocks
        ids, _, _ = self._view
        return [blocks[i] for i in ids]

    def _validate_vector(self, vec: np.ndarray) -> np.ndarray:
        arr = np.asarray(vec, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"expected dimension {self.dimension}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding contains non-finite entries")
        return arr

    def _grow_to(self, needed: int) -> None:
        if needed <= len(self._buf):
            return
        capacity = max(needed, 2 * len(self._buf))
        buf = np.empty((capacity, self.dimension), dtype=np.float64)
        norm_buf = np.empty(capacity, dtype=np.float64)
        buf[: self._count] = self._buf[: self._count]
        norm_buf[: self._count] = self._norm_buf[: self._count]
        self._buf = buf
        self._norm_buf = norm_buf

    def _append_row(self, block: MemoryBlock, arr: np.ndarray, norm: float) -> None:
        self._grow_to(self._count + 1)
        self._buf[self._count] = arr
        self._norm_buf[self._count] = norm
        self._count += 1
        self._blocks[block.id] = block

    def _publish(self) -> None:
        self._view = (
            tuple(self._blocks),
            self._buf[: self._count],
            self._norm_buf[: self._count],
        )

    def insert(self, block: MemoryBlock) -> None:
        arr = self._validate_vector(block.embedding)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ZeroVectorError(f"block {block.id} has a zero embedding")
        with self._lock:
            if block.id in self._blocks:
                raise DuplicateIdError(f"block id already present: {block.id}")
            self._append_row(block, arr, norm)
            self._publish()

    def insert_many(self, blocks: list[MemoryBlock]) -> None:
        """Bulk insert with one snapshot swap; all-or-nothing validation."""
        rows = []
        seen: set[str] = set()
        for block in blocks:
            arr = self._validate_vector(block.embedding)
            norm = float(np.linalg.norm(arr))
            if norm == 0.0:
                raise ZeroVectorError(f"block {block.id} has a zero embedding")
            if block.id in seen:
                raise DuplicateIdError(f"block id already present: {block.id}")
            seen.add(block.id)
            rows.append((block, arr, norm))
        with self._lock:
            for block, _, _ in rows:
                if block.id in self._blocks:
                    raise DuplicateIdError(f"block id already present: {block.id}")
            self._grow_to(self._count + len(rows))
            for block, arr, norm in rows:
                self._append_row(block, arr, norm)
            self._publish()

    def delete(self, block_id: str) -> bool:
        with self._lock:
            if block_id not in self._blocks:
                return False
            ids, matrix, norms = self._view
            keep = [i for i, bid in enumerate(ids) if bid != block_id]
            # Copy-on-delete: readers holding the old view still resolve ids.
            self._blocks = {k: v for k, v in self._blocks.items() if k != block_id}
            self._count = len(keep)
            self._buf = matrix[keep].copy()
            self._norm_buf = norms[keep].copy()
            self._publish()
            return True

    def search(self, query_vec: np.ndarray, cfg: RetrievalConfig | None = None) -> list[RankedHit]:
        """Top-min(k, count) blocks by cosine, deterministic order.

        Ties on similarity go to the older start_timestamp, then the smaller id.
        """
        cfg = cfg or RetrievalConfig()
        q = self._validate_vector(query_vec)
        qnorm = float(np.linalg.norm(q))
        if qnorm == 0.0:
            raise ZeroVectorError("query embedding is a zero vector")
        blocks = self._blocks
        ids, matrix, norms = self._view
        n = len(ids)
        if n == 0:
            return []
        sims = (matrix @ q) / (norms * qnorm)
        kk = min(cfg.k, n)
        if kk == n:
            chosen = range(n)
        else:
            # Top-kk by value, then widen to the whole boundary tie group so
            # the (timestamp, id) tie-break is applied exactly.
            part = np.argpartition(-sims, kk - 1)[:kk]
            boundary = float(np.min(sims[part]))
            chosen = np.flatnonzero(sims >= boundary)
        scored = sorted(
            ((-float(sims[i]), blocks[ids[i]].start_timestamp, ids[i], i) for i in chosen),
        )[:kk]
        return [
            RankedHit(block=blocks[bid], similarity=-neg) for neg, _, bid, _ in scored
        ]


def _truncate_to_budget(text: str, cfg: RetrievalConfig) -> str:
    """Largest word-boundary prefix whose token count fits the budget."""
    if count_tokens(text, cfg.tokenizer) <= cfg.token_budget:
        return text
    if cfg.tokenizer == "chars_div_4":
        limit = cfg.token_budget * 4
        cut = text.rfind(" ", 0, limit + 1)
        return text[:limit] if cut <= 0 else text[:cut]
    words = text.split()
    return " ".join(words[: cfg.token_budget])


def assemble_relevant(hits: list[RankedHit], cfg: RetrievalConfig | None = None) -> str:
    """Join hit texts under the token budget, oldest first.

    Survivors are always a similarity-descending prefix of `hits`; the budget
    applies to the final joined string, separators included. A single block
    that alone exceeds the budget is truncated at a word boundary.
    """
    cfg = cfg or RetrievalConfig()
    survivors = list(hits)
    while survivors:
        joined = "\n".join(h.block.text for h in survivors)
        if count_tokens(joined, cfg.tokenizer) <= cfg.token_budget:
            break
        survivors.pop()
    if not survivors:
        if not hits:
            return ""
        return _truncate_to_budget(hits[0].block.text, cfg)
    ordered = sorted(survivors, key=lambda h: (h.block.start_timestamp, h.block.id))
    return "\n".join(h.block.text for h in ordered)


def persist(store: MemoryStore, path: str | Path) -> None:
    """Write the store as line-delimited JSON; embeddings keep full precision."""
    lines = [json.dumps({"format": _STORE_FORMAT, "dimension": store.dimension})]
    for block in store.blocks():
        lines.append(
            json.dumps(
                {
                    "id": block.id,
                    "session_id": block.session_id,
                    "start_timestamp": block.start_timestamp,
                    "text": block.text,
                    "embedding": block.embedding.tolist(),
                },
                ensure_ascii=False,
            )
        )
    try:
        Path(path).write_text("\n".join(lines) + "\n", "utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot write store file {path}: {exc}") from exc


def load(path: str | Path) -> MemoryStore:
    try:
        raw = Path(path).read_text("utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read store file {path}: {exc}") from exc
    lines = raw.splitlines()
    if not lines:
        raise CorruptRecordError(1, "store file is empty, header record missing")
    try:
        header = json.loads(lines[0])
        if header.get("format") != _STORE_FORMAT:
            raise ValueError(f"unexpected format marker: {header.get('format')!r}")
        store = MemoryStore(dimension=int(header["dimension"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CorruptRecordError(1, f"bad header: {exc}") from exc
    blocks: list[MemoryBlock] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            blocks.append(
                MemoryBlock(
                    id=rec["id"],
                    text=rec["text"],
                    embedding=np.asarray(rec["embedding"], dtype=np.float64),
                    start_timestamp=int(rec["start_timestamp"]),
                    session_id=rec["session_id"],
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptRecordError(lineno, str(exc)) from exc
    store.insert_many(blocks)
    return store

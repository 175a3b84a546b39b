"""Text normalization shared by ingestion, embedding, extraction, and labeling.

Two normal forms exist and must not be confused:

* `normalize_ws` collapses whitespace runs only; character counts in the
  context buffer are measured on this form.
* `normalize_match` additionally lowercases and maps punctuation to spaces;
  token overlap and answer-key matching happen on this form.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_WS_RUN = re.compile(r"\s+")
_NON_WORD = re.compile(r"[^0-9a-z]+")


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and strip the ends."""
    return _WS_RUN.sub(" ", text).strip()


def normalize_match(text: str) -> str:
    """Lowercase, replace punctuation with spaces, collapse whitespace."""
    return normalize_ws(_NON_WORD.sub(" ", text.lower()))


def tokenize(text: str) -> list[str]:
    """All tokens of the match form, stop words included."""
    return normalize_match(text).split()


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    raw = resources.files("recallkit").joinpath("assets/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in raw.splitlines() if w.strip())


def content_tokens(text: str) -> list[str]:
    """Tokens with stop words and single-character fragments removed."""
    stop = stopwords()
    return [t for t in tokenize(text) if len(t) > 1 and t not in stop]


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    """Naive sentence split on terminal punctuation; good enough for prose."""
    parts = _SENTENCE_END.split(normalize_ws(text))
    return [p for p in (s.strip() for s in parts) if p]

"""Versioned prompt templates and byte-exact placeholder substitution."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import MissingBindingError, UnknownPlaceholderError

TEMPLATE_NAMES = ("contextual_query", "concise_suggestion", "queryless_inference")

_PLACEHOLDER = re.compile(r"<(External Memories|Current Context|Query|Retrieved Answer)>")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    text: str

    @property
    def placeholders(self) -> tuple[str, ...]:
        seen: list[str] = []
        for m in _PLACEHOLDER.finditer(self.text):
            if m.group(1) not in seen:
                seen.append(m.group(1))
        return tuple(seen)


@lru_cache(maxsize=None)
def load_template(name: str) -> PromptTemplate:
    if name not in TEMPLATE_NAMES:
        raise ValueError(f"unknown template: {name}")
    text = resources.files("recallkit").joinpath(f"templates/{name}.txt").read_text("utf-8")
    return PromptTemplate(name=name, text=text)


def build_prompt(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders byte-exactly, in a single pass.

    Single-pass substitution means a binding whose value contains literal
    placeholder text is inserted verbatim and never re-expanded.
    """
    expected = set(template.placeholders)
    unknown = set(bindings) - expected
    if unknown:
        raise UnknownPlaceholderError(f"bindings without placeholders: {sorted(unknown)}")
    missing = expected - set(bindings)
    if missing:
        raise MissingBindingError(f"unbound placeholders: {sorted(missing)}")

    def _sub(m: re.Match[str]) -> str:
        return bindings[m.group(1)]

    return _PLACEHOLDER.sub(_sub, template.text)

"""Shared fixtures and hypothesis profile for the suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from recallkit.backends import ExtractiveMockBackend
from recallkit.embedding import HashedBowEmbedder
from recallkit.store import MemoryBlock

# Property runs share one profile: no per-example deadline (CI machines are
# noisy) and no shrink-phase health checks on slow data generation.
settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def embedder() -> HashedBowEmbedder:
    return HashedBowEmbedder()


@pytest.fixture()
def backend() -> ExtractiveMockBackend:
    return ExtractiveMockBackend()


@pytest.fixture()
def make_block():
    """Factory for MemoryBlock with compact defaults."""

    def _make(
        i: int,
        vec,
        *,
        text: str | None = None,
        ts: int | None = None,
        session: str = "s",
    ) -> MemoryBlock:
        return MemoryBlock(
            id=f"blk-{i:05d}",
            text=text if text is not None else f"block {i} text",
            embedding=np.asarray(vec, dtype=np.float64),
            start_timestamp=ts if ts is not None else i,
            session_id=session,
        )

    return _make

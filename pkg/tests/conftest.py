"""Shared fixtures and numeric helpers for the test suite."""

import numpy as np
import pytest
from hypothesis import settings

from optherm.hilbert import FockCutoff, ProbeState, coherent_coefficients

settings.register_profile("suite", max_examples=25, deadline=None)
settings.load_profile("suite")


def coherent_projector(alpha: float, cutoff: FockCutoff) -> ProbeState:
    c = coherent_coefficients(alpha, cutoff)
    return ProbeState(np.outer(c, c).astype(complex))


def random_density_matrix(dim: int, seed: int, rank: int | None = None) -> ProbeState:
    """Random mixed state from a Ginibre-style construction."""
    rng = np.random.default_rng(seed)
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return ProbeState(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest

from scripts.quantum_walk.graph import ring_graph
from scripts.quantum_walk.hilbert import antisym_basis, antisym_projector, embed


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def random_hermitian(rng):
    def build(d: int, scale: float = 1.0) -> np.ndarray:
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return scale * 0.5 * (a + a.conj().T)

    return build


@pytest.fixture
def random_density(rng):
    """Full-rank (or rank-limited) random density matrices."""

    def build(d: int, rank: int | None = None) -> np.ndarray:
        rank = rank or d
        g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    return build


@pytest.fixture
def random_sector_density(random_density):
    """Random full-rank states of the fermionic sector, embedded in n*n space."""

    def build(n: int) -> np.ndarray:
        basis = antisym_basis(n)
        return embed(random_density(basis.dim), basis)

    return build


@pytest.fixture
def ring5():
    return ring_graph(5)


@pytest.fixture
def projector4():
    return antisym_projector(4)

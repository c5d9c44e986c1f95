import numpy as np
import pytest

from scripts.quantum_walk.graph import ring_graph
from scripts.quantum_walk.hamiltonian import (
    REGIME_KINDS,
    InteractionParams,
    Regime,
    classify_alphas,
    free_hamiltonian,
    interaction_hamiltonian,
    matching_kinds,
    project_antisym,
    regime_alphas,
    regime_table,
    total_hamiltonian,
)
from scripts.quantum_walk.hilbert import antisym_projector, swap_operator


def explicit_total_hamiltonian(params: InteractionParams, n: int) -> np.ndarray:
    """Term-by-term sum over sites and edges of the ring."""
    eps = np.full(n, 2.0) if params.onsite_a is None else np.asarray(params.onsite_a)
    omega = np.full(n, 2.0) if params.onsite_b is None else np.asarray(params.onsite_b)
    edges = [(i, (i + 1) % n) for i in range(n)]
    a1, a2, a3, a4 = params.alphas
    t, s = params.t, params.s

    h = np.zeros((n * n, n * n))

    def add(i, k, j, l, value):
        h[i * n + k, j * n + l] += value

    for i in range(n):
        for k in range(n):
            add(i, k, i, k, eps[i] + omega[k] + a1 * eps[i] * omega[k])

    for i, j in edges:
        for k in range(n):
            add(i, k, j, k, -t * (1 + a2 * omega[k]))
            add(j, k, i, k, -t * (1 + a2 * omega[k]))

    for i in range(n):
        for k, l in edges:
            add(i, k, i, l, -s * (1 + a3 * eps[i]))
            add(i, l, i, k, -s * (1 + a3 * eps[i]))

    for i, j in edges:
        for k, l in edges:
            for (p, q), (r, u) in [((i, k), (j, l)), ((i, l), (j, k))]:
                add(p, q, r, u, a4 * t * s)
                add(r, u, p, q, a4 * t * s)

    return h


@pytest.mark.parametrize(
    "alphas", [(0, 0, 0, 0), (1.5, 0, 0, 0), (2, 0, 0, 2), (0.3, 0.3, 0.3, 0.3), (1, 0.1, 0.1, 1)]
)
def test_total_hamiltonian_matches_explicit_sum(alphas):
    params = InteractionParams(*alphas, t=0.7, s=1.3)

    np.testing.assert_allclose(
        total_hamiltonian(params, ring_graph(5)), explicit_total_hamiltonian(params, 5), atol=1e-12
    )


def test_total_hamiltonian_with_custom_onsite():
    onsite = np.array([0.0, 1.0, -1.0, 0.5, 2.0])
    params = InteractionParams(1, 0.2, 0.4, 1, onsite_a=onsite, onsite_b=onsite[::-1])

    np.testing.assert_allclose(
        total_hamiltonian(params, ring_graph(5)), explicit_total_hamiltonian(params, 5), atol=1e-12
    )


def test_no_interaction_reduces_to_free(ring5):
    params = InteractionParams(t=0.5, s=2.0)

    np.testing.assert_allclose(total_hamiltonian(params, ring5), free_hamiltonian(params, ring5))


def test_free_hamiltonian_spectrum(ring5):
    single = np.linalg.eigvalsh(
        np.diag(np.full(5, 2.0)) - ring5.adjacency.astype(float)
    )
    expected = np.sort(np.add.outer(single, single).ravel())

    np.testing.assert_allclose(
        np.linalg.eigvalsh(free_hamiltonian(InteractionParams(), ring5)), expected, atol=1e-12
    )


def test_interaction_hamiltonian_is_product(ring5):
    h = interaction_hamiltonian(InteractionParams(), ring5)
    single = 2 * np.eye(5) - ring5.adjacency

    np.testing.assert_allclose(h, np.kron(single, single))


@pytest.mark.parametrize("kind", ["NONE", "FI", "HI", "CHI", "FIFH"])
def test_hamiltonian_commutes_with_swap(kind, ring5):
    h = total_hamiltonian(regime_alphas(Regime(kind, 10.0)), ring5)
    swap = swap_operator(5)

    np.testing.assert_allclose(h, h.T, atol=1e-12)
    np.testing.assert_allclose(swap @ h, h @ swap, atol=1e-10)


def test_regime_alphas():
    assert regime_alphas(Regime("FI", 10)).alphas == (10, 10, 10, 10)
    assert regime_alphas(Regime("HI", 10)).alphas == (10, 0, 0, 0)
    assert regime_alphas(Regime("CHI", 1)).alphas == (1, 0, 0, 1)
    assert regime_alphas(Regime("FIFH", 10, 0.1)).alphas == (10, 0.1, 0.1, 10)
    assert regime_alphas(Regime("NONE", 10)).alphas == (0, 0, 0, 0)


def test_regime_validation():
    with pytest.raises(ValueError, match="Unknown regime"):
        Regime("XY", 1.0)
    with pytest.raises(ValueError, match=">= 0"):
        Regime("FI", -1.0)


@pytest.mark.parametrize("kind", REGIME_KINDS)
def test_classify_round_trip(kind):
    strength = 0.0 if kind == "NONE" else 10.0

    assert classify_alphas(regime_alphas(Regime(kind, strength, 0.1)).alphas) == kind


def test_classify_custom():
    assert classify_alphas((1, 2, 3, 4)) == "CUSTOM"
    assert classify_alphas((0, 1, 1, 0)) == "CUSTOM"


def test_classify_weak_fixed_hopping_is_ambiguous():
    alphas = regime_alphas(Regime("FIFH", 0.1, 0.1)).alphas

    assert matching_kinds(alphas) == ["FI", "FIFH"]
    assert classify_alphas(alphas) == "FI"
    assert classify_alphas(alphas, preferred="FIFH") == "FIFH"
    assert classify_alphas(alphas, preferred="fifh") == "FIFH"


def test_classify_ignores_preference_that_does_not_match():
    assert classify_alphas((1, 0, 0, 0), preferred="FI") == "HI"
    assert classify_alphas((1, 0, 0, 1), preferred="FIFH") == "FIFH"
    assert classify_alphas((1, 0, 0, 1), preferred="HI") == "CHI"
    assert classify_alphas((1, 2, 3, 4), preferred="FI") == "CUSTOM"


def test_regime_table():
    table = regime_table()

    assert table["regime"].tolist() == ["FI", "HI", "CHI", "FIFH", "NONE"]
    assert table.loc[table["regime"] == "HI", "alpha2"].item() == "=0"
    descriptions = table.set_index("regime")["description"]
    assert descriptions["HI"] == "Hubbard"
    assert descriptions["CHI"] == "correlated hopping interaction"


def test_projected_hamiltonian_stays_in_sector(ring5):
    projector = antisym_projector(5)
    h_a = project_antisym(total_hamiltonian(regime_alphas(Regime("FI", 1.0)), ring5), projector)

    np.testing.assert_allclose(projector @ h_a, h_a, atol=1e-12)
    np.testing.assert_allclose(h_a @ projector, h_a, atol=1e-12)

    with pytest.raises(ValueError, match="Shape mismatch"):
        project_antisym(np.eye(4), projector)

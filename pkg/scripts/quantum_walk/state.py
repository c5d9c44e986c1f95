"""
Initial two-walker states: the singlet, the maximally mixed fermionic state and
their white-noise mixture. Construction is deterministic; no random sampling.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from scripts.quantum_walk.hilbert import antisym_projector


@dataclass(frozen=True)
class InitialStateSpec:
    site_i: int = 5
    site_j: int = 6
    epsilon: float = 0.95

    def validate(self, n: int) -> None:
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        for site in (self.site_i, self.site_j):
            if not 0 <= site < n:
                raise ValueError(f"Site {site} outside the ring 0..{n - 1}")
        if self.site_i == self.site_j:
            raise ValueError(f"Sites must differ, got ({self.site_i}, {self.site_j})")


def singlet_state(i: int, j: int, n: int) -> np.ndarray:
    """|psi(i,j)> = (|i>|j> - |j>|i>) / sqrt(2) as a length n*n vector."""
    if i == j:
        raise ValueError(f"Singlet on a single site ({i}, {j}) is the zero vector")

    psi = np.zeros(n * n, dtype=complex)
    psi[i * n + j] = 1 / np.sqrt(2)
    psi[j * n + i] = -1 / np.sqrt(2)

    return psi


def maximally_mixed_antisym(n: int) -> np.ndarray:
    """P_a / M with M = n(n-1)/2: uniform weight on every fermionic basis state."""
    dim = n * (n - 1) // 2

    return antisym_projector(n).astype(complex) / dim


def perturbed_initial_state(spec: InitialStateSpec, n: int) -> np.ndarray:
    """
    rho0 = eps |psi(i,j)><psi(i,j)| + (1 - eps) P_a / M.

    Args:
        spec (InitialStateSpec): singlet sites and mixing weight epsilon.
        n (int): number of ring sites.

    Returns: (n*n, n*n) density matrix supported on the antisymmetric sector.
    """
    spec.validate(n)

    psi = singlet_state(spec.site_i, spec.site_j, n)

    return spec.epsilon * np.outer(psi, psi.conj()) + (
        1 - spec.epsilon
    ) * maximally_mixed_antisym(n)


def gibbs_state(
    h: np.ndarray, beta: float, projector: np.ndarray | None = None
) -> np.ndarray:
    """
    Gibbs state exp(-beta H) / Z. With a projector the state lives on the
    projector's range only, H being restricted there first.
    """
    size = h.shape[0]

    if projector is None:
        support = np.eye(size, dtype=complex)
    else:
        weights, vectors = linalg.eigh(projector)
        support = vectors[:, weights > 0.5]

    # Diagonalise H inside the support and weight its eigenvectors
    energies, modes = linalg.eigh(support.conj().T @ h @ support)
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()

    states = support @ modes
    return (states * weights) @ states.conj().T

"""
Two-walker Hilbert space H_A (x) H_B.

Basis ordering: |i>|j> is the flat index i * n + j. Operators on the composite
space are plain (n*n, n*n) arrays; reduced operators are (n, n) arrays.
"""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Subsystem = Literal["A", "B"]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def composite_dims(x: np.ndarray, dims: tuple[int, int] | None = None) -> tuple[int, int]:
    """Subsystem dimensions of a square composite operator. Without ``dims``
    both factors are assumed to have the same size."""
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"Composite operator must be square, got shape {x.shape}")

    if dims is None:
        n = int(round(np.sqrt(x.shape[0])))
        dims = (n, n)

    if dims[0] * dims[1] != x.shape[0]:
        raise ValueError(f"Dimensions {dims} do not match operator of size {x.shape[0]}")

    return dims


def partial_trace(
    x: np.ndarray, keep: Subsystem, dims: tuple[int, int] | None = None
) -> np.ndarray:
    """
    Traces out the complementary subsystem.

    Args:
        x (np.ndarray): composite operator.
        keep (str): "A" keeps the first factor, "B" the second.
        dims (tuple): subsystem dimensions, defaults to two equal factors.

    Returns: reduced operator on the kept subsystem.
    """
    d_a, d_b = composite_dims(x, dims)
    tensor = x.reshape(d_a, d_b, d_a, d_b)

    if keep == "A":
        return np.einsum("ijkj->ik", tensor)
    if keep == "B":
        return np.einsum("ijil->jl", tensor)

    raise ValueError(f"Unknown subsystem '{keep}', expected 'A' or 'B'")


def swap_operator(n: int) -> np.ndarray:
    """S |i>|j> = |j>|i> on C^n (x) C^n."""
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")

    index = np.arange(n * n)
    i, j = np.divmod(index, n)

    swap = np.zeros((n * n, n * n))
    swap[j * n + i, index] = 1.0

    return swap


def antisym_projector(n: int) -> np.ndarray:
    """P_a = (I - S) / 2, the projector on the fermionic two-walker sector."""
    if n < 2:
        raise ValueError(f"Antisymmetric sector needs n >= 2, got {n}")

    return 0.5 * (np.eye(n * n) - swap_operator(n))


@dataclass(frozen=True)
class AntisymBasis:
    """Ordered pairs (i, j), i < j, labelling |psi_ij> = (|ij> - |ji>) / sqrt(2)."""

    n: int
    pairs: tuple[tuple[int, int], ...]
    index_of: dict = field(compare=False)

    @property
    def dim(self) -> int:
        return len(self.pairs)

    @property
    def isometry(self) -> np.ndarray:
        """(n*n, M) matrix whose k-th column is |psi_{pairs[k]}>."""
        columns = np.zeros((self.n * self.n, self.dim))
        for k, (i, j) in enumerate(self.pairs):
            columns[i * self.n + j, k] = 1 / np.sqrt(2)
            columns[j * self.n + i, k] = -1 / np.sqrt(2)

        return columns


def antisym_basis(n: int) -> AntisymBasis:
    if n < 2:
        raise ValueError(f"Antisymmetric sector needs n >= 2, got {n}")

    pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))

    return AntisymBasis(n=n, pairs=pairs, index_of={p: k for k, p in enumerate(pairs)})


def embed(small: np.ndarray, basis: AntisymBasis) -> np.ndarray:
    """Maps an (M, M) operator on the sector basis to the full (n*n, n*n) space."""
    if small.shape != (basis.dim, basis.dim):
        raise ValueError(f"Expected shape {(basis.dim, basis.dim)}, got {small.shape}")

    v = basis.isometry
    return v @ small @ v.T


def restrict(big: np.ndarray, basis: AntisymBasis) -> np.ndarray:
    """Compresses an (n*n, n*n) operator to the (M, M) sector block."""
    size = basis.n * basis.n
    if big.shape != (size, size):
        raise ValueError(f"Expected shape {(size, size)}, got {big.shape}")

    v = basis.isometry
    return v.T @ big @ v

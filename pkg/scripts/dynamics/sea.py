"""
Steepest-entropy-ascent (SEA) dissipation for a two-component system.

Each walker J perceives the composite operators through the other walker's
reduced state, (X)^J = Tr_Jbar[(I_J (x) rho_Jbar) X]. Per walker, the perceived
log-state G = (B ln rho)^J is split against the perceived constraints
C_1 (probability) and C_2 (energy) in the state-weighted inner product
<X, Y> = Tr(rho_J {X, Y} / 2). What is left, G_perp, drives the dissipation:

    {D_J, rho_J} = {G_perp, rho_J} / (2 tau_J)
    drho/dt = -i[H, rho] - sum_J {D_J, rho_J} (x) rho_Jbar

so trace and energy are conserved and ds/dt = sum_J <G_perp, G_perp> / tau_J >= 0.

Sign convention of the multipliers: D_J = (G - beta1 C_1 + beta2 C_2) / (2 tau_J),
which gives beta1 = -ln Z and beta2 = beta on a Gibbs state.

In the fermionic sector (a projector P_a is passed) the constraints are the
sector identity P_a and H_a, and the dissipative sum is compressed by P_a.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from scripts.quantum_walk.hilbert import Subsystem, composite_dims, kron, partial_trace

SUBSYSTEMS: tuple[Subsystem, Subsystem] = ("A", "B")


@dataclass(frozen=True)
class SeaParams:
    tau_a: float = 1.0
    tau_b: float = 1.0
    cutoff_eig: float = 1e-12
    cutoff_gram: float = 1e-12
    # 0 switches the dissipator off (the tau -> infinity limit)
    dissipation_scale: float = 1.0

    def __post_init__(self):
        if self.tau_a <= 0 or self.tau_b <= 0:
            raise ValueError(f"Relaxation times must be positive, got {self.tau_a}, {self.tau_b}")
        if self.cutoff_eig <= 0 or self.cutoff_gram <= 0:
            raise ValueError("Cutoffs must be positive")

    @property
    def tau(self) -> float:
        """Average relaxation time, the unit of reported time."""
        return 0.5 * (self.tau_a + self.tau_b)

    def tau_of(self, subsystem: Subsystem) -> float:
        return self.tau_a if subsystem == "A" else self.tau_b


@dataclass(frozen=True)
class PerceivedOperators:
    s_perceived: np.ndarray
    c1_perceived: np.ndarray
    c2_perceived: np.ndarray
    rho_reduced: np.ndarray


@dataclass(frozen=True)
class MultiplierSolution:
    beta1: float
    beta2: float
    gram: np.ndarray
    det_gram: float
    degenerate: bool
    rhs: np.ndarray


class LocalDissipation(NamedTuple):
    subsystem: Subsystem
    anticommutator: np.ndarray
    multipliers: MultiplierSolution
    perceived: PerceivedOperators


def hermitize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def b_ln(rho: np.ndarray, cutoff: float = 1e-12, atol: float = 1e-8) -> np.ndarray:
    """
    Logarithm restricted to the support of rho: ln on eigenvalues above
    ``cutoff``, zero on the (numerical) kernel.

    Args:
        rho (np.ndarray): Hermitian matrix.
        cutoff (float): eigenvalues at or below this count as kernel.
        atol (float): tolerated anti-Hermitian part.

    Returns: Hermitian matrix commuting with rho.
    """
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > atol:
        raise ValueError("b_ln expects a Hermitian matrix")

    weights, vectors = linalg.eigh(hermitize(rho))

    logs = np.zeros_like(weights)
    support = weights > cutoff
    logs[support] = np.log(weights[support])

    return (vectors * logs) @ vectors.conj().T


def local_perception(
    x: np.ndarray,
    rho: np.ndarray,
    subsystem: Subsystem,
    dims: tuple[int, int] | None = None,
) -> np.ndarray:
    """
    Locally perceived operator (X)^A = Tr_B[(I (x) rho_B) X] or
    (X)^B = Tr_A[(rho_A (x) I) X].
    """
    d_a, d_b = composite_dims(x, dims)
    if rho.shape != x.shape:
        raise ValueError(f"State shape {rho.shape} does not match operator {x.shape}")

    tensor = x.reshape(d_a, d_b, d_a, d_b)

    if subsystem == "A":
        rho_b = partial_trace(rho, "B", (d_a, d_b))
        return np.einsum("ijkl,lj->ik", tensor, rho_b)
    if subsystem == "B":
        rho_a = partial_trace(rho, "A", (d_a, d_b))
        return np.einsum("ijkl,ki->jl", tensor, rho_a)

    raise ValueError(f"Unknown subsystem '{subsystem}', expected 'A' or 'B'")


def perceived_entropy_operator(
    rho: np.ndarray,
    subsystem: Subsystem,
    cutoff: float = 1e-12,
    dims: tuple[int, int] | None = None,
) -> np.ndarray:
    """(S(rho))^J with S(rho) = -B ln rho and k_B = 1."""
    return hermitize(local_perception(-b_ln(rho, cutoff), rho, subsystem, dims))


def perceived_operators(
    rho: np.ndarray,
    subsystem: Subsystem,
    hamiltonian: np.ndarray,
    cutoff: float = 1e-12,
    projector: np.ndarray | None = None,
    log_rho: np.ndarray | None = None,
    dims: tuple[int, int] | None = None,
) -> PerceivedOperators:
    """Perceived entropy, identity and energy operators of one walker."""
    dims = composite_dims(rho, dims)
    if log_rho is None:
        log_rho = b_ln(rho, cutoff)

    reduced = partial_trace(rho, subsystem, dims)

    # Without a projector the identity is perceived as the local identity
    if projector is None:
        c1 = np.eye(reduced.shape[0], dtype=complex)
    else:
        c1 = hermitize(local_perception(projector, rho, subsystem, dims))

    return PerceivedOperators(
        s_perceived=-hermitize(local_perception(log_rho, rho, subsystem, dims)),
        c1_perceived=c1,
        c2_perceived=hermitize(local_perception(hamiltonian, rho, subsystem, dims)),
        rho_reduced=hermitize(reduced),
    )


def state_inner(rho_j: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """<X, Y> = Tr(rho_J {X, Y} / 2), real for Hermitian arguments."""
    return 0.5 * float(np.real(np.trace(rho_j @ (x @ y + y @ x))))


def gram_matrix(ops: PerceivedOperators) -> np.ndarray:
    constraints = (ops.c1_perceived, ops.c2_perceived)

    return np.array(
        [[state_inner(ops.rho_reduced, ck, cl) for cl in constraints] for ck in constraints]
    )


def lagrange_multipliers(
    ops: PerceivedOperators, cutoff_gram: float = 1e-12
) -> MultiplierSolution:
    """
    Solves the 2x2 Gram system for the local multipliers by Cramer's rule.
    A Gram determinant below ``cutoff_gram * Omega_11 * Omega_22`` is flagged
    degenerate and returns zero multipliers.
    """
    gram = gram_matrix(ops)
    log_perceived = -ops.s_perceived
    rhs = np.array(
        [
            state_inner(ops.rho_reduced, ops.c1_perceived, log_perceived),
            state_inner(ops.rho_reduced, ops.c2_perceived, log_perceived),
        ]
    )

    det = gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0]
    scale = gram[0, 0] * gram[1, 1]

    if not scale > 0 or det <= cutoff_gram * scale:
        return MultiplierSolution(0.0, 0.0, gram, float(det), True, rhs)

    x1 = (rhs[0] * gram[1, 1] - gram[0, 1] * rhs[1]) / det
    x2 = (gram[0, 0] * rhs[1] - rhs[0] * gram[1, 0]) / det

    return MultiplierSolution(float(x1), float(-x2), gram, float(det), False, rhs)


def _half_anticommutator(op: np.ndarray, rho_j: np.ndarray) -> np.ndarray:
    return 0.5 * (op @ rho_j + rho_j @ op)


def determinant_anticommutator(
    ops: PerceivedOperators, solution: MultiplierSolution, tau: float
) -> np.ndarray:
    """
    {D_J, rho_J} as the ratio of the 3x3 determinant with operator-valued first
    row ({rho_J, G}/2, {C_1, rho_J}/2, {C_2, rho_J}/2) over det Omega, divided
    by tau_J. The numerator is expanded by cofactors along the first row.
    """
    rho_j = ops.rho_reduced
    if solution.degenerate:
        return np.zeros_like(rho_j)

    gram, r = solution.gram, solution.rhs

    numerator = (
        _half_anticommutator(-ops.s_perceived, rho_j) * solution.det_gram
        - _half_anticommutator(ops.c1_perceived, rho_j) * (r[0] * gram[1, 1] - gram[0, 1] * r[1])
        + _half_anticommutator(ops.c2_perceived, rho_j) * (r[0] * gram[1, 0] - gram[0, 0] * r[1])
    )

    return numerator / (solution.det_gram * tau)


def dissipation_operator(
    ops: PerceivedOperators, solution: MultiplierSolution, tau: float
) -> np.ndarray:
    """D_J = ((B ln rho)^J - beta1 (C_1)^J + beta2 (C_2)^J) / (2 tau_J)."""
    if solution.degenerate:
        return np.zeros_like(ops.rho_reduced)

    return (
        -ops.s_perceived
        - solution.beta1 * ops.c1_perceived
        + solution.beta2 * ops.c2_perceived
    ) / (2 * tau)


def dissipator_term(
    rho: np.ndarray,
    subsystem: Subsystem,
    params: SeaParams,
    hamiltonian: np.ndarray,
    projector: np.ndarray | None = None,
    log_rho: np.ndarray | None = None,
    dims: tuple[int, int] | None = None,
) -> LocalDissipation:
    """
    Local dissipative anticommutator {D_J, rho_J} of one walker.

    Args:
        rho (np.ndarray): composite state.
        subsystem (str): "A" or "B".
        params (SeaParams): relaxation times and cutoffs.
        hamiltonian (np.ndarray): composite Hamiltonian (H_a in the sector).
        projector (np.ndarray): sector projector, None for the full space.
        log_rho (np.ndarray): precomputed B ln rho.

    Returns: LocalDissipation; a degenerate Gram matrix yields a zero
             anticommutator with ``multipliers.degenerate`` set.
    """
    ops = perceived_operators(
        rho, subsystem, hamiltonian, params.cutoff_eig, projector, log_rho, dims
    )
    solution = lagrange_multipliers(ops, params.cutoff_gram)
    anticommutator = determinant_anticommutator(ops, solution, params.tau_of(subsystem))

    return LocalDissipation(subsystem, anticommutator, solution, ops)


def dissipative_part(
    rho: np.ndarray,
    hamiltonian: np.ndarray,
    params: SeaParams,
    projector: np.ndarray | None = None,
    dims: tuple[int, int] | None = None,
) -> tuple[np.ndarray, list[LocalDissipation]]:
    """sum_J {D_J, rho_J} (x) rho_Jbar, compressed by the projector when given."""
    dims = composite_dims(rho, dims)
    log_rho = b_ln(rho, params.cutoff_eig)

    terms = [
        dissipator_term(rho, subsystem, params, hamiltonian, projector, log_rho, dims)
        for subsystem in SUBSYSTEMS
    ]

    rho_a = partial_trace(rho, "A", dims)
    rho_b = partial_trace(rho, "B", dims)
    total = kron(terms[0].anticommutator, rho_b) + kron(rho_a, terms[1].anticommutator)

    if projector is not None:
        total = projector @ total @ projector

    return params.dissipation_scale * total, terms


def unitary_rhs(rho: np.ndarray, hamiltonian: np.ndarray) -> np.ndarray:
    """-i [H, rho]."""
    return -1j * (hamiltonian @ rho - rho @ hamiltonian)


def sea_rhs(
    rho: np.ndarray,
    hamiltonian: np.ndarray,
    params: SeaParams,
    projector: np.ndarray | None = None,
) -> np.ndarray:
    """Symmetrized two-component SEA right-hand side."""
    dissipation, _ = dissipative_part(rho, hamiltonian, params, projector)

    return unitary_rhs(rho, hamiltonian) - dissipation


def single_component_dissipation(
    rho: np.ndarray,
    hamiltonian: np.ndarray,
    tau: float = 1.0,
    cutoff: float = 1e-12,
    cutoff_gram: float = 1e-12,
) -> np.ndarray:
    """{D, rho} for a single system with C_1 = I and C_2 = H."""
    ops = PerceivedOperators(
        s_perceived=-b_ln(rho, cutoff),
        c1_perceived=np.eye(rho.shape[0], dtype=complex),
        c2_perceived=hamiltonian,
        rho_reduced=rho,
    )
    dissipation = dissipation_operator(ops, lagrange_multipliers(ops, cutoff_gram), tau)

    return dissipation @ rho + rho @ dissipation


def single_component_rhs(
    rho: np.ndarray,
    hamiltonian: np.ndarray,
    tau: float = 1.0,
    cutoff: float = 1e-12,
    cutoff_gram: float = 1e-12,
) -> np.ndarray:
    """drho/dt = -i[H, rho] - {D, rho}."""
    return unitary_rhs(rho, hamiltonian) - single_component_dissipation(
        rho, hamiltonian, tau, cutoff, cutoff_gram
    )


def entropy_production(terms: list[LocalDissipation], dissipation_scale: float = 1.0) -> float:
    """-sum_J Tr[{D_J, rho_J} (S)^J] from already evaluated dissipator terms."""
    rate = -sum(
        np.real(np.trace(term.anticommutator @ term.perceived.s_perceived)) for term in terms
    )

    return dissipation_scale * float(rate)


def entropy_production_rate(
    rho: np.ndarray,
    params: SeaParams,
    hamiltonian: np.ndarray,
    projector: np.ndarray | None = None,
) -> float:
    """ds/dt along the SEA flow, non-negative on every state."""
    _, terms = dissipative_part(rho, hamiltonian, params, projector)

    return entropy_production(terms, params.dissipation_scale)

"""
Two-walker Hamiltonians with tunable interaction weights.

Walker A hops with strength t over on-site potentials eps_i, walker B with
strength s over omega_k. The alpha weights scale the four pieces of the
generic interaction H_A (x) H_B:

    alpha1: on-site product       eps_i omega_k |ik><ik|
    alpha2: A-hopping weighted by B's on-site potential
    alpha3: B-hopping weighted by A's on-site potential
    alpha4: correlated hopping    t s (|ik><jl| + |il><jk| + h.c.)
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from scripts.quantum_walk.graph import HoppingProfile, RingGraph, single_walker_hamiltonian
from scripts.quantum_walk.hilbert import kron

REGIME_KINDS = ("FI", "HI", "CHI", "FIFH", "NONE")

STRENGTH_PRESETS = {"weak": 0.1, "medium": 1.0, "strong": 10.0}

# Conditions on (alpha1, alpha2, alpha3, alpha4) for each regime
REGIME_TABLE = {
    "FI": ("full interaction (all equal)", "!=0", "!=0", "!=0", "!=0"),
    "HI": ("Hubbard", "!=0", "=0", "=0", "=0"),
    "CHI": ("correlated hopping interaction", "!=0", "=0", "=0", "!=0"),
    "FIFH": ("full interaction, fixed hopping", "!=0", "=alpha3", "=alpha2", "!=0"),
    "NONE": ("no interaction", "=0", "=0", "=0", "=0"),
}


@dataclass(frozen=True)
class InteractionParams:
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0
    alpha4: float = 0.0
    t: float = 1.0
    s: float = 1.0
    onsite_a: np.ndarray | None = field(default=None)
    onsite_b: np.ndarray | None = field(default=None)

    @property
    def alphas(self) -> tuple[float, float, float, float]:
        return (self.alpha1, self.alpha2, self.alpha3, self.alpha4)


@dataclass(frozen=True)
class Regime:
    kind: str = "NONE"
    strength: float = 0.0
    fixed_hopping: float = 0.1

    def __post_init__(self):
        if self.kind not in REGIME_KINDS:
            raise ValueError(f"Unknown regime '{self.kind}', expected one of {REGIME_KINDS}")
        if self.strength < 0:
            raise ValueError(f"Interaction strength must be >= 0, got {self.strength}")


def regime_alphas(regime: Regime, t: float = 1.0, s: float = 1.0) -> InteractionParams:
    """
    Alpha weights for a named regime.

    Args:
        regime (Regime): kind, strength g and (FIFH only) fixed hopping h.
        t, s (float): hopping strengths of walkers A and B.

    Returns: InteractionParams with FI -> (g, g, g, g), HI -> (g, 0, 0, 0),
             CHI -> (g, 0, 0, g), FIFH -> (g, h, h, g), NONE -> zeros.
    """
    g, h = regime.strength, regime.fixed_hopping

    alphas = {
        "FI": (g, g, g, g),
        "HI": (g, 0.0, 0.0, 0.0),
        "CHI": (g, 0.0, 0.0, g),
        "FIFH": (g, h, h, g),
        "NONE": (0.0, 0.0, 0.0, 0.0),
    }.get(regime.kind)

    if alphas is None:
        raise ValueError(f"Unknown regime '{regime.kind}'")

    return InteractionParams(*alphas, t=t, s=s)


def matching_kinds(alphas) -> list[str]:
    """Every regime kind that can produce this alpha vector, most specific first."""
    a1, a2, a3, a4 = alphas

    if a1 == a2 == a3 == a4 == 0:
        return ["NONE"]
    if a1 == 0:
        return []

    kinds = []
    if a1 == a2 == a3 == a4:
        kinds.append("FI")
    if a2 == a3 == a4 == 0:
        kinds.append("HI")
    if a2 == a3 == 0 and a4 != 0:
        kinds.append("CHI")
    if a2 == a3 and a1 == a4:
        kinds.append("FIFH")

    return kinds


def classify_alphas(alphas, preferred: str | None = None) -> str:
    """
    Recovers the regime kind from an alpha vector.

    Some vectors belong to two kinds: FIFH with fixed hopping equal to the
    strength is also FI, and FIFH with zero fixed hopping is also CHI.

    Args:
        alphas: (alpha1, alpha2, alpha3, alpha4).
        preferred (str): kind returned when it is one of the matches, e.g. the
            configured regime.

    Returns: the kind, or "CUSTOM" when it matches no row of the regime table.
    """
    kinds = matching_kinds(alphas)

    if not kinds:
        return "CUSTOM"
    if preferred is not None and preferred.upper() in kinds:
        return preferred.upper()

    return kinds[0]


def regime_table() -> pd.DataFrame:
    """The regime presets as a table, one row per kind."""
    return pd.DataFrame.from_dict(
        REGIME_TABLE,
        orient="index",
        columns=["description", "alpha1", "alpha2", "alpha3", "alpha4"],
    ).rename_axis("regime").reset_index()


def _local_terms(params: InteractionParams, graph: RingGraph):
    """On-site diagonals and hopping matrices of the two walkers."""
    adjacency = np.asarray(graph.adjacency, dtype=float)
    degrees = adjacency.sum(axis=1)

    eps = np.diag(degrees if params.onsite_a is None else np.asarray(params.onsite_a, float))
    omega = np.diag(degrees if params.onsite_b is None else np.asarray(params.onsite_b, float))

    if eps.shape != adjacency.shape or omega.shape != adjacency.shape:
        raise ValueError("On-site potential lists must have one entry per vertex")

    return eps, omega, params.t * adjacency, params.s * adjacency


def _walker_hamiltonians(params: InteractionParams, graph: RingGraph):
    h_a = single_walker_hamiltonian(graph, HoppingProfile(mu=params.t, onsite=params.onsite_a))
    h_b = single_walker_hamiltonian(graph, HoppingProfile(mu=params.s, onsite=params.onsite_b))

    return h_a, h_b


def free_hamiltonian(params: InteractionParams, graph: RingGraph) -> np.ndarray:
    """H_free = H_A (x) I + I (x) H_B."""
    h_a, h_b = _walker_hamiltonians(params, graph)
    identity = np.eye(graph.n_vertices)

    return kron(h_a, identity) + kron(identity, h_b)


def interaction_hamiltonian(params: InteractionParams, graph: RingGraph) -> np.ndarray:
    """Generic interaction H_A (x) H_B."""
    h_a, h_b = _walker_hamiltonians(params, graph)

    return kron(h_a, h_b)


def total_hamiltonian(params: InteractionParams, graph: RingGraph) -> np.ndarray:
    """
    Alpha-weighted total Hamiltonian, built as one sum so the alpha2/alpha3
    hopping weights are not counted twice against H_free:

        sum_ik (eps_i + omega_k + a1 eps_i omega_k) |ik><ik|
        - t sum_<ij>,k (1 + a2 omega_k) (|ik><jk| + h.c.)
        - s sum_i,<kl> (1 + a3 eps_i) (|ik><il| + h.c.)
        + a4 t s sum_<ij>,<kl> (|ik><jl| + |il><jk| + h.c.)
    """
    eps, omega, hop_a, hop_b = _local_terms(params, graph)
    identity = np.eye(graph.n_vertices)

    onsite = kron(eps, identity) + kron(identity, omega) + params.alpha1 * kron(eps, omega)
    hopping_a = kron(hop_a, identity + params.alpha2 * omega)
    hopping_b = kron(identity + params.alpha3 * eps, hop_b)
    correlated = params.alpha4 * kron(hop_a, hop_b)

    return onsite - hopping_a - hopping_b + correlated


def project_antisym(h: np.ndarray, projector: np.ndarray) -> np.ndarray:
    """H_a = P_a H P_a."""
    if h.shape != projector.shape:
        raise ValueError(f"Shape mismatch: {h.shape} vs projector {projector.shape}")

    return projector @ h @ projector

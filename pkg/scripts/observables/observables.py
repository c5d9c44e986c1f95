"""
Observables of the two-walker state: joint and marginal site probabilities,
mean squared displacement, Loschmidt echo, entropies and mutual information,
plus the smoothing used on their time series.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import linalg

from scripts.dynamics.integrator import StepDiagnostics
from scripts.dynamics.sea import SeaParams, dissipative_part, entropy_production, hermitize
from scripts.quantum_walk.hilbert import Subsystem, composite_dims, partial_trace

OBSERVABLE_COLUMNS = [
    "t_over_tau",
    "msd",
    "loschmidt",
    "entropy_total",
    "entropy_a",
    "entropy_b",
    "mutual_info",
    "trace_err",
    "leakage",
    "energy_drift",
    "ep_rate",
    "purity",
    "energy",
    "beta2_a",
    "beta2_b",
    "min_eigenvalue",
    "hermiticity_err",
    "gram_degenerate",
    "clipped_weight",
]

SUMMARY_OBSERVABLES = ["msd", "loschmidt", "entropy_total", "mutual_info"]


@dataclass(frozen=True)
class JpdSnapshot:
    time: float
    matrix: np.ndarray


def joint_probability(rho: np.ndarray, time: float = 0.0) -> JpdSnapshot:
    """P(m, n) = <mn|rho|mn> as an (n, n) matrix."""
    n, _ = composite_dims(rho)

    return JpdSnapshot(time=time, matrix=np.real(np.diag(rho)).reshape(n, n))


def marginal(rho: np.ndarray, subsystem: Subsystem) -> np.ndarray:
    """Site probabilities of one walker, the diagonal of its reduced state."""
    return np.real(np.diag(partial_trace(rho, subsystem)))


def msd(jpd: JpdSnapshot) -> float:
    """
    Mean squared displacement (1/N) sum_{m,n} (m - n)^2 P(m, n). The distance
    is the plain index difference, not the distance around the ring.
    """
    n = jpd.matrix.shape[0]
    sites = np.arange(n)
    distance = (sites[:, None] - sites[None, :]) ** 2

    return float(np.sum(distance * jpd.matrix) / n)


def loschmidt_echo(rho0: np.ndarray, rho_t: np.ndarray) -> float:
    """Tr(rho0 rho_t)."""
    if rho0.shape != rho_t.shape:
        raise ValueError(f"Shape mismatch: {rho0.shape} vs {rho_t.shape}")

    return float(np.real(np.einsum("ij,ji->", rho0, rho_t)))


def von_neumann_entropy(rho: np.ndarray, cutoff: float = 1e-12) -> float:
    """-sum lambda ln lambda over eigenvalues above ``cutoff`` (k_B = 1)."""
    weights = linalg.eigvalsh(hermitize(rho))
    weights = weights[weights > cutoff]

    return float(-np.sum(weights * np.log(weights)))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.vdot(rho, rho)))


def mutual_information(
    rho: np.ndarray, cutoff: float = 1e-12, dims: tuple[int, int] | None = None
) -> float:
    """S(rho_A) + S(rho_B) - S(rho)."""
    return (
        von_neumann_entropy(partial_trace(rho, "A", dims), cutoff)
        + von_neumann_entropy(partial_trace(rho, "B", dims), cutoff)
        - von_neumann_entropy(rho, cutoff)
    )


def moving_average(series, window: int) -> np.ndarray:
    """
    Centered running mean; the window shrinks at both ends so the length is
    preserved. A window covering the whole series gives its global mean.

    Args:
        series: sequence of reals.
        window (int): number of samples, at least 1.

    Returns: np.ndarray of the same length as ``series``.
    """
    if window < 1:
        raise ValueError(f"Moving-average window must be at least 1, got {window}")

    values = pd.Series(series, dtype=float)

    if window >= len(values):
        return np.full(len(values), values.mean())

    return values.rolling(window, center=True, min_periods=1).mean().to_numpy()


def saturation_time(times, series, window: int, rel_tol: float = 1e-2) -> float:
    """
    Earliest time after which the smoothed series stays within ``rel_tol`` of
    its final smoothed value. NaN when only the last sample qualifies.
    """
    times = np.asarray(times, dtype=float)
    smoothed = moving_average(series, window)

    if len(smoothed) == 0:
        return float("nan")

    final = smoothed[-1]
    # Series settling at zero are measured against their range instead
    scale = abs(final) or float(np.ptp(smoothed)) or 1.0

    outside = np.flatnonzero(np.abs(smoothed - final) > rel_tol * scale)
    if len(outside) == 0:
        return float(times[0])

    first_inside = outside[-1] + 1
    if first_inside >= len(smoothed) - 1:
        return float("nan")

    return float(times[first_inside])


class ObservableSampler:
    """
    Builds one observables row per sampled state and keeps the marginal
    site probabilities of every sample.
    """

    def __init__(
        self,
        rho0: np.ndarray,
        hamiltonian: np.ndarray,
        params: SeaParams = SeaParams(),
        projector: np.ndarray | None = None,
        evolution: str = "sea",
    ):
        self.rho0 = rho0
        self.hamiltonian = hamiltonian
        self.params = params
        self.projector = projector
        self.evolution = evolution
        self._marginals: list[pd.DataFrame] = []

    def __call__(self, time: float, rho: np.ndarray, diagnostics: StepDiagnostics) -> dict:
        cutoff = self.params.cutoff_eig

        entropy_total = von_neumann_entropy(rho, cutoff)
        entropy_a = von_neumann_entropy(partial_trace(rho, "A"), cutoff)
        entropy_b = von_neumann_entropy(partial_trace(rho, "B"), cutoff)

        # Local multipliers are state properties, reported for both evolutions
        _, terms = dissipative_part(rho, self.hamiltonian, self.params, self.projector)
        ep_rate = (
            entropy_production(terms, self.params.dissipation_scale)
            if self.evolution == "sea"
            else 0.0
        )

        p_a, p_b = marginal(rho, "A"), marginal(rho, "B")
        self._marginals.append(
            pd.DataFrame(
                {"t_over_tau": time, "site": np.arange(len(p_a)), "p_a": p_a, "p_b": p_b}
            )
        )

        row = {
            "t_over_tau": time,
            "msd": msd(joint_probability(rho, time)),
            "loschmidt": loschmidt_echo(self.rho0, rho),
            "entropy_total": entropy_total,
            "entropy_a": entropy_a,
            "entropy_b": entropy_b,
            "mutual_info": entropy_a + entropy_b - entropy_total,
            "ep_rate": ep_rate,
            "purity": purity(rho),
            "energy": float(np.real(np.trace(rho @ self.hamiltonian))),
            "beta2_a": terms[0].multipliers.beta2,
            "beta2_b": terms[1].multipliers.beta2,
        } | diagnostics.as_row()

        return {column: row[column] for column in OBSERVABLE_COLUMNS}

    def marginals_frame(self) -> pd.DataFrame:
        if not self._marginals:
            return pd.DataFrame(columns=["t_over_tau", "site", "p_a", "p_b"])

        return pd.concat(self._marginals, ignore_index=True)


def late_time_summary(
    frame: pd.DataFrame, window: int = 50, late_fraction: float = 0.2
) -> dict:
    """
    Late-time moving-averaged values of the headline observables and the
    saturation times of entropy and mutual information.

    Args:
        frame (pd.DataFrame): observables table with a t_over_tau column.
        window (int): moving-average window in samples.
        late_fraction (float): trailing share of the horizon that is averaged.

    Returns: dict keyed by observable name.
    """
    if not 0 < late_fraction <= 1:
        raise ValueError(f"late_fraction must lie in (0, 1], got {late_fraction}")

    times = frame["t_over_tau"].to_numpy()
    late = times >= times[-1] - late_fraction * (times[-1] - times[0])

    summary = {
        name: float(np.mean(moving_average(frame[name], window)[late]))
        for name in SUMMARY_OBSERVABLES
    }
    summary["t_sat_entropy"] = saturation_time(times, frame["entropy_total"], window)
    summary["t_sat_mutual_info"] = saturation_time(times, frame["mutual_info"], window)

    return summary

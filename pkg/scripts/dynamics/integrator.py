"""
Fixed-step time integration of the unitary and SEA equations of motion.

Two schemes are available:

    "lawson"  integrating-factor RK4: the unitary part is propagated exactly
              with e^{-iHs}, only the dissipative part goes through RK4
    "rk4"     classical RK4 on the full right-hand side

After every step the state is passed through ``guard``: hermitize, re-project
on the fermionic sector, clip negative eigenvalues and renormalize.

From a mixed start, interacting SEA flows push the smallest sector eigenvalue
through zero within a fraction of tau (FI at strength 10 near t/tau = 0.1),
whatever dt or scheme. The default "clip" policy keeps those eigenvalues at
zero and records the removed weight; "abort" stops the run instead.
"""

from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Protocol

import numpy as np
import pandas as pd
from scipy import linalg

from scripts.dynamics.sea import SeaParams, dissipative_part, hermitize, unitary_rhs
from scripts.logger import logger

SCHEMES = ("lawson", "rk4")
EVOLUTIONS = ("sea", "unitary")
POSITIVITY_POLICIES = ("clip", "abort")

# Clipped eigenvalues below this magnitude are round-off and not reported
CLIP_REPORT_LEVEL = 1e-12

# Reported times t/tau are rounded to this many decimals
TIME_DECIMALS = 12


class NumericalAbort(ArithmeticError):
    """The state left the physical region. ``record`` keeps whatever was
    sampled before the abort."""

    def __init__(self, message: str, record: "TrajectoryRecord | None" = None):
        super().__init__(message)
        self.record = record


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 30.0
    stride: int = 100
    trace_tol: float = 1e-8
    positivity_tol: float = 1e-8
    leakage_tol: float = 1e-6
    step_doubling: bool = False
    local_error_tol: float = 1e-8
    scheme: str = "lawson"
    snapshot_times: tuple[float, ...] = ()
    positivity_policy: str = "clip"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_max < 0:
            raise ValueError(f"t_max must be non-negative, got {self.t_max}")
        if self.stride < 1:
            raise ValueError(f"stride must be at least 1, got {self.stride}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"Unknown scheme '{self.scheme}', expected one of {SCHEMES}")
        if self.positivity_policy not in POSITIVITY_POLICIES:
            raise ValueError(
                f"Unknown positivity policy '{self.positivity_policy}', "
                f"expected one of {POSITIVITY_POLICIES}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def time_of(self, step: int) -> float:
        return round(step * self.dt, TIME_DECIMALS)

    def is_sample(self, step: int) -> bool:
        return step % self.stride == 0 or step == self.n_steps

    def snapshot_steps(self) -> set[int]:
        """Steps at which the full state is kept: always the first and last."""
        steps = {0, self.n_steps}
        steps.update(
            int(round(t / self.dt)) for t in self.snapshot_times if 0 <= t <= self.t_max
        )
        return steps


@dataclass(frozen=True)
class StepDiagnostics:
    trace_error: float = 0.0
    hermiticity_error: float = 0.0
    leakage: float = 0.0
    min_eigenvalue: float = np.inf
    energy_drift: float = 0.0
    gram_degenerate_count: int = 0
    # Total weight of the negative eigenvalues removed by clipping
    clipped_weight: float = 0.0

    def merge(self, other: "StepDiagnostics") -> "StepDiagnostics":
        """Aggregates a stride window: maxima of the errors, minimum of the
        smallest eigenvalue, totals of the degenerate events and clipped weight."""
        return StepDiagnostics(
            trace_error=max(self.trace_error, other.trace_error),
            hermiticity_error=max(self.hermiticity_error, other.hermiticity_error),
            leakage=max(self.leakage, other.leakage),
            min_eigenvalue=min(self.min_eigenvalue, other.min_eigenvalue),
            energy_drift=other.energy_drift,
            gram_degenerate_count=self.gram_degenerate_count + other.gram_degenerate_count,
            clipped_weight=self.clipped_weight + other.clipped_weight,
        )

    def as_row(self) -> dict:
        return {
            "trace_err": self.trace_error,
            "leakage": self.leakage,
            "energy_drift": self.energy_drift,
            "min_eigenvalue": self.min_eigenvalue,
            "hermiticity_err": self.hermiticity_error,
            "gram_degenerate": self.gram_degenerate_count,
            "clipped_weight": self.clipped_weight,
        }


@dataclass
class TrajectoryRecord:
    rows: list[dict] = field(default_factory=list)
    snapshots: dict[float, np.ndarray] = field(default_factory=dict)
    final_state: np.ndarray | None = None
    final_time: float = 0.0
    completed: bool = False

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)


class Sampler(Protocol):
    def __call__(self, time: float, rho: np.ndarray, diagnostics: StepDiagnostics) -> dict:
        ...


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], rho: np.ndarray, dt: float) -> np.ndarray:
    """Classical four-stage Runge-Kutta step."""
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * dt * k1)
    k3 = rhs(rho + 0.5 * dt * k2)
    k4 = rhs(rho + dt * k3)

    return rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class Propagator:
    """Conjugation X -> e^{-iHs} X e^{iHs}, the unitaries cached per step size."""

    def __init__(self, hamiltonian: np.ndarray):
        self._energies, self._modes = linalg.eigh(hamiltonian)
        self._cache: dict[float, np.ndarray] = {}

    def unitary(self, s: float) -> np.ndarray:
        if s not in self._cache:
            phases = np.exp(-1j * self._energies * s)
            self._cache[s] = (self._modes * phases) @ self._modes.conj().T

        return self._cache[s]

    def __call__(self, x: np.ndarray, s: float) -> np.ndarray:
        u = self.unitary(s)
        return u @ x @ u.conj().T


def lawson_step(
    dissipative: Callable[[np.ndarray], np.ndarray],
    propagator: Propagator,
    rho: np.ndarray,
    dt: float,
) -> np.ndarray:
    """
    Integrating-factor RK4 step for drho/dt = -i[H, rho] + L(rho).

    Args:
        dissipative: the non-unitary part L.
        propagator (Propagator): exact unitary flow of H.
        rho (np.ndarray): current state.
        dt (float): physical step.

    Returns: state after one step; exact when L vanishes.
    """
    half = partial(propagator, s=0.5 * dt)
    full = partial(propagator, s=dt)

    k1 = dissipative(rho)
    k2 = dissipative(half(rho + 0.5 * dt * k1))
    k3 = dissipative(half(rho) + 0.5 * dt * k2)
    k4 = dissipative(full(rho) + dt * half(k3))

    return full(rho + dt / 6 * k1) + dt / 3 * half(k2 + k3) + dt / 6 * k4


def step_doubled(
    step: Callable[[np.ndarray, float], np.ndarray], rho: np.ndarray, dt: float
) -> tuple[np.ndarray, float]:
    """Two half steps and the local error estimate ||full - halves||_F / 15."""
    full = step(rho, dt)
    halves = step(step(rho, 0.5 * dt), 0.5 * dt)

    return halves, float(np.linalg.norm(full - halves)) / 15


def rk4_step_doubled(
    rhs: Callable[[np.ndarray], np.ndarray], rho: np.ndarray, dt: float
) -> tuple[np.ndarray, float]:
    return step_doubled(partial(rk4_step, rhs), rho, dt)


def guard(
    rho: np.ndarray,
    projector: np.ndarray | None = None,
    positivity_tol: float = 1e-8,
    policy: str = "clip",
) -> tuple[np.ndarray, StepDiagnostics]:
    """
    Pulls a state back onto the physical set and reports each correction.

    Negative eigenvalues are set to zero, the B ln convention for the kernel.
    With ``policy="abort"`` an eigenvalue below -positivity_tol raises instead.
    Clipping then renormalizing moves the energy by at most
    2 * clipped_weight * ||H||.

    Args:
        rho (np.ndarray): state after a step.
        projector (np.ndarray): sector projector, None for the full space.
        positivity_tol (float): most negative eigenvalue repaired under "abort".
        policy (str): "clip" or "abort".

    Returns: (repaired state, StepDiagnostics)
    """
    if policy not in POSITIVITY_POLICIES:
        raise ValueError(
            f"Unknown positivity policy '{policy}', expected one of {POSITIVITY_POLICIES}"
        )
    if not np.all(np.isfinite(rho)):
        raise NumericalAbort("Non-finite entries in the state")

    hermiticity_error = float(np.linalg.norm(rho - rho.conj().T))
    rho = hermitize(rho)

    leakage = 0.0
    if projector is not None:
        projected = projector @ rho @ projector
        leakage = float(np.linalg.norm(rho - projected))
        rho = projected

    trace_error = abs(float(np.real(np.trace(rho))) - 1)

    weights, vectors = linalg.eigh(rho)
    min_eigenvalue = float(weights.min())

    if policy == "abort" and min_eigenvalue < -positivity_tol:
        raise NumericalAbort(
            f"positivity violated: min eigenvalue {min_eigenvalue:.3e} below "
            f"-{positivity_tol:g}"
        )

    clipped_weight = 0.0
    if min_eigenvalue < 0:
        clipped_weight = float(-weights[weights < 0].sum())
        weights = np.clip(weights, 0, None)
        rho = (vectors * weights) @ vectors.conj().T

    rho = rho / float(np.real(np.trace(rho)))

    return rho, StepDiagnostics(
        trace_error=trace_error,
        hermiticity_error=hermiticity_error,
        leakage=leakage,
        min_eigenvalue=min_eigenvalue,
        clipped_weight=clipped_weight,
    )


class Generator:
    """
    Right-hand side of one trajectory. Counts the degenerate Gram events met
    since the last call to ``take_degenerate``.
    """

    def __init__(
        self,
        evolution: str,
        hamiltonian: np.ndarray,
        params: SeaParams,
        projector: np.ndarray | None = None,
    ):
        if evolution not in EVOLUTIONS:
            raise ValueError(f"Unknown evolution '{evolution}', expected one of {EVOLUTIONS}")

        self.evolution = evolution
        self.hamiltonian = hamiltonian
        self.params = params
        self.projector = projector
        self._degenerate = 0

    @property
    def is_dissipative(self) -> bool:
        return self.evolution == "sea" and self.params.dissipation_scale != 0

    def dissipative(self, rho: np.ndarray) -> np.ndarray:
        if not self.is_dissipative:
            return np.zeros_like(rho)

        total, terms = dissipative_part(rho, self.hamiltonian, self.params, self.projector)
        self._degenerate += sum(term.multipliers.degenerate for term in terms)

        return -total

    def full(self, rho: np.ndarray) -> np.ndarray:
        return unitary_rhs(rho, self.hamiltonian) + self.dissipative(rho)

    def take_degenerate(self) -> int:
        count, self._degenerate = self._degenerate, 0
        return count


def _stepper(generator: Generator, scheme: str) -> Callable[[np.ndarray, float], np.ndarray]:
    if scheme == "lawson":
        return partial(lawson_step, generator.dissipative, Propagator(generator.hamiltonian))

    return partial(rk4_step, generator.full)


def _default_sampler(time: float, rho: np.ndarray, diagnostics: StepDiagnostics) -> dict:
    return {"t_over_tau": time} | diagnostics.as_row()


def evolve(
    rho0: np.ndarray,
    evolution: str,
    cfg: IntegratorConfig,
    hamiltonian: np.ndarray,
    params: SeaParams = SeaParams(),
    projector: np.ndarray | None = None,
    sampler: Sampler | None = None,
) -> TrajectoryRecord:
    """
    Integrates from rho0 up to t_max (in units of tau) and samples every
    ``cfg.stride`` steps and at the final step.

    Args:
        rho0 (np.ndarray): initial state, physical and in the sector.
        evolution (str): "sea" or "unitary".
        cfg (IntegratorConfig): step, horizon, tolerances and scheme.
        hamiltonian (np.ndarray): H_a, or the full H without a projector.
        params (SeaParams): relaxation times and cutoffs.
        projector (np.ndarray): sector projector, None for the full space.
        sampler: called with (t/tau, rho, window diagnostics), returns a row.

    Returns: TrajectoryRecord. A guard failure raises NumericalAbort carrying
             the partial record.
    """
    generator = Generator(evolution, hamiltonian, params, projector)
    step = _stepper(generator, cfg.scheme)
    sampler = sampler or _default_sampler

    h = cfg.dt * params.tau
    n_steps = cfg.n_steps
    snapshot_steps = cfg.snapshot_steps()
    record = TrajectoryRecord()

    guard_state = partial(
        guard,
        projector=projector,
        positivity_tol=cfg.positivity_tol,
        policy=cfg.positivity_policy,
    )

    rho, window = guard_state(np.asarray(rho0, dtype=complex))
    energy0 = float(np.real(np.trace(rho @ hamiltonian)))
    clipped_total = 0.0
    clipping_reported = False

    logger.info(
        f"Evolving {evolution} ({cfg.scheme}) for {n_steps} steps of dt={cfg.dt:g} tau"
    )

    for k in range(n_steps + 1):
        if k > 0:
            try:
                if cfg.step_doubling:
                    new, error = step_doubled(step, rho, h)
                    if error > cfg.local_error_tol:
                        raise NumericalAbort(
                            f"local error estimate {error:.3e} above {cfg.local_error_tol:g}"
                        )
                else:
                    new = step(rho, h)
                rho, diagnostics = guard_state(new)
            except NumericalAbort as abort:
                record.final_state, record.final_time = rho, cfg.time_of(k - 1)
                raise NumericalAbort(f"{abort} at t/tau={cfg.time_of(k):g}", record) from abort

            diagnostics = replace(diagnostics, gram_degenerate_count=generator.take_degenerate())
            window = window.merge(diagnostics)

        time = cfg.time_of(k)

        if k in snapshot_steps:
            record.snapshots[time] = rho.copy()

        if cfg.is_sample(k):
            energy = float(np.real(np.trace(rho @ hamiltonian)))
            window = replace(window, energy_drift=energy - energy0)
            _check_window(window, cfg, time)

            if window.min_eigenvalue < -CLIP_REPORT_LEVEL and not clipping_reported:
                logger.warning(
                    f"Eigenvalue {window.min_eigenvalue:.3e} clipped to zero before "
                    f"t/tau={time:g}; later clipping is summarized at the end"
                )
                clipping_reported = True
            clipped_total += window.clipped_weight

            row = sampler(time, rho, window)
            record.rows.append(row)
            logger.debug(f"t/tau={time:g} {row}")

            window = StepDiagnostics()

    if clipping_reported:
        logger.warning(f"Clipped a total eigenvalue weight of {clipped_total:.3e} over the run")

    record.final_state, record.final_time = rho, cfg.time_of(n_steps)
    record.completed = True

    return record


def _check_window(window: StepDiagnostics, cfg: IntegratorConfig, time: float) -> None:
    if window.gram_degenerate_count:
        logger.warning(
            f"{window.gram_degenerate_count} degenerate Gram matrices before t/tau={time:g}"
        )
    if window.trace_error > cfg.trace_tol:
        logger.warning(f"Trace error {window.trace_error:.3e} above tolerance at t/tau={time:g}")
    if window.leakage > cfg.leakage_tol:
        logger.warning(f"Sector leakage {window.leakage:.3e} above tolerance at t/tau={time:g}")

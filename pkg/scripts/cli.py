"""
Command line entry point of the ``sea-walk`` program.

    sea-walk run --config <path> --out <dir>
    sea-walk sweep --config <path> --regimes FI,HI,CHI,FIFH --strengths 0.1,1,10
                   --evolutions sea,unitary --out <dir>
    sea-walk regimes

Exit codes: 0 ok, 2 configuration error, 3 numerical abort.
"""

import argparse
import sys
import time
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from scripts import __version__
from scripts.config import ConfigError, Paths, SimulationConfig, parse_config, validate
from scripts.dynamics.integrator import NumericalAbort, TrajectoryRecord, evolve
from scripts.dynamics.sea import SeaParams
from scripts.logger import add_file_handler, logger, remove_handler
from scripts.observables.observables import (
    OBSERVABLE_COLUMNS,
    ObservableSampler,
    joint_probability,
    late_time_summary,
)
from scripts.quantum_walk.graph import ring_graph
from scripts.quantum_walk.hamiltonian import (
    REGIME_KINDS,
    STRENGTH_PRESETS,
    InteractionParams,
    Regime,
    classify_alphas,
    project_antisym,
    regime_alphas,
    regime_table,
    total_hamiltonian,
)
from scripts.quantum_walk.hilbert import antisym_projector
from scripts.quantum_walk.state import perturbed_initial_state
from scripts.tools import matrix_to_long, update_json, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 2, 3


@dataclass(frozen=True)
class Simulation:
    interaction: InteractionParams
    hamiltonian: np.ndarray
    projector: np.ndarray
    rho0: np.ndarray
    params: SeaParams


def build_simulation(cfg: SimulationConfig) -> Simulation:
    """Ring, sector Hamiltonian H_a and initial state of one run."""
    graph = ring_graph(cfg.n_sites)
    interaction = regime_alphas(cfg.regime_spec(), t=cfg.hopping_a, s=cfg.hopping_b)
    projector = antisym_projector(cfg.n_sites)

    return Simulation(
        interaction=interaction,
        hamiltonian=project_antisym(total_hamiltonian(interaction, graph), projector),
        projector=projector,
        rho0=perturbed_initial_state(cfg.initial_state_spec(), cfg.n_sites),
        params=cfg.sea_params(),
    )


def cell_name(regime: str, strength: float, evolution: str) -> str:
    return f"{regime}_{strength:g}_{evolution}"


def _diagnostics_summary(frame: pd.DataFrame) -> dict:
    if frame.empty:
        return {"n_samples": 0}

    return {
        "n_samples": len(frame),
        "max_trace_err": frame["trace_err"].max(),
        "max_leakage": frame["leakage"].max(),
        "max_abs_energy_drift": frame["energy_drift"].abs().max(),
        "max_hermiticity_err": frame["hermiticity_err"].max(),
        "min_eigenvalue": frame["min_eigenvalue"].min(),
        "gram_degenerate_events": int(frame["gram_degenerate"].sum()),
        "clipped_weight_total": frame["clipped_weight"].sum(),
    }


def _write_outputs(
    record: TrajectoryRecord, sampler: ObservableSampler, cfg: SimulationConfig, out: Path
) -> list[str]:
    """Writes the tables of one trajectory and returns the file names."""
    written = []

    def save(df: pd.DataFrame, name: str) -> None:
        write_csv(df, out / name)
        written.append(name)
        logger.info(f"Wrote {out / name}")

    save(record.to_frame().reindex(columns=OBSERVABLE_COLUMNS), "observables.csv")

    if 0.0 in record.snapshots:
        save(matrix_to_long(joint_probability(record.snapshots[0.0]).matrix, 0.0), "jpd_t0.csv")

    if record.final_state is not None:
        final = joint_probability(record.final_state, record.final_time)
        save(matrix_to_long(final.matrix, final.time), "jpd_tfinal.csv")

    if cfg.snapshot_times:
        snapshots = [
            matrix_to_long(joint_probability(state).matrix, t)
            for t, state in sorted(record.snapshots.items())
        ]
        save(pd.concat(snapshots, ignore_index=True), "jpd_snapshots.csv")

    save(sampler.marginals_frame(), "marginals.csv")

    return written


def run(cfg: SimulationConfig, out_dir: str | Path) -> dict:
    """
    Runs one trajectory and writes its outputs and manifest.

    Args:
        cfg (SimulationConfig): validated configuration.
        out_dir: output directory, created if missing.

    Returns: the manifest dict. ``status`` is "aborted" when the integrator
             stopped early; the files then hold the samples taken so far.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    handler = add_file_handler(out / "run.log")
    started = time.perf_counter()

    try:
        logger.info(
            f"Run {cell_name(cfg.regime, cfg.strength, cfg.evolution)} (N={cfg.n_sites}, "
            f"eps={cfg.epsilon:g}, t_max={cfg.t_max:g}) into {out}"
        )
        sim = build_simulation(cfg)
        sampler = ObservableSampler(
            sim.rho0, sim.hamiltonian, sim.params, sim.projector, cfg.evolution
        )

        status, error = "ok", None
        try:
            record = evolve(
                sim.rho0,
                cfg.evolution,
                cfg.integrator_config(),
                sim.hamiltonian,
                sim.params,
                sim.projector,
                sampler,
            )
        except NumericalAbort as abort:
            record = abort.record or TrajectoryRecord()
            status, error = "aborted", str(abort)
            logger.error(f"Numerical abort: {abort}")

        files = _write_outputs(record, sampler, cfg, out)
        frame = record.to_frame()

        summary = (
            late_time_summary(frame, cfg.moving_average_window, cfg.late_time_fraction)
            if not frame.empty
            else {}
        )

        manifest = {
            "status": status,
            "error": error,
            "partial": status != "ok",
            "version": __version__,
            "config": cfg.to_dict(),
            "alphas": list(sim.interaction.alphas),
            "regime_class": classify_alphas(sim.interaction.alphas, preferred=cfg.regime),
            "wall_time_s": round(time.perf_counter() - started, 3),
            "diagnostics": _diagnostics_summary(frame),
            "summary": summary,
            "outputs": files + ["manifest.json", "run.log"],
        }
        update_json(out / "manifest.json", manifest)
        logger.info(f"Run finished with status '{status}' in {manifest['wall_time_s']}s")
    finally:
        remove_handler(handler)

    return manifest


def run_cell(cfg: SimulationConfig, out_dir: Path) -> dict:
    """One sweep cell; failures are reported in the returned row, never raised."""
    name = cell_name(cfg.regime, cfg.strength, cfg.evolution)
    row = {"regime": cfg.regime, "strength": cfg.strength, "evolution": cfg.evolution}

    try:
        manifest = run(cfg, out_dir / name)
    except Exception as error:
        logger.warning(f"Sweep cell {name} failed: {error}")
        return row | {"status": "failed", "error": str(error)}

    if manifest["status"] != "ok":
        logger.warning(f"Sweep cell {name} aborted: {manifest['error']}")

    return row | {"status": manifest["status"], "error": manifest["error"]} | manifest["summary"]


def _add_loschmidt_gap(summary: pd.DataFrame) -> pd.DataFrame:
    """Late-time unitary minus SEA Loschmidt echo per (regime, strength)."""
    if not {"sea", "unitary"} <= set(summary["evolution"]) or "loschmidt" not in summary:
        return summary

    gap = (
        summary.pivot_table(
            index=["regime", "strength"], columns="evolution", values="loschmidt"
        )
        .reindex(columns=["sea", "unitary"])
        .pipe(lambda df: (df["unitary"] - df["sea"]).rename("loschmidt_gap"))
        .reset_index()
    )

    return summary.merge(gap, on=["regime", "strength"], how="left")


def sweep(
    cfg: SimulationConfig,
    regimes: list[str],
    strengths: list[float],
    evolutions: list[str],
    out_dir: str | Path,
) -> pd.DataFrame:
    """
    Runs every (regime, strength, evolution) combination into its own
    directory and writes summary.csv.

    Args:
        cfg (SimulationConfig): base configuration shared by all cells.
        regimes, strengths, evolutions: the axes of the sweep.
        out_dir: parent directory of the cell directories.

    Returns: pd.DataFrame, one row per cell in sweep order.
    """
    for key, values in (("regimes", regimes), ("strengths", strengths), ("evolutions", evolutions)):
        if not values:
            raise ConfigError(key, "empty list")

    cells = [
        validate(replace(cfg, regime=r, strength=s, evolution=e))
        for r, s, e in product(regimes, strengths, evolutions)
    ]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    logger.info(f"Sweep of {len(cells)} cells with n_jobs={cfg.n_jobs} into {out}")

    rows = Parallel(n_jobs=cfg.n_jobs)(delayed(run_cell)(cell, out) for cell in cells)

    summary = _add_loschmidt_gap(pd.DataFrame(rows))
    write_csv(summary, out / "summary.csv")
    logger.info(f"Wrote {out / 'summary.csv'}")

    return summary


def regimes(strength: float = 10.0, fixed_hopping: float = 0.1) -> pd.DataFrame:
    """The regime presets with the alpha values they take at ``strength``."""
    values = {
        kind: regime_alphas(Regime(kind, strength, fixed_hopping)).alphas
        for kind in REGIME_KINDS
    }

    return regime_table().assign(
        values=lambda df: df["regime"].map(lambda kind: ", ".join(f"{a:g}" for a in values[kind]))
    )


def _split(text: str) -> list[str]:
    return [token.strip() for token in text.split(",") if token.strip()]


def _strength(token: str) -> float:
    if token.lower() in STRENGTH_PRESETS:
        return STRENGTH_PRESETS[token.lower()]
    try:
        return float(token)
    except ValueError:
        raise ConfigError("strengths", f"not a number or preset: '{token}'") from None


def _load(path: str | None) -> SimulationConfig:
    return parse_config(path) if path else SimulationConfig()


def _cmd_run(args) -> int:
    manifest = run(_load(args.config), args.out)
    return EXIT_OK if manifest["status"] == "ok" else EXIT_ABORT


def _cmd_sweep(args) -> int:
    summary = sweep(
        _load(args.config),
        [kind.upper() for kind in _split(args.regimes)],
        [_strength(token) for token in _split(args.strengths)],
        [evolution.lower() for evolution in _split(args.evolutions)],
        args.out,
    )
    return EXIT_OK if (summary["status"] == "ok").all() else EXIT_ABORT


def _cmd_regimes(args) -> int:
    print(regimes(args.strength, args.fixed_hopping).to_string(index=False))
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sea-walk",
        description="Two fermionic quantum walkers on a ring under unitary and SEA dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run one trajectory")
    run_parser.add_argument("--config", help="JSON configuration (defaults when omitted)")
    run_parser.add_argument("--out", default=str(Paths.output / "run"))
    run_parser.set_defaults(handler=_cmd_run)

    sweep_parser = commands.add_parser("sweep", help="run a regime/strength/evolution grid")
    sweep_parser.add_argument("--config", help="base JSON configuration")
    sweep_parser.add_argument("--regimes", default="FI,HI,CHI,FIFH")
    sweep_parser.add_argument("--strengths", default="10")
    sweep_parser.add_argument("--evolutions", default="sea,unitary")
    sweep_parser.add_argument("--out", default=str(Paths.output / "sweep"))
    sweep_parser.set_defaults(handler=_cmd_sweep)

    regimes_parser = commands.add_parser("regimes", help="print the interaction regimes")
    regimes_parser.add_argument("--strength", type=float, default=10.0)
    regimes_parser.add_argument("--fixed-hopping", type=float, default=0.1)
    regimes_parser.set_defaults(handler=_cmd_regimes)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)

    try:
        return args.handler(args)
    except ConfigError as error:
        logger.error(f"Configuration error: {error}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

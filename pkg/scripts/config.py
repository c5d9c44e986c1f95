import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from scripts.dynamics.integrator import EVOLUTIONS, POSITIVITY_POLICIES, SCHEMES, IntegratorConfig
from scripts.dynamics.sea import SeaParams
from scripts.quantum_walk.hamiltonian import REGIME_KINDS, STRENGTH_PRESETS, Regime
from scripts.quantum_walk.state import InitialStateSpec


class Paths:
    """Class to store the paths to the config and output folders."""

    project = Path(__file__).resolve().parent.parent
    configs = project / "configs"
    output = project / "output"
    scripts = project / "scripts"


class ConfigError(ValueError):
    """Invalid run configuration. ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimulationConfig:
    n_sites: int = 11
    epsilon: float = 0.95
    init_sites: tuple[int, int] = (5, 6)
    regime: str = "NONE"
    strength: float = 0.0
    fixed_hopping: float = 0.1
    hopping_a: float = 1.0
    hopping_b: float = 1.0
    evolution: str = "sea"
    tau_a: float = 1.0
    tau_b: float = 1.0
    dt: float = 1e-3
    t_max: float = 30.0
    stride: int = 100
    cutoff_eig: float = 1e-12
    cutoff_gram: float = 1e-12
    trace_tol: float = 1e-8
    positivity_tol: float = 1e-8
    leakage_tol: float = 1e-6
    step_doubling: bool = False
    local_error_tol: float = 1e-8
    scheme: str = "lawson"
    positivity_policy: str = "clip"
    snapshot_times: tuple[float, ...] = ()
    moving_average_window: int = 50
    late_time_fraction: float = 0.2
    n_jobs: int = 1

    def to_dict(self) -> dict:
        return {
            key: list(value) if isinstance(value, tuple) else value
            for key, value in asdict(self).items()
        }

    def regime_spec(self) -> Regime:
        return Regime(kind=self.regime, strength=self.strength, fixed_hopping=self.fixed_hopping)

    def initial_state_spec(self) -> InitialStateSpec:
        return InitialStateSpec(*self.init_sites, epsilon=self.epsilon)

    def sea_params(self) -> SeaParams:
        return SeaParams(
            tau_a=self.tau_a,
            tau_b=self.tau_b,
            cutoff_eig=self.cutoff_eig,
            cutoff_gram=self.cutoff_gram,
        )

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            dt=self.dt,
            t_max=self.t_max,
            stride=self.stride,
            trace_tol=self.trace_tol,
            positivity_tol=self.positivity_tol,
            leakage_tol=self.leakage_tol,
            step_doubling=self.step_doubling,
            local_error_tol=self.local_error_tol,
            scheme=self.scheme,
            snapshot_times=self.snapshot_times,
            positivity_policy=self.positivity_policy,
        )


_DEFAULTS = {f.name: f.default for f in fields(SimulationConfig)}


def _number(key: str, value, kind: type):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind is int:
        if value != int(value):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)

    return float(value)


def _coerce(key: str, value):
    """Casts a raw JSON value to the type of the field's default."""
    default = _DEFAULTS[key]

    if key == "strength" and isinstance(value, str):
        if value.lower() not in STRENGTH_PRESETS:
            raise ConfigError(
                key, f"unknown preset '{value}', expected one of {list(STRENGTH_PRESETS)}"
            )
        return STRENGTH_PRESETS[value.lower()]

    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true or false, got {value!r}")
        return value

    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value.upper() if key == "regime" else value.lower()

    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(key, f"expected a list, got {value!r}")
        kind = int if key == "init_sites" else float
        return tuple(_number(f"{key}[{i}]", item, kind) for i, item in enumerate(value))

    return _number(key, value, type(default))


def validate(cfg: SimulationConfig) -> SimulationConfig:
    """Range checks across all keys. Raises ConfigError naming the key."""
    checks = [
        ("n_sites", cfg.n_sites >= 3, "a ring needs at least 3 sites"),
        ("epsilon", 0 <= cfg.epsilon <= 1, "must lie in [0, 1]"),
        ("init_sites", len(cfg.init_sites) == 2, "expected two sites"),
        ("regime", cfg.regime in REGIME_KINDS, f"expected one of {REGIME_KINDS}"),
        ("strength", cfg.strength >= 0, "must be non-negative"),
        ("fixed_hopping", cfg.fixed_hopping >= 0, "must be non-negative"),
        ("hopping_a", cfg.hopping_a >= 0, "must be non-negative"),
        ("hopping_b", cfg.hopping_b >= 0, "must be non-negative"),
        ("evolution", cfg.evolution in EVOLUTIONS, f"expected one of {EVOLUTIONS}"),
        ("tau_a", cfg.tau_a > 0, "must be positive"),
        ("tau_b", cfg.tau_b > 0, "must be positive"),
        ("dt", cfg.dt > 0, "must be positive"),
        ("t_max", cfg.t_max >= 0, "must be non-negative"),
        ("stride", cfg.stride >= 1, "must be at least 1"),
        ("cutoff_eig", cfg.cutoff_eig > 0, "must be positive"),
        ("cutoff_gram", cfg.cutoff_gram > 0, "must be positive"),
        ("trace_tol", cfg.trace_tol > 0, "must be positive"),
        ("positivity_tol", cfg.positivity_tol > 0, "must be positive"),
        ("leakage_tol", cfg.leakage_tol > 0, "must be positive"),
        ("local_error_tol", cfg.local_error_tol > 0, "must be positive"),
        ("scheme", cfg.scheme in SCHEMES, f"expected one of {SCHEMES}"),
        (
            "positivity_policy",
            cfg.positivity_policy in POSITIVITY_POLICIES,
            f"expected one of {POSITIVITY_POLICIES}",
        ),
        ("moving_average_window", cfg.moving_average_window >= 1, "must be at least 1"),
        ("late_time_fraction", 0 < cfg.late_time_fraction <= 1, "must lie in (0, 1]"),
        ("n_jobs", cfg.n_jobs != 0, "must be non-zero (-1 uses every core)"),
    ]

    for key, ok, message in checks:
        if not ok:
            raise ConfigError(key, f"{message}, got {getattr(cfg, key)!r}")

    for i, site in enumerate(cfg.init_sites):
        if not 0 <= site < cfg.n_sites:
            raise ConfigError(f"init_sites[{i}]", f"site {site} outside 0..{cfg.n_sites - 1}")
    if cfg.init_sites[0] == cfg.init_sites[1]:
        raise ConfigError("init_sites", "the two walkers must start on different sites")

    for i, time in enumerate(cfg.snapshot_times):
        if not 0 <= time <= cfg.t_max:
            raise ConfigError(f"snapshot_times[{i}]", f"{time} outside [0, t_max]")

    return cfg


def config_from_dict(data: dict) -> SimulationConfig:
    """Builds a validated config from a flat mapping; missing keys take defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config", f"expected a JSON object, got {type(data).__name__}")

    unknown = sorted(set(data) - set(_DEFAULTS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")

    values = {key: _coerce(key, value) for key, value in data.items()}

    return validate(SimulationConfig(**values))


def parse_config(path: str | Path) -> SimulationConfig:
    """
    Reads a JSON run configuration. An empty file gives the default run.

    Args:
        path: JSON file with flat keys.

    Returns: validated SimulationConfig.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")

    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return SimulationConfig()

    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError("config", f"invalid JSON ({error})") from error

    return config_from_dict(data)

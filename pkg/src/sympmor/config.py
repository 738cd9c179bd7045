"""Run configuration: YAML schema, validation, defaults, resolution.

The schema has four sections.  Unknown keys anywhere are rejected.

model:
    nx, ny            lattice cells (int, nx >= 2, ny >= 1)
    length            beam length in meters
    density           kg/m^3
    forcing           constant_tip | sinusoidal_tip
    amplitude         tip load in units of the total weight
    frequency         cycles per non-dimensional time unit; null means
                      one load cycle over the time window
    include_gravity   bool
design:
    train_grid        points per parameter axis (grid size squared)
    n_test            number of random test parameters
    seed              RNG seed for the test draws
    t0, t_end         window in seconds
    nt                time steps (grid points)
    sweep             list of even basis sizes
methods:              list of basis generator names
output:               output directory
jobs:                 worker threads for the experiment cells
tolerances:
    drift             Hamiltonian preservation threshold
"""

import copy

import yaml

from .basis import METHODS
from .models import CantileverLattice, REF_TIME, standard_design

__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG",
    "load_config",
    "resolve_config",
    "dump_config",
    "build_family",
    "build_design",
]


class ConfigError(ValueError):
    """Configuration file fails schema validation."""


DEFAULT_CONFIG = {
    "model": {
        "nx": 30,
        "ny": 3,
        "length": 1.0,
        "density": 7856.0,
        "forcing": "sinusoidal_tip",
        "amplitude": 1.0,
        "frequency": None,
        "include_gravity": True,
        "tip_preload": 1.0,
    },
    "design": {
        "train_grid": 3,
        "n_test": 16,
        "seed": 190331,
        "t0": 0.0,
        "t_end": 7.2e-2,
        "nt": 151,
        "sweep": list(range(10, 81, 10)),
    },
    "methods": [
        "pod_full",
        "pod_separate",
        "psd_cotangent_lift",
        "pod_of_ys",
        "psd_complex_svd",
        "psd_greedy",
        "psd_svd_like",
    ],
    "output": "out",
    "jobs": 1,
    "tolerances": {
        "drift": 1e-10,
    },
}

_SCALAR_TYPES = {
    ("model", "nx"): int,
    ("model", "ny"): int,
    ("model", "length"): float,
    ("model", "density"): float,
    ("model", "forcing"): str,
    ("model", "amplitude"): float,
    ("model", "include_gravity"): bool,
    ("model", "tip_preload"): float,
    ("design", "train_grid"): int,
    ("design", "n_test"): int,
    ("design", "seed"): int,
    ("design", "t0"): float,
    ("design", "t_end"): float,
    ("design", "nt"): int,
    ("output", None): str,
    ("jobs", None): int,
    ("tolerances", "drift"): float,
}


def _reject_unknown(section_name, given, allowed):
    unknown = set(given) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown keys in {section_name}: {sorted(unknown)}"
        )


def _coerce(path, value, target):
    if target is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean")
        return value
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer")
        return value
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        return float(value)
    if target is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string")
        return value
    raise ConfigError(f"{path}: unsupported type")


def resolve_config(raw=None):
    """Merge a raw mapping over the defaults and validate everything."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ConfigError("top level of the config must be a mapping")
    _reject_unknown("top level", raw, cfg)

    for section in ("model", "design", "tolerances"):
        sub = raw.get(section, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"{section} must be a mapping")
        _reject_unknown(section, sub, cfg[section])
        cfg[section].update(sub)
    for key in ("methods", "output", "jobs"):
        if key in raw:
            cfg[key] = raw[key]

    for (section, key), target in _SCALAR_TYPES.items():
        if key is None:
            cfg[section] = _coerce(section, cfg[section], target)
        else:
            cfg[section][key] = _coerce(
                f"{section}.{key}", cfg[section][key], target
            )

    freq = cfg["model"]["frequency"]
    if freq is not None:
        cfg["model"]["frequency"] = _coerce("model.frequency", freq, float)
        if cfg["model"]["frequency"] <= 0:
            raise ConfigError("model.frequency must be positive")

    if cfg["model"]["forcing"] not in ("constant_tip", "sinusoidal_tip"):
        raise ConfigError(
            f"model.forcing {cfg['model']['forcing']!r} unknown"
        )
    if cfg["model"]["nx"] < 2 or cfg["model"]["ny"] < 1:
        raise ConfigError("model.nx must be >= 2 and model.ny >= 1")

    sweep = cfg["design"]["sweep"]
    if not isinstance(sweep, (list, tuple)) or not sweep:
        raise ConfigError("design.sweep must be a non-empty list")
    for v in sweep:
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0 or v % 2:
            raise ConfigError("design.sweep entries must be positive even "
                              "integers")
    cfg["design"]["sweep"] = sorted(int(v) for v in sweep)
    if cfg["design"]["nt"] < 2:
        raise ConfigError("design.nt must be at least 2")
    if cfg["design"]["t_end"] <= cfg["design"]["t0"]:
        raise ConfigError("design.t_end must exceed design.t0")
    if cfg["design"]["train_grid"] < 1 or cfg["design"]["n_test"] < 1:
        raise ConfigError("design.train_grid and design.n_test must be >= 1")

    if not isinstance(cfg["methods"], (list, tuple)) or not cfg["methods"]:
        raise ConfigError("methods must be a non-empty list")
    unknown = [m for m in cfg["methods"] if m not in METHODS]
    if unknown:
        raise ConfigError(
            f"unknown methods {unknown}; choose from {sorted(METHODS)}"
        )
    cfg["methods"] = list(cfg["methods"])

    if cfg["jobs"] < 1:
        raise ConfigError("jobs must be >= 1")

    # Dimension bound on the sweep.
    n_free = cfg["model"]["nx"] * (cfg["model"]["ny"] + 1)
    dim = 4 * n_free
    if cfg["design"]["sweep"][-1] > dim:
        raise ConfigError(
            f"sweep size {cfg['design']['sweep'][-1]} exceeds the phase "
            f"dimension {dim} of the configured lattice"
        )
    return cfg


def load_config(path=None):
    """Read and resolve a YAML config file (defaults when path is None)."""
    if path is None:
        return resolve_config({})
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return resolve_config(raw if raw is not None else {})


def dump_config(cfg, path):
    """Write the fully resolved config next to the outputs."""
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=True, default_flow_style=False)


def build_family(cfg):
    """Instantiate the lattice family described by the model section."""
    model = cfg["model"]
    design = cfg["design"]
    frequency = model["frequency"]
    if frequency is None:
        window = (design["t_end"] - design["t0"]) / REF_TIME
        frequency = 1.0 / window
    return CantileverLattice(
        nx=model["nx"], ny=model["ny"], length=model["length"],
        density=model["density"], tip_amplitude=model["amplitude"],
        forcing_kind=model["forcing"], forcing_frequency=frequency,
        include_gravity=model["include_gravity"],
        tip_preload=model["tip_preload"],
    )


def build_design(cfg):
    """Instantiate the experiment design described by the config."""
    d = cfg["design"]
    return standard_design(
        n_train_side=d["train_grid"], n_test=d["n_test"], seed=d["seed"],
        t0_seconds=d["t0"], t_end_seconds=d["t_end"], nt=d["nt"],
        sweep=tuple(d["sweep"]),
    )

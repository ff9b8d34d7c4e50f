"""JSON run-configuration schemas for the command-line pipeline.

One document per subcommand, strictly validated: unknown keys are rejected
with their dotted path, wrong types name the offending key, and seed lists
may be written either explicitly or as {"base", "count"} ranges. Dotted
``--set key=value`` overrides are applied to the raw document before
validation, with values parsed as JSON literals when possible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import InitialSpec
from .errors import ConfigError
from .kernel import BroadeningSpec
from .lattice import LatticeConfig
from .pme import PMEConfig
from .rng import check_seed

__all__ = [
    "SUBCOMMANDS",
    "EigenJob",
    "KernelJob",
    "TrajectoryJob",
    "EnsembleJob",
    "KineticJob",
    "PMEJob",
    "OhmJob",
    "ExponentJob",
    "load_config_file",
    "apply_overrides",
    "parse_job",
]

SUBCOMMANDS = ("eigen", "kernel", "micro", "kinetic", "pme", "ohm", "exponent")


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _as_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"config key {path or '<root>'} must be an object")
    return value


def _reject_unknown(doc: dict, allowed, path: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        listed = ", ".join(_join(path, k) for k in unknown)
        raise ConfigError(f"unknown config key(s): {listed}")


def _get(doc: dict, key: str, path: str, required: bool = True, default=None):
    if key in doc:
        return doc[key]
    if required:
        raise ConfigError(f"missing required config key {_join(path, key)}")
    return default


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {path} must be a number, got {value!r}")
    return float(value)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key {path} must be an integer, got {value!r}")
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"config key {path} must be a string, got {value!r}")
    return value


def _bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"config key {path} must be true or false, got {value!r}")
    return value


def _parse_lattice(value, path: str) -> LatticeConfig:
    doc = _as_mapping(value, path)
    _reject_unknown(doc, ("n_sites", "disorder_strength", "spacing", "boundary"), path)
    kwargs = {
        "n_sites": _int(_get(doc, "n_sites", path), _join(path, "n_sites")),
        "disorder_strength": _number(
            _get(doc, "disorder_strength", path), _join(path, "disorder_strength")
        ),
    }
    if "spacing" in doc:
        kwargs["spacing"] = _number(doc["spacing"], _join(path, "spacing"))
    if "boundary" in doc:
        kwargs["boundary"] = _string(doc["boundary"], _join(path, "boundary"))
    return LatticeConfig(**kwargs)


def _parse_broadening(value, path: str) -> BroadeningSpec:
    doc = _as_mapping(value, path)
    _reject_unknown(doc, ("kind", "width", "horizon"), path)
    kind = _string(_get(doc, "kind", path), _join(path, "kind"))
    width = doc.get("width")
    horizon = doc.get("horizon")
    if width is not None:
        width = _number(width, _join(path, "width"))
    if horizon is not None:
        horizon = _number(horizon, _join(path, "horizon"))
    return BroadeningSpec(kind=kind, width=width, horizon=horizon)


def _parse_pme(value, path: str) -> PMEConfig:
    doc = _as_mapping(value, path)
    _reject_unknown(doc, ("m", "k_min", "k_max", "n_cells", "diffusion_scale"), path)
    kwargs = {
        "m": _number(_get(doc, "m", path), _join(path, "m")),
        "k_min": _number(_get(doc, "k_min", path), _join(path, "k_min")),
        "k_max": _number(_get(doc, "k_max", path), _join(path, "k_max")),
        "n_cells": _int(_get(doc, "n_cells", path), _join(path, "n_cells")),
    }
    if "diffusion_scale" in doc:
        kwargs["diffusion_scale"] = _number(
            doc["diffusion_scale"], _join(path, "diffusion_scale")
        )
    return PMEConfig(**kwargs)


def _parse_seeds(value, path: str) -> tuple[int, ...]:
    if isinstance(value, list):
        if not value:
            raise ConfigError(f"config key {path} must not be an empty list")
        seeds = tuple(_int(v, f"{path}[{i}]") for i, v in enumerate(value))
    else:
        doc = _as_mapping(value, path)
        _reject_unknown(doc, ("base", "count"), path)
        base = _int(_get(doc, "base", path), _join(path, "base"))
        count = _int(_get(doc, "count", path), _join(path, "count"))
        if count < 1:
            raise ConfigError(f"config key {_join(path, 'count')} must be >= 1")
        seeds = tuple(range(base, base + count))
    for s in seeds:
        check_seed(s)
    return seeds


def _parse_times(value, path: str) -> tuple[float, ...]:
    if isinstance(value, list):
        times = tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    else:
        doc = _as_mapping(value, path)
        _reject_unknown(doc, ("start", "stop", "count", "spacing"), path)
        start = _number(_get(doc, "start", path), _join(path, "start"))
        stop = _number(_get(doc, "stop", path), _join(path, "stop"))
        count = _int(_get(doc, "count", path), _join(path, "count"))
        spacing = _string(
            _get(doc, "spacing", path, required=False, default="log"),
            _join(path, "spacing"),
        )
        if count < 2:
            raise ConfigError(f"config key {_join(path, 'count')} must be >= 2")
        if spacing == "log":
            if not start > 0:
                raise ConfigError(f"log-spaced {path} needs start > 0")
            times = tuple(float(t) for t in np.geomspace(start, stop, count))
        elif spacing == "linear":
            times = tuple(float(t) for t in np.linspace(start, stop, count))
        else:
            raise ConfigError(
                f"config key {_join(path, 'spacing')} must be 'log' or 'linear'"
            )
    if len(times) == 0:
        raise ConfigError(f"config key {path} must contain at least one time")
    if times[0] <= 0 or any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError(f"config key {path} must be positive and strictly increasing")
    return times


def _parse_initial(value, path: str, kinds) -> InitialSpec:
    doc = _as_mapping(value, path)
    _reject_unknown(doc, ("kind", "index", "center", "width", "amplitude"), path)
    kind = _string(_get(doc, "kind", path), _join(path, "kind"))
    if kind not in kinds:
        raise ConfigError(
            f"config key {_join(path, 'kind')} must be one of {sorted(kinds)}, got {kind!r}"
        )
    kwargs = {"kind": kind}
    if "index" in doc:
        kwargs["index"] = _int(doc["index"], _join(path, "index"))
    for name in ("center", "width", "amplitude"):
        if name in doc:
            kwargs[name] = _number(doc[name], _join(path, name))
    return InitialSpec(**kwargs)


def _parse_window(value, path: str) -> tuple[float, float] | None:
    if value is None:
        return None
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"config key {path} must be a [t_lo, t_hi] pair")
    lo = _number(value[0], f"{path}[0]")
    hi = _number(value[1], f"{path}[1]")
    if not lo < hi:
        raise ConfigError(f"config key {path} must have t_lo < t_hi")
    return (lo, hi)


@dataclass(frozen=True)
class EigenJob:
    lattice: LatticeConfig
    seed: int


@dataclass(frozen=True)
class KernelJob:
    lattice: LatticeConfig
    epsilon: float
    broadening: BroadeningSpec
    cutoff: int
    seeds: tuple[int, ...]
    symmetrize: bool
    enforce_min_size: bool


@dataclass(frozen=True)
class TrajectoryJob:
    lattice: LatticeConfig
    epsilon: float
    initial: InitialSpec
    seed: int
    dt: float
    n_steps: int
    record_every: int


@dataclass(frozen=True)
class EnsembleJob:
    lattice: LatticeConfig
    epsilon: float
    initial: InitialSpec
    seeds: tuple[int, ...]
    horizon: float
    dt: float
    draws_per_seed: int


@dataclass(frozen=True)
class KineticJob:
    kernel_dir: Path
    n_points: int
    initial: InitialSpec
    dt: float
    record_times: tuple[float, ...]


@dataclass(frozen=True)
class PMEJob:
    pme: PMEConfig
    initial_kind: str
    mass: float
    center: float
    width: float
    t0: float
    record_times: tuple[float, ...]
    safety: float


@dataclass(frozen=True)
class OhmJob:
    pme: PMEConfig
    electrode_at: float
    n_left_values: tuple[float, ...]


@dataclass(frozen=True)
class ExponentJob:
    series: Path
    x_column: str
    y_column: str
    window: tuple[float, float] | None


_COMMON_KEYS = ("out", "workers")


def load_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return _as_mapping(doc, "")


def apply_overrides(doc: dict, assignments) -> dict:
    """Apply dotted key=value pairs; values parse as JSON, else raw strings."""
    doc = json.loads(json.dumps(doc))  # deep copy, JSON types only
    for raw in assignments:
        if "=" not in raw:
            raise ConfigError(f"override {raw!r} must look like key=value")
        dotted, text = raw.split("=", 1)
        dotted = dotted.strip()
        if not dotted:
            raise ConfigError(f"override {raw!r} has an empty key")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        parts = dotted.split(".")
        target = doc
        for part in parts[:-1]:
            if part not in target:
                target[part] = {}
            target = target[part]
            if not isinstance(target, dict):
                raise ConfigError(
                    f"override {dotted!r} descends into non-object key {part!r}"
                )
        target[parts[-1]] = value
    return doc


def _parse_eigen(doc: dict) -> EigenJob:
    _reject_unknown(doc, ("lattice", "seed") + _COMMON_KEYS, "")
    seed = _int(_get(doc, "seed", ""), "seed")
    check_seed(seed)
    return EigenJob(lattice=_parse_lattice(_get(doc, "lattice", ""), "lattice"), seed=seed)


def _parse_kernel(doc: dict) -> KernelJob:
    _reject_unknown(
        doc,
        ("lattice", "epsilon", "broadening", "cutoff", "seeds", "symmetrize", "enforce_min_size")
        + _COMMON_KEYS,
        "",
    )
    return KernelJob(
        lattice=_parse_lattice(_get(doc, "lattice", ""), "lattice"),
        epsilon=_number(_get(doc, "epsilon", ""), "epsilon"),
        broadening=_parse_broadening(_get(doc, "broadening", ""), "broadening"),
        cutoff=_int(_get(doc, "cutoff", ""), "cutoff"),
        seeds=_parse_seeds(_get(doc, "seeds", ""), "seeds"),
        symmetrize=_bool(_get(doc, "symmetrize", "", required=False, default=False), "symmetrize"),
        enforce_min_size=_bool(
            _get(doc, "enforce_min_size", "", required=False, default=True),
            "enforce_min_size",
        ),
    )


def _parse_micro(doc: dict):
    task = _string(_get(doc, "task", ""), "task")
    if task == "trajectory":
        _reject_unknown(
            doc,
            ("task", "lattice", "epsilon", "initial", "seed", "dt", "n_steps", "record_every")
            + _COMMON_KEYS,
            "",
        )
        seed = _int(_get(doc, "seed", ""), "seed")
        check_seed(seed)
        n_steps = _int(_get(doc, "n_steps", ""), "n_steps")
        record_every = _int(_get(doc, "record_every", "", required=False, default=1), "record_every")
        if n_steps < 1:
            raise ConfigError("config key n_steps must be >= 1")
        if record_every < 1:
            raise ConfigError("config key record_every must be >= 1")
        return TrajectoryJob(
            lattice=_parse_lattice(_get(doc, "lattice", ""), "lattice"),
            epsilon=_number(_get(doc, "epsilon", ""), "epsilon"),
            initial=_parse_initial(
                _get(doc, "initial", ""), "initial", ("site", "mode", "gaussian_modes")
            ),
            seed=seed,
            dt=_number(_get(doc, "dt", ""), "dt"),
            n_steps=n_steps,
            record_every=record_every,
        )
    if task == "ensemble":
        _reject_unknown(
            doc,
            ("task", "lattice", "epsilon", "initial", "seeds", "horizon", "dt", "draws_per_seed")
            + _COMMON_KEYS,
            "",
        )
        return EnsembleJob(
            lattice=_parse_lattice(_get(doc, "lattice", ""), "lattice"),
            epsilon=_number(_get(doc, "epsilon", ""), "epsilon"),
            initial=_parse_initial(
                _get(doc, "initial", ""), "initial", ("site", "mode", "gaussian_modes")
            ),
            seeds=_parse_seeds(_get(doc, "seeds", ""), "seeds"),
            horizon=_number(_get(doc, "horizon", ""), "horizon"),
            dt=_number(_get(doc, "dt", ""), "dt"),
            draws_per_seed=_int(
                _get(doc, "draws_per_seed", "", required=False, default=1), "draws_per_seed"
            ),
        )
    raise ConfigError(f"config key task must be 'trajectory' or 'ensemble', got {task!r}")


def _parse_kinetic(doc: dict) -> KineticJob:
    _reject_unknown(
        doc, ("kernel_dir", "n_points", "initial", "dt", "record_times") + _COMMON_KEYS, ""
    )
    n_points = _int(_get(doc, "n_points", ""), "n_points")
    if n_points < 2:
        raise ConfigError("config key n_points must be >= 2")
    return KineticJob(
        kernel_dir=Path(_string(_get(doc, "kernel_dir", ""), "kernel_dir")),
        n_points=n_points,
        initial=_parse_initial(_get(doc, "initial", ""), "initial", ("mode", "gaussian_modes")),
        dt=_number(_get(doc, "dt", ""), "dt"),
        record_times=_parse_times(_get(doc, "record_times", ""), "record_times"),
    )


def _parse_pme_job(doc: dict) -> PMEJob:
    _reject_unknown(doc, ("pme", "initial", "record_times", "safety") + _COMMON_KEYS, "")
    initial = _as_mapping(_get(doc, "initial", ""), "initial")
    kind = _string(_get(initial, "kind", "initial"), "initial.kind")
    if kind == "box":
        _reject_unknown(initial, ("kind", "mass", "center", "width"), "initial")
        mass = _number(_get(initial, "mass", "initial", required=False, default=1.0), "initial.mass")
        center = _number(_get(initial, "center", "initial", required=False, default=0.0), "initial.center")
        width = _number(_get(initial, "width", "initial", required=False, default=1.0), "initial.width")
        t0 = 0.0
    elif kind == "barenblatt":
        _reject_unknown(initial, ("kind", "mass", "t0"), "initial")
        mass = _number(_get(initial, "mass", "initial", required=False, default=1.0), "initial.mass")
        t0 = _number(_get(initial, "t0", "initial", required=False, default=1.0), "initial.t0")
        center, width = 0.0, 0.0
        if not t0 > 0:
            raise ConfigError("config key initial.t0 must be > 0")
    else:
        raise ConfigError(
            f"config key initial.kind must be 'box' or 'barenblatt', got {kind!r}"
        )
    return PMEJob(
        pme=_parse_pme(_get(doc, "pme", ""), "pme"),
        initial_kind=kind,
        mass=mass,
        center=center,
        width=width,
        t0=t0,
        record_times=_parse_times(_get(doc, "record_times", ""), "record_times"),
        safety=_number(_get(doc, "safety", "", required=False, default=0.5), "safety"),
    )


def _parse_ohm(doc: dict) -> OhmJob:
    _reject_unknown(doc, ("pme", "electrode_at", "n_left_values") + _COMMON_KEYS, "")
    value = _get(doc, "n_left_values", "")
    if isinstance(value, list):
        levels = tuple(_number(v, f"n_left_values[{i}]") for i, v in enumerate(value))
    else:
        sub = _as_mapping(value, "n_left_values")
        _reject_unknown(sub, ("start", "stop", "count", "spacing"), "n_left_values")
        levels = _parse_times(value, "n_left_values")
    if not levels or any(v <= 0 for v in levels):
        raise ConfigError("config key n_left_values must contain positive levels")
    return OhmJob(
        pme=_parse_pme(_get(doc, "pme", ""), "pme"),
        electrode_at=_number(_get(doc, "electrode_at", ""), "electrode_at"),
        n_left_values=levels,
    )


def _parse_exponent(doc: dict) -> ExponentJob:
    _reject_unknown(doc, ("series", "x_column", "y_column", "window") + _COMMON_KEYS, "")
    return ExponentJob(
        series=Path(_string(_get(doc, "series", ""), "series")),
        x_column=_string(_get(doc, "x_column", "", required=False, default="t"), "x_column"),
        y_column=_string(_get(doc, "y_column", "", required=False, default="sigma"), "y_column"),
        window=_parse_window(doc.get("window"), "window"),
    )


_PARSERS = {
    "eigen": _parse_eigen,
    "kernel": _parse_kernel,
    "micro": _parse_micro,
    "kinetic": _parse_kinetic,
    "pme": _parse_pme_job,
    "ohm": _parse_ohm,
    "exponent": _parse_exponent,
}


def parse_common(doc: dict) -> tuple[str | None, int | None]:
    """Extract the shared (out, workers) keys; workers None means auto."""
    out = doc.get("out")
    if out is not None:
        out = _string(out, "out")
    workers = doc.get("workers")
    if workers is not None:
        workers = _int(workers, "workers")
        if workers < 1:
            raise ConfigError("config key workers must be >= 1")
    return out, workers


def parse_job(subcommand: str, doc: dict):
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(
            f"unknown subcommand {subcommand!r}; expected one of {', '.join(SUBCOMMANDS)}"
        )
    doc = _as_mapping(doc, "")
    return _PARSERS[subcommand](doc)

"""Moment and exponent analysis, dataset serialization, run provenance.

The measurement side of the suite: second moments and power-law fits for
spreading exponents, the self-similar collapse diagnostic, and the plain
CSV + JSON-manifest formats every command writes. All numeric CSV cells
carry 17 significant digits so files round-trip doubles exactly, and each
run directory gets one manifest whose digests let readers detect stale or
edited datasets.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import ConfigError, DomainError, IntegrityError
from .kernel import BroadeningSpec, KernelTable
from .kinetic import SpectrumField
from .lattice import LatticeConfig

__all__ = [
    "ExponentFit",
    "RunManifest",
    "second_moment",
    "fit_power_law",
    "self_similar_collapse",
    "write_csv",
    "read_csv",
    "file_digest",
    "build_manifest",
    "write_manifest",
    "load_manifest",
    "verify_manifest",
    "write_kernel_table",
    "load_kernel_table",
]

MANIFEST_SCHEMA_VERSION = "1"
MANIFEST_NAME = "manifest.json"


def second_moment(field: SpectrumField, *, center: float = 0.0) -> float:
    """Spread sigma = sum (k - center)^2 N dk about a fixed origin.

    The origin is meant to be the initial excitation center and must not
    track the evolving profile, or growth exponents come out biased.
    """
    shifted = field.coords - center
    return float(np.sum(shifted**2 * field.values) * field.spacing)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power law over a time window: value ~ t^slope."""

    slope: float
    intercept: float
    stderr: float
    window: tuple[float, float]

    def __post_init__(self) -> None:
        lo, hi = self.window
        if not lo < hi:
            raise ConfigError(f"fit window must have t_lo < t_hi, got ({lo}, {hi})")
        if not self.stderr >= 0:
            raise ConfigError(f"stderr must be >= 0, got {self.stderr}")
        object.__setattr__(self, "window", (float(lo), float(hi)))


def fit_power_law(times, values, window: tuple[float, float] | None = None) -> ExponentFit:
    """Fit log(values) = slope log(times) + intercept by ordinary least squares.

    Only samples with window[0] <= t <= window[1] participate (all of them
    when window is None); at least 8 strictly positive pairs are required.
    """
    times = np.asarray(list(times), dtype=float)
    values = np.asarray(list(values), dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ConfigError("times and values must be 1-d arrays of equal length")
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
        if not lo < hi:
            raise ConfigError(f"fit window must have t_lo < t_hi, got ({lo}, {hi})")
        keep = (times >= lo) & (times <= hi)
        times, values = times[keep], values[keep]
    if times.size < 8:
        raise DomainError(f"need at least 8 samples in the fit window, got {times.size}")
    if np.any(times <= 0) or np.any(values <= 0):
        raise DomainError("power-law fits need strictly positive times and values")

    x = np.log(times)
    y = np.log(values)
    n = x.size
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise DomainError("all samples share one time; the slope is undetermined")
    slope = float(np.sum((x - x_mean) * (y - y_mean)) / sxx)
    intercept = float(y_mean - slope * x_mean)
    residuals = y - (slope * x + intercept)
    rss = max(float(np.sum(residuals**2)), 0.0)
    stderr = float(np.sqrt(rss / (n - 2) / sxx))
    if window is None:
        window = (float(times.min()), float(times.max()))
    return ExponentFit(slope=slope, intercept=intercept, stderr=stderr, window=window)


def self_similar_collapse(snapshots, m: float) -> float:
    """Worst pairwise L1 distance between rescaled profiles, over mass.

    Each (t, profile) is mapped to F(xi) = t^(1/(m+1)) N(xi t^(1/(m+1)))
    on xi = k t^(-1/(m+1)). When every rescaled grid coincides the distance
    is taken pointwise; otherwise profiles are interpolated onto a shared
    uniform grid (zero outside their support).
    """
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    pairs = [(float(t), f) for t, f in snapshots]
    if len(pairs) < 2:
        raise DomainError(f"collapse needs at least 2 snapshots, got {len(pairs)}")
    if any(t <= 0 for t, _ in pairs):
        raise DomainError("collapse requires strictly positive snapshot times")

    mass = pairs[0][1].mass
    if not mass > 0:
        raise DomainError("collapse is undefined for zero-mass profiles")

    power = 1.0 / (m + 1.0)
    grids = [f.coords * t**-power for t, f in pairs]
    profiles = [f.values * t**power for t, f in pairs]

    span = max(g[-1] - g[0] for g in grids)
    aligned = all(g.shape == grids[0].shape for g in grids) and all(
        np.allclose(g, grids[0], rtol=0.0, atol=1e-12 * max(span, 1.0)) for g in grids
    )
    if not aligned:
        lo = min(g[0] for g in grids)
        hi = max(g[-1] for g in grids)
        n = max(max(g.size for g in grids), 2)
        common = np.linspace(lo, hi, n)
        profiles = [np.interp(common, g, p, left=0.0, right=0.0) for g, p in zip(grids, profiles)]
        grids = [common] * len(grids)

    worst = 0.0
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            dist = float(np.trapezoid(np.abs(profiles[i] - profiles[j]), grids[0]))
            worst = max(worst, dist)
    return worst / mass


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, columns: dict) -> Path:
    """Write named columns as CSV with full double precision cells."""
    names = list(columns)
    if not names:
        raise ConfigError("write_csv needs at least one column")
    series = [list(columns[name]) for name in names]
    length = len(series[0])
    if any(len(s) != length for s in series):
        raise ConfigError("all CSV columns must have equal length")
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(names)
        for row in zip(*series):
            writer.writerow([_format_cell(v) for v in row])
    return path


def read_csv(path) -> dict:
    """Read a CSV into {column: float array}; non-numeric columns stay str."""
    path = Path(path)
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise IntegrityError(f"{path} is empty; expected at least a header row")
    header = rows[0]
    body = rows[1:]
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise IntegrityError(f"{path} row {k + 2} has {len(row)} cells, header has {len(header)}")
    out = {}
    for i, name in enumerate(header):
        raw = [row[i] for row in body]
        try:
            out[name] = np.asarray([float(cell) for cell in raw], dtype=float)
        except ValueError:
            out[name] = np.asarray(raw, dtype=object)
    return out


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every dataset a command produces.

    Digests are SHA-256 over file bytes, keyed by path relative to the
    manifest's directory. The timestamp is informational and excluded from
    reproducibility comparisons.
    """

    parameters: dict
    seeds: tuple[int, ...]
    outputs: dict
    inputs: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema_version: str = MANIFEST_SCHEMA_VERSION
    timestamp: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.schema_version != MANIFEST_SCHEMA_VERSION:
            raise IntegrityError(
                f"unsupported manifest schema_version {self.schema_version!r}"
            )


def build_manifest(parameters: dict, seeds, output_paths, base_dir, input_paths=()) -> RunManifest:
    """Digest the given files and assemble a manifest relative to base_dir."""
    base = Path(base_dir).resolve()

    def digest_map(paths):
        out = {}
        for p in paths:
            p = Path(p)
            resolved = (p if p.is_absolute() else Path.cwd() / p).resolve()
            try:
                key = resolved.relative_to(base)
            except ValueError:
                key = p  # files outside the run dir keep the caller's path
            out[str(key)] = file_digest(resolved)
        return out

    return RunManifest(
        parameters=parameters,
        seeds=tuple(int(s) for s in seeds),
        outputs=digest_map(output_paths),
        inputs=digest_map(input_paths),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def write_manifest(path, manifest: RunManifest) -> Path:
    path = Path(path)
    payload = {
        "schema_version": manifest.schema_version,
        "tool_version": manifest.tool_version,
        "timestamp": manifest.timestamp,
        "parameters": manifest.parameters,
        "seeds": list(manifest.seeds),
        "inputs": manifest.inputs,
        "outputs": manifest.outputs,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def load_manifest(path) -> RunManifest:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"{path} is not valid JSON: {exc}") from exc
    required = {"schema_version", "tool_version", "timestamp", "parameters", "seeds", "inputs", "outputs"}
    missing = required - payload.keys()
    if missing:
        raise IntegrityError(f"{path} is missing manifest keys: {sorted(missing)}")
    return RunManifest(
        parameters=payload["parameters"],
        seeds=tuple(payload["seeds"]),
        outputs=payload["outputs"],
        inputs=payload["inputs"],
        tool_version=payload["tool_version"],
        schema_version=payload["schema_version"],
        timestamp=payload["timestamp"],
    )


def verify_manifest(manifest: RunManifest, base_dir) -> None:
    """Recompute digests of every referenced file; mismatch is an error."""
    base = Path(base_dir)
    for role, mapping in (("input", manifest.inputs), ("output", manifest.outputs)):
        for rel, expected in mapping.items():
            target = base / rel
            if not target.is_file():
                raise IntegrityError(f"manifest {role} {rel!r} is missing under {base}")
            actual = file_digest(target)
            if actual != expected:
                raise IntegrityError(
                    f"manifest {role} {rel!r} digest mismatch: "
                    f"expected {expected}, found {actual}"
                )


def write_kernel_table(out_dir, table: KernelTable) -> tuple[Path, Path]:
    """Serialize a kernel as kernel.csv (offset rows) + kernel_meta.json."""
    out_dir = Path(out_dir)
    r = table.cutoff_radius
    rows = list(table.offsets())
    csv_path = write_csv(
        out_dir / "kernel.csv",
        {
            "dl": [row[0] for row in rows],
            "dm": [row[1] for row in rows],
            "dn": [row[2] for row in rows],
            "k_value": [row[3] for row in rows],
        },
    )
    meta = {
        "schema_version": "1",
        "cutoff": r,
        "epsilon": table.epsilon,
        "n_realizations": table.n_realizations,
        "seeds": list(table.seeds),
        "symmetrized": bool(table.symmetrized),
        "broadening": None
        if table.broadening is None
        else {
            "kind": table.broadening.kind,
            "width": table.broadening.width,
            "horizon": table.broadening.horizon,
        },
        "lattice": None
        if table.lattice is None
        else {
            "n_sites": table.lattice.n_sites,
            "disorder_strength": table.lattice.disorder_strength,
            "spacing": table.lattice.spacing,
            "boundary": table.lattice.boundary.value,
        },
    }
    meta_path = out_dir / "kernel_meta.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def load_kernel_table(run_dir) -> KernelTable:
    """Rebuild a KernelTable from kernel.csv + kernel_meta.json."""
    run_dir = Path(run_dir)
    meta_path = run_dir / "kernel_meta.json"
    if not meta_path.is_file():
        raise IntegrityError(f"no kernel_meta.json under {run_dir}")
    meta = json.loads(meta_path.read_text())
    r = int(meta["cutoff"])
    w = 2 * r + 1
    cols = read_csv(run_dir / "kernel.csv")
    for name in ("dl", "dm", "dn", "k_value"):
        if name not in cols:
            raise IntegrityError(f"kernel.csv is missing column {name!r}")
    if cols["dl"].size != w**3:
        raise IntegrityError(
            f"kernel.csv has {cols['dl'].size} rows; cutoff {r} needs {w**3}"
        )
    values = np.zeros((w, w, w))
    dl = cols["dl"].astype(int)
    dm = cols["dm"].astype(int)
    dn = cols["dn"].astype(int)
    values[dl + r, dm + r, dn + r] = cols["k_value"]

    broadening = None
    if meta.get("broadening") is not None:
        b = meta["broadening"]
        broadening = BroadeningSpec(kind=b["kind"], width=b["width"], horizon=b["horizon"])
    lattice = None
    if meta.get("lattice") is not None:
        l = meta["lattice"]
        lattice = LatticeConfig(
            n_sites=int(l["n_sites"]),
            disorder_strength=float(l["disorder_strength"]),
            spacing=float(l["spacing"]),
            boundary=l["boundary"],
        )
    return KernelTable(
        cutoff_radius=r,
        values=values,
        epsilon=float(meta["epsilon"]),
        n_realizations=int(meta["n_realizations"]),
        broadening=broadening,
        lattice=lattice,
        seeds=tuple(int(s) for s in meta.get("seeds", ())),
        symmetrized=bool(meta.get("symmetrized", False)),
    )

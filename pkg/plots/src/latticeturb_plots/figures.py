"""The five figure kinds rendered from simulation CSV files.

Nothing here recomputes physics. Fitted slopes come from exponent_fit.csv
files produced upstream; analytic overlays are closed-form curves evaluated
for display only, anchored to the data by mass or by a single point.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_columns, require

__all__ = ["FigureSpec", "RenderResult", "render", "FIGURE_KINDS"]

STYLE = {"figsize": (6.4, 4.8), "dpi": 110, "grid_alpha": 0.3}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    out: Path
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; expected one of {sorted(FIGURE_KINDS)}"
            )
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "out", Path(self.out))


@dataclass(frozen=True)
class RenderResult:
    path: Path
    annotations: dict


def _param(params: dict, name: str, default: float) -> float:
    value = params.get(name, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise SchemaError(f"parameter {name} must be a number, got {value!r}") from None


def _load_fit(path) -> dict:
    cols = read_columns(path)
    require(cols, ("slope", "intercept"), path)
    if len(cols["slope"]) == 0:
        raise SchemaError(f"fit file {path} has no rows")
    out = {"slope": float(cols["slope"][0]), "intercept": float(cols["intercept"][0])}
    for name in ("t_lo", "t_hi"):
        if name in cols and len(cols[name]):
            out[name] = float(cols[name][0])
    return out


def _barenblatt_front(m: float, mass: float) -> float:
    # closed-form mass of the compact self-similar profile, inverted
    p = 1.0 / (m - 1.0)
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))
    shape = math.sqrt(math.pi) * math.exp(math.lgamma(p + 1.0) - math.lgamma(p + 1.5))
    return (mass / (coeff**p * shape)) ** (1.0 / (2.0 * p + 1.0))


def _barenblatt_profile(m: float, front: float, xi: np.ndarray) -> np.ndarray:
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))
    inner = np.maximum(coeff * (front**2 - xi**2), 0.0)
    return inner ** (1.0 / (m - 1.0))


def _sigma_loglog(spec: FigureSpec, ax) -> dict:
    cols = read_columns(spec.inputs[0])
    require(cols, ("t", "sigma"), spec.inputs[0])
    t = np.asarray(cols["t"], dtype=float)
    sigma = np.asarray(cols["sigma"], dtype=float)
    keep = (t > 0) & (sigma > 0)
    t, sigma = t[keep], sigma[keep]

    annotations: dict = {}
    ax.set_xlabel("t")
    ax.set_ylabel("second moment")
    if t.size:
        ax.loglog(t, sigma, "o", ms=4, color="tab:blue", label="measured")
        # reference slopes anchored through the middle sample
        mid = t.size // 2
        for power, label, color in (
            (0.5, r"$t^{1/2}$ (four-wave)", "tab:green"),
            (1.0 / 3.0, r"$t^{1/3}$ (six-wave)", "tab:orange"),
        ):
            ax.loglog(
                t,
                sigma[mid] * (t / t[mid]) ** power,
                "--",
                lw=1,
                color=color,
                label=label,
            )
    if len(spec.inputs) > 1:
        fit = _load_fit(spec.inputs[1])
        annotations["fitted_slope"] = fit["slope"]
        if t.size:
            lo = fit.get("t_lo", t.min())
            hi = fit.get("t_hi", t.max())
            span = np.geomspace(max(lo, t.min()), min(hi, t.max()), 50)
            ax.loglog(
                span,
                np.exp(fit["intercept"]) * span ** fit["slope"],
                "-",
                lw=2,
                color="tab:red",
                label=f"fit slope {fit['slope']:.3f}",
            )
        ax.set_title(f"spreading, fitted slope {fit['slope']:.3f}")
    else:
        ax.set_title("spreading")
    if t.size or len(spec.inputs) > 1:
        ax.legend(loc="best", fontsize=8)
    return annotations


def _collapse(spec: FigureSpec, ax) -> dict:
    cols = read_columns(spec.inputs[0])
    require(cols, ("time", "k", "N"), spec.inputs[0])
    annotations: dict = {}
    m = None
    if len(spec.inputs) > 1:
        meta = read_columns(spec.inputs[1])
        require(meta, ("m",), spec.inputs[1])
        if len(meta["m"]):
            m = float(meta["m"][0])
            if "collapse_error" in meta and len(meta["collapse_error"]):
                annotations["collapse_error"] = float(meta["collapse_error"][0])
    if "m" in spec.params:
        m = _param(spec.params, "m", 3.0)
    if m is None:
        m = 3.0
    annotations["m"] = m

    t = np.asarray(cols["time"], dtype=float)
    k = np.asarray(cols["k"], dtype=float)
    n = np.asarray(cols["N"], dtype=float)
    power = 1.0 / (m + 1.0)
    times = [tv for tv in np.unique(t) if tv > 0]
    last_mass = None
    for tv in times:
        sel = t == tv
        scale = tv**power
        ax.plot(k[sel] / scale, n[sel] * scale, lw=1, label=f"t = {tv:g}")
        if k[sel].size > 1:
            last_mass = float(np.trapezoid(n[sel], k[sel]))
    if last_mass is not None and last_mass > 0:
        front = _barenblatt_front(m, last_mass)
        xi = np.linspace(-1.1 * front, 1.1 * front, 400)
        ax.plot(
            xi,
            _barenblatt_profile(m, front, xi),
            "k--",
            lw=2,
            label="self-similar profile",
        )
    ax.set_xlabel(r"$k\, t^{-1/(m+1)}$")
    ax.set_ylabel(r"$N\, t^{1/(m+1)}$")
    title = f"self-similar collapse, m = {m:g}"
    if "collapse_error" in annotations:
        title += f", collapse error {annotations['collapse_error']:.2e}"
    ax.set_title(title)
    if times:
        ax.legend(loc="best", fontsize=8)
    return annotations


def _ohm_vj(spec: FigureSpec, ax) -> dict:
    cols = read_columns(spec.inputs[0])
    require(cols, ("j", "v"), spec.inputs[0])
    j = np.asarray(cols["j"], dtype=float)
    v = np.asarray(cols["v"], dtype=float)
    keep = (j > 0) & (v > 0)
    j, v = j[keep], v[keep]

    m = _param(spec.params, "m", 3.0)
    a = _param(spec.params, "a", 1.0)
    annotations: dict = {"m": m}
    ax.set_xlabel("J")
    ax.set_ylabel("V")
    if j.size:
        ax.loglog(j, v, "o", ms=5, color="tab:blue", label="steady states")
        span = np.geomspace(j.min(), j.max(), 50)
        analytic = (
            m**2 * a ** (1.0 / m + 2.0) * span ** (1.0 / m)
            / ((2.0 * m + 1.0) * (m + 1.0))
        )
        ax.loglog(
            span, analytic, "k--", lw=1.5, label=rf"$V \propto J^{{1/{m:g}}}$"
        )
    if len(spec.inputs) > 1:
        fit = _load_fit(spec.inputs[1])
        annotations["fitted_slope"] = fit["slope"]
        ax.set_title(f"transport law, m = {m:g}, fitted slope {fit['slope']:.4f}")
    else:
        ax.set_title(f"transport law, m = {m:g}")
    if j.size:
        ax.legend(loc="best", fontsize=8)
    return annotations


def _kernel_heatmap(spec: FigureSpec, ax) -> dict:
    cols = read_columns(spec.inputs[0])
    require(cols, ("dl", "dm", "dn", "k_value"), spec.inputs[0])
    dl = np.asarray(cols["dl"], dtype=float).astype(int)
    dm = np.asarray(cols["dm"], dtype=float).astype(int)
    dn = np.asarray(cols["dn"], dtype=float).astype(int)
    value = np.asarray(cols["k_value"], dtype=float)
    slice_dl = int(_param(spec.params, "slice_dl", 0.0))

    annotations: dict = {}
    ax.set_xlabel("dn")
    ax.set_ylabel("dm")
    if dl.size:
        r = int(np.abs(np.concatenate([dl, dm, dn])).max())
        annotations["cutoff"] = r
        w = 2 * r + 1
        grid = np.zeros((w, w))
        sel = dl == slice_dl
        grid[dm[sel] + r, dn[sel] + r] = value[sel]
        image = ax.imshow(
            grid,
            origin="lower",
            extent=(-r - 0.5, r + 0.5, -r - 0.5, r + 0.5),
            cmap="viridis",
        )
        ax.figure.colorbar(image, ax=ax, label="K")
    ax.set_title(f"kernel slice at dl = {slice_dl}")
    return annotations


def _profile_series(spec: FigureSpec, ax) -> dict:
    cols = read_columns(spec.inputs[0])
    require(cols, ("time", "k", "N"), spec.inputs[0])
    t = np.asarray(cols["time"], dtype=float)
    k = np.asarray(cols["k"], dtype=float)
    n = np.asarray(cols["N"], dtype=float)
    times = list(np.unique(t))
    for tv in times:
        sel = t == tv
        ax.plot(k[sel], n[sel], lw=1, label=f"t = {tv:g}")
    ax.set_xlabel("k")
    ax.set_ylabel("N")
    ax.set_title("intensity profiles")
    if times:
        ax.legend(loc="best", fontsize=8)
    return {"n_profiles": len(times)}


FIGURE_KINDS = {
    "sigma_loglog": _sigma_loglog,
    "collapse": _collapse,
    "ohm_vj": _ohm_vj,
    "kernel_heatmap": _kernel_heatmap,
    "profile_series": _profile_series,
}


def render(spec: FigureSpec) -> RenderResult:
    """Draw one figure and write it to spec.out."""
    figure, ax = plt.subplots(figsize=STYLE["figsize"], dpi=STYLE["dpi"])
    try:
        ax.grid(alpha=STYLE["grid_alpha"])
        annotations = FIGURE_KINDS[spec.kind](spec, ax)
        spec.out.parent.mkdir(parents=True, exist_ok=True)
        figure.savefig(spec.out)
    finally:
        plt.close(figure)
    return RenderResult(path=spec.out, annotations=annotations)

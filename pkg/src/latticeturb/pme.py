"""Degenerate nonlinear diffusion dN/dt = D d2(N^m)/dk2 for m > 1.

This is the long-wavelength limit of the collision dynamics: m = 3 for
four-wave transfer (with D supplied by diffusion_coefficient), m = 5 for
six-wave. The module provides a conservative explicit solver with a CFL
guard, the compactly supported self-similar (Barenblatt) solution and its
exponents, and the steady-state family behind the nonlinear Ohm's law

    V = m^2 a^(1/m + 2) J^(1/m) / ((2m + 1)(m + 1)).

Spreading runs use zero-flux ends (mass conserved to round-off); steady
states pin N at both ends and march to the fixed point, which for this
scheme interpolates the analytic profile exactly at the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, ConvergenceError, DomainError, NumericalError, StepSizeError
from .kinetic import SpectrumField

__all__ = [
    "PMEConfig",
    "PMERun",
    "OhmSolution",
    "SelfSimilarFit",
    "pme_step",
    "cfl_limit",
    "evolve_pme",
    "box_initial",
    "front_position",
    "barenblatt_profile",
    "barenblatt_mass",
    "barenblatt_front_for_mass",
    "barenblatt_field",
    "predicted_spreading_exponent",
    "steady_state_profile",
    "ohm_voltage",
    "relax_to_steady_state",
    "ohm_sweep",
    "fit_self_similar",
]

_CFL_SAFETY = 0.5


@dataclass(frozen=True)
class PMEConfig:
    """Domain, resolution and exponent for one diffusion problem."""

    m: float
    k_min: float
    k_max: float
    n_cells: int
    diffusion_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.m > 1:
            raise ConfigError(f"violated constraint m > 1 (got m = {self.m})")
        if not self.k_min < self.k_max:
            raise ConfigError(f"domain requires k_min < k_max, got [{self.k_min}, {self.k_max}]")
        n = int(self.n_cells)
        if n < 8:
            raise ConfigError(f"n_cells must be >= 8, got {self.n_cells}")
        object.__setattr__(self, "n_cells", n)
        if not self.diffusion_scale > 0:
            raise ConfigError(f"diffusion_scale must be > 0, got {self.diffusion_scale}")

    @property
    def domain(self) -> tuple[float, float]:
        return (self.k_min, self.k_max)

    @property
    def spacing(self) -> float:
        return (self.k_max - self.k_min) / self.n_cells

    def cell_centers(self) -> np.ndarray:
        return self.k_min + (np.arange(self.n_cells) + 0.5) * self.spacing


def _power_kind(m: float) -> int:
    """3 and 5 get multiply-only fast paths; anything else is generic."""
    if m == 3.0:
        return 3
    if m == 5.0:
        return 5
    return 0


@numba.njit(cache=True)
def _fill_power(values, u, m, kind):  # pragma: no cover - driven by wrappers
    n = values.shape[0]
    if kind == 3:
        for i in range(n):
            v = values[i]
            u[i] = v * v * v
    elif kind == 5:
        for i in range(n):
            v = values[i]
            v2 = v * v
            u[i] = v2 * v2 * v
    else:
        for i in range(n):
            v = values[i]
            u[i] = max(v, 0.0) ** m


@numba.njit(cache=True)
def _march_zero_flux(
    values, h, dcoef, m, kind, t_start, t_target, safety, max_steps
):  # pragma: no cover - driven by wrappers
    """Advance in place to exactly t_target with adaptive CFL steps.

    Returns (steps, flag): flag 0 ok, 1 step budget exhausted, 2 non-finite.
    Under zero-flux boundaries and the CFL bound the maximum never grows,
    so a step size computed from the current maximum stays valid within a
    block and only ever increases across blocks.
    """
    n = values.shape[0]
    u = np.empty(n)
    t = t_start
    steps = 0
    while t < t_target:
        vmax = values[0]
        for i in range(1, n):
            if values[i] > vmax:
                vmax = values[i]
        if not np.isfinite(vmax):
            return steps, 2
        if vmax <= 0.0:
            return steps, 0
        dt_cap = safety * h * h / (2.0 * dcoef * m * vmax ** (m - 1.0))
        for _ in range(512):
            remaining = t_target - t
            if remaining <= 0.0:
                break
            if dt_cap < remaining:
                dt = dt_cap
                t = t + dt
            else:
                dt = remaining
                t = t_target
            lam = dcoef * dt / (h * h)
            _fill_power(values, u, m, kind)
            left = u[0]
            for i in range(n):
                center = u[i]
                right = u[i + 1] if i + 1 < n else center
                values[i] += lam * (right - 2.0 * center + left)
                left = center
            steps += 1
            if steps >= max_steps:
                return steps, 1
    return steps, 0


@numba.njit(cache=True)
def _march_pinned(values, h, dcoef, m, kind, dt, n_steps):  # pragma: no cover
    """n_steps fixed-size steps with both end values held."""
    n = values.shape[0]
    u = np.empty(n)
    lam = dcoef * dt / (h * h)
    for _ in range(n_steps):
        _fill_power(values, u, m, kind)
        left = u[0]
        for i in range(1, n - 1):
            center = u[i]
            values[i] += lam * (u[i + 1] - 2.0 * center + left)
            left = center


def _check_field(field: SpectrumField, config: PMEConfig) -> None:
    if field.n_points != config.n_cells:
        raise ConfigError(
            f"field has {field.n_points} cells but the config asks for {config.n_cells}"
        )
    if not np.isclose(field.spacing, config.spacing, rtol=1e-9):
        raise ConfigError("field grid spacing does not match the config domain")


def cfl_limit(field: SpectrumField, config: PMEConfig) -> float:
    """Largest stable step: 0.5 dk^2 / (2 D m max(N)^(m-1))."""
    peak = float(field.values.max(initial=0.0))
    if peak == 0.0:
        return np.inf
    h = config.spacing
    return _CFL_SAFETY * h * h / (2.0 * config.diffusion_scale * config.m * peak ** (config.m - 1.0))


def pme_step(field: SpectrumField, config: PMEConfig, dt: float) -> SpectrumField:
    """One conservative explicit step with zero-flux ends.

    N_i += D dt / dk^2 (u_{i+1} - 2 u_i + u_{i-1}), u = N^m, with the
    end fluxes zero. dt beyond the CFL bound raises a step-size error.
    """
    _check_field(field, config)
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    limit = cfl_limit(field, config)
    if dt > limit * (1.0 + 1e-12):
        raise StepSizeError(
            f"dt = {dt:.6e} exceeds the CFL bound {limit:.6e} for this profile"
        )
    u = np.empty_like(field.values)
    _fill_power(field.values, u, config.m, _power_kind(config.m))
    lam = config.diffusion_scale * dt / config.spacing**2
    padded = np.concatenate(([u[0]], u, [u[-1]]))
    values = field.values + lam * (padded[2:] - 2.0 * padded[1:-1] + padded[:-2])
    return field.with_values(values)


def box_initial(
    config: PMEConfig, mass: float = 1.0, center: float = 0.0, width: float = 1.0
) -> SpectrumField:
    """Box profile of the requested mass, snapped to whole cells."""
    if not mass > 0 or not width > 0:
        raise ConfigError("box mass and width must be > 0")
    centers = config.cell_centers()
    inside = np.abs(centers - center) <= width / 2.0
    count = int(inside.sum())
    if count == 0:
        raise ConfigError("box support does not cover any grid cell")
    values = np.zeros(config.n_cells)
    values[inside] = mass / (count * config.spacing)
    return SpectrumField(values=values, coords=centers)


@dataclass(frozen=True)
class PMERun:
    """Snapshots of a spreading run; times[0] = 0 holds the initial data."""

    times: np.ndarray
    snapshots: tuple[SpectrumField, ...]
    n_steps: int

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "snapshots", tuple(self.snapshots))


def evolve_pme(
    field: SpectrumField,
    config: PMEConfig,
    record_times,
    *,
    safety: float = _CFL_SAFETY,
    max_steps: int = 10**9,
) -> PMERun:
    """March with zero-flux ends, recording exactly at the given times."""
    _check_field(field, config)
    record_times = np.asarray(list(record_times), dtype=float)
    if record_times.size == 0:
        raise ConfigError("record_times must not be empty")
    if record_times[0] <= 0 or np.any(np.diff(record_times) <= 0):
        raise ConfigError("record_times must be positive and strictly increasing")
    if not 0 < safety <= _CFL_SAFETY:
        raise ConfigError(f"safety must lie in (0, {_CFL_SAFETY}], got {safety}")

    values = field.values.copy()
    kind = _power_kind(config.m)
    times = [0.0]
    snapshots = [field]
    total_steps = 0
    t = 0.0
    for target in record_times:
        steps, flag = _march_zero_flux(
            values,
            config.spacing,
            config.diffusion_scale,
            config.m,
            kind,
            t,
            target,
            safety,
            max_steps - total_steps,
        )
        total_steps += steps
        if flag == 2 or not np.all(np.isfinite(values)):
            raise NumericalError("diffusion march produced non-finite intensities")
        if flag == 1:
            raise ConvergenceError(
                f"step budget {max_steps} exhausted at t = {t:.6g} before reaching {target:.6g}"
            )
        t = target
        times.append(target)
        snapshots.append(SpectrumField(values=values.copy(), coords=field.coords))
    return PMERun(times=np.asarray(times), snapshots=tuple(snapshots), n_steps=total_steps)


def front_position(
    field: SpectrumField, *, center: float = 0.0, threshold: float = 1e-8
) -> float:
    """Largest |k - center| whose intensity exceeds threshold x max(N)."""
    peak = float(field.values.max(initial=0.0))
    if peak <= 0.0:
        return 0.0
    alive = field.values > threshold * peak
    if not alive.any():
        return 0.0
    return float(np.abs(field.coords[alive] - center).max())


def barenblatt_profile(m: float, front: float, xi) -> np.ndarray | float:
    """Self-similar shape f(xi) = [c_m (front^2 - xi^2)]^(1/(m-1)), 0 outside.

    c_m = (m - 1) / (2 m (m + 1)).
    """
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    if not front > 0:
        raise DomainError(f"front must be > 0, got {front}")
    xi = np.asarray(xi, dtype=float)
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))
    inner = np.maximum(coeff * (front**2 - xi**2), 0.0)
    out = inner ** (1.0 / (m - 1.0))
    if out.ndim == 0:
        return float(out)
    return out


def barenblatt_mass(m: float, front: float) -> float:
    """Closed-form integral of the profile over its support.

    With p = 1/(m-1): mass = c_m^p front^(2p+1) sqrt(pi) G(p+1)/G(p+3/2).
    """
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    if not front > 0:
        raise DomainError(f"front must be > 0, got {front}")
    p = 1.0 / (m - 1.0)
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))
    shape = math.sqrt(math.pi) * math.exp(math.lgamma(p + 1.0) - math.lgamma(p + 1.5))
    return coeff**p * front ** (2.0 * p + 1.0) * shape


def barenblatt_front_for_mass(m: float, mass: float) -> float:
    """Front position whose profile carries the requested mass."""
    if not mass > 0:
        raise DomainError(f"mass must be > 0, got {mass}")
    p = 1.0 / (m - 1.0)
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))
    shape = math.sqrt(math.pi) * math.exp(math.lgamma(p + 1.0) - math.lgamma(p + 1.5))
    return (mass / (coeff**p * shape)) ** (1.0 / (2.0 * p + 1.0))


def barenblatt_field(m: float, mass: float, t: float, coords) -> SpectrumField:
    """Spreading solution N(t, k) = t^(-1/(m+1)) f(k t^(-1/(m+1))) on a grid."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    coords = np.asarray(coords, dtype=float)
    front = barenblatt_front_for_mass(m, mass)
    scale = t ** (-1.0 / (m + 1.0))
    values = scale * barenblatt_profile(m, front, coords * scale)
    return SpectrumField(values=values, coords=coords)


def predicted_spreading_exponent(m: float) -> float:
    """Growth exponent of the second moment: sigma(t) ~ t^(2/(m+1))."""
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    return 2.0 / (m + 1.0)


def steady_state_profile(A: float, J: float, m: float, k) -> np.ndarray | float:
    """Steady profile N(k) = (A - J k)^(1/m)."""
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    k = np.asarray(k, dtype=float)
    arg = A - J * k
    if np.any(arg < 0):
        raise DomainError("A - J k is negative beyond the electrode; profile undefined there")
    out = arg ** (1.0 / m)
    if out.ndim == 0:
        return float(out)
    return out


def ohm_voltage(J: float, a: float, m: float) -> float:
    """Closed-form voltage of the steady state grounded at the electrode."""
    if not J > 0 or not a > 0:
        raise DomainError(f"J and a must be > 0, got J = {J}, a = {a}")
    if not m > 1:
        raise ConfigError(f"violated constraint m > 1 (got m = {m})")
    return m**2 * a ** (1.0 / m + 2.0) * J ** (1.0 / m) / ((2.0 * m + 1.0) * (m + 1.0))


@dataclass(frozen=True)
class OhmSolution:
    """Steady-state bundle: supply constant A, current J, electrode a,
    voltage V. Analytic members satisfy A = J a and the ohm_voltage law;
    measured members carry the relaxed profile's extracted values."""

    A: float
    J: float
    a: float
    V: float
    m: float

    def __post_init__(self) -> None:
        if not self.A > 0 or not self.J > 0 or not self.a > 0:
            raise DomainError("A, J and a must all be > 0")
        if not self.m > 1:
            raise ConfigError(f"violated constraint m > 1 (got m = {self.m})")

    @classmethod
    def analytic(cls, J: float, a: float, m: float) -> "OhmSolution":
        return cls(A=J * a, J=J, a=a, V=ohm_voltage(J, a, m), m=m)


def relax_to_steady_state(
    config: PMEConfig,
    n_left: float,
    electrode_at: float,
    *,
    rate_tolerance: float = 1e-10,
    window: float = 0.5,
    max_windows: int = 5000,
) -> tuple[SpectrumField, OhmSolution]:
    """March to the pinned steady state N(0) = n_left, N(a) = 0.

    Works on a node grid over [0, electrode_at] with config.n_cells
    intervals. Convergence is declared when the profile moves by less than
    rate_tolerance per unit time in the sup norm. The current is read off
    the face differences of N^m and the voltage from integrating the
    charge twice with the electrode grounded.
    """
    if not n_left > 0:
        raise ConfigError(f"n_left must be > 0, got {n_left}")
    if not electrode_at > 0:
        raise ConfigError(f"electrode_at must be > 0, got {electrode_at}")
    if config.k_min > 0 or config.k_max < electrode_at:
        raise ConfigError(
            f"electrode at {electrode_at} outside the config domain [{config.k_min}, {config.k_max}]"
        )
    if not rate_tolerance > 0 or not window > 0:
        raise ConfigError("rate_tolerance and window must be > 0")

    n_nodes = config.n_cells + 1
    h = electrode_at / config.n_cells
    coords = np.linspace(0.0, electrode_at, n_nodes)
    values = n_left * (1.0 - coords / electrode_at)
    kind = _power_kind(config.m)

    # the boundary value dominates forever, so one CFL bound serves the run
    dt = _CFL_SAFETY * h * h / (
        2.0 * config.diffusion_scale * config.m * n_left ** (config.m - 1.0)
    )
    steps_per_window = max(1, int(np.ceil(window / dt)))
    tau = steps_per_window * dt

    converged = False
    rate = np.inf
    for _ in range(max_windows):
        previous = values.copy()
        _march_pinned(values, h, config.diffusion_scale, config.m, kind, dt, steps_per_window)
        if not np.all(np.isfinite(values)):
            raise NumericalError("steady-state march produced non-finite intensities")
        rate = float(np.abs(values - previous).max()) / tau
        if rate < rate_tolerance:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"no steady state within {max_windows} windows of {tau:.3g} time units; "
            f"last rate {rate:.3e} (tolerance {rate_tolerance:.1e})"
        )

    u = np.empty_like(values)
    _fill_power(values, u, config.m, kind)
    faces = -(u[1:] - u[:-1]) / h
    current = float(faces.mean())

    # voltage: phi'' = N with phi(a) = phi'(a) = 0, reading V = phi(0)
    increments = 0.5 * h * (values[1:] + values[:-1])
    minus_slope = np.concatenate(([0.0], np.cumsum(increments[::-1])))[::-1]
    voltage = float(np.trapezoid(minus_slope, coords))

    profile = SpectrumField(values=values, coords=coords)
    solution = OhmSolution(
        A=float(u[0]), J=current, a=electrode_at, V=voltage, m=config.m
    )
    return profile, solution


def ohm_sweep(
    config: PMEConfig, n_left_values, electrode_at: float
) -> list[tuple[float, OhmSolution]]:
    """Relax one steady state per boundary value; returns (n_left, solution)."""
    n_left_values = [float(v) for v in n_left_values]
    if not n_left_values:
        raise ConfigError("n_left_values must not be empty")
    out = []
    for n_left in n_left_values:
        _, solution = relax_to_steady_state(config, n_left, electrode_at)
        out.append((n_left, solution))
    return out


@dataclass(frozen=True)
class SelfSimilarFit:
    """Measured similarity exponents N ~ t^b f(k t^a) and front position.

    Consistency of the scaling ansatz requires 2a = -1 + b(1 - m) and mass
    conservation requires a = b; construction enforces both within
    tolerance.
    """

    exponent_a: float
    exponent_b: float
    front_position: float
    m: float
    tolerance: float = 0.05

    def __post_init__(self) -> None:
        gap_consistency = abs(2.0 * self.exponent_a + 1.0 - self.exponent_b * (1.0 - self.m))
        gap_mass = abs(self.exponent_a - self.exponent_b)
        if gap_consistency > self.tolerance or gap_mass > self.tolerance:
            raise DomainError(
                f"fitted exponents a = {self.exponent_a:.4f}, b = {self.exponent_b:.4f} "
                f"violate the similarity relations beyond tolerance {self.tolerance}"
            )


def fit_self_similar(times, snapshots, m: float, *, tolerance: float = 0.05) -> SelfSimilarFit:
    """Extract similarity exponents from a spreading run.

    a comes from the second-moment growth (sigma ~ t^(-2a)), b from the
    peak decay (max N ~ t^b), the front from the median rescaled support
    edge. Only strictly positive times participate.
    """
    from .analysis import fit_power_law, second_moment

    times = np.asarray(list(times), dtype=float)
    snaps = list(snapshots)
    if times.shape[0] != len(snaps):
        raise ConfigError("times and snapshots must have equal length")
    keep = times > 0
    times = times[keep]
    snaps = [s for s, k in zip(snaps, keep) if k]
    if times.shape[0] < 8:
        raise DomainError("need at least 8 positive-time snapshots to fit exponents")

    first = snaps[0]
    center = float(np.sum(first.coords * first.values) / np.sum(first.values))
    sigmas = np.array([second_moment(s, center=center) for s in snaps])
    peaks = np.array([float(s.values.max()) for s in snaps])
    sigma_fit = fit_power_law(times, sigmas)
    peak_fit = fit_power_law(times, peaks)

    scaled_fronts = np.array(
        [front_position(s, center=center) * t ** (-1.0 / (m + 1.0)) for t, s in zip(times, snaps)]
    )
    return SelfSimilarFit(
        exponent_a=-sigma_fit.slope / 2.0,
        exponent_b=peak_fit.slope,
        front_position=float(np.median(scaled_fronts)),
        m=m,
        tolerance=tolerance,
    )

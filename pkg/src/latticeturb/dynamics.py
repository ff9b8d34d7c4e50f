"""Time integration of the cubic lattice wave equation and mode-space views.

The field obeys

    i dPsi_x/dt = hop * (Psi_{x+1} + Psi_{x-1} - 2 Psi_x) + V_x Psi_x
                  + eps |Psi_x|^2 Psi_x

and is integrated by Strang splitting: the linear part is applied exactly
as diagonal phases in the eigenbasis, the cubic part exactly as a pointwise
phase rotation. Both substeps are unitary, so the total intensity is
conserved to round-off regardless of step size.

Mode amplitudes c_j carry the linear phase removed (interaction picture),
so at eps = 0 they are constants of motion. The module also provides the
first-order perturbative predictor for c_j(T) and ensemble-averaged
intensity transfer rates, the observables the kinetic level must match.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .eigen import EigenBasis, solve_eigen
from .errors import ConfigError, DomainError, StepSizeError
from .lattice import DisorderRealization, LatticeConfig, build_hamiltonian, sample_disorder
from .rng import PHASE_STREAM, make_rng

__all__ = [
    "FieldState",
    "ModeState",
    "InitialSpec",
    "TimeWindow",
    "EnsembleRates",
    "evolve_field",
    "project_amplitudes",
    "synthesize_field",
    "mode_intensities",
    "phase_integral",
    "first_order_check",
    "intermediate_time_window",
    "initial_mode_amplitudes",
    "ensemble_intensity_rate",
]

# nonlinear phase advance per step must stay well below one radian
_STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class FieldState:
    """Complex site amplitudes at a given time."""

    psi: np.ndarray
    time: float
    mass_at_construction: float = -1.0

    def __post_init__(self) -> None:
        psi = np.asarray(self.psi, dtype=complex)
        if psi.ndim != 1 or psi.size == 0:
            raise DomainError(f"psi must be a non-empty 1-d complex vector, got shape {psi.shape}")
        if not np.all(np.isfinite(psi.view(float))):
            raise DomainError("field amplitudes must be finite")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)
        if self.mass_at_construction < 0:
            object.__setattr__(
                self, "mass_at_construction", float(np.sum(np.abs(psi) ** 2))
            )

    @property
    def n_sites(self) -> int:
        return self.psi.shape[0]

    @property
    def mass(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2))


@dataclass(frozen=True)
class ModeState:
    """Interaction-picture mode amplitudes c_j at a given time."""

    c: np.ndarray
    time: float

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise DomainError(f"c must be a non-empty 1-d complex vector, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def intensities(self) -> np.ndarray:
        return np.abs(self.c) ** 2

    @property
    def mass(self) -> float:
        return float(np.sum(np.abs(self.c) ** 2))


def mode_intensities(state: ModeState) -> np.ndarray:
    """Per-mode intensities N_j = |c_j|^2."""
    return state.intensities


def _strang_batch(
    modes: np.ndarray,
    energies: np.ndarray,
    psi: np.ndarray,
    epsilon: float,
    dt: float,
    n_steps: int,
) -> np.ndarray:
    """Split-step advance of site-space columns by n_steps of size dt.

    Consecutive half linear steps are merged, so the cost per step is one
    basis transform each way plus the pointwise nonlinear rotation.
    """
    half = np.exp(-0.5j * dt * energies)
    full = np.exp(-1.0j * dt * energies)
    phase_col = (lambda p, a: p[:, None] * a) if psi.ndim == 2 else (lambda p, a: p * a)

    a = modes @ psi
    a = phase_col(half, a)
    for step in range(n_steps):
        psi = modes.T @ a
        peak = float(np.max(np.abs(psi) ** 2))
        if epsilon * dt * peak >= _STABILITY_LIMIT:
            raise StepSizeError(
                f"nonlinear phase per step eps*dt*max|psi|^2 = {epsilon * dt * peak:.3e} "
                f"exceeds the stability limit {_STABILITY_LIMIT}; reduce dt"
            )
        psi = psi * np.exp(-1.0j * (epsilon * dt) * np.abs(psi) ** 2)
        a = modes @ psi
        a = phase_col(full if step < n_steps - 1 else half, a)
    return modes.T @ a


def evolve_field(
    state: FieldState,
    basis: EigenBasis,
    disorder: DisorderRealization,
    epsilon: float,
    dt: float,
    n_steps: int,
) -> FieldState:
    """Advance a field by n_steps steps of size dt.

    The linear substep is exact in the eigenbasis, so at epsilon = 0 the
    whole propagation is exact and performed in a single shot.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ConfigError(f"n_steps must be >= 0, got {n_steps}")
    if basis.n_sites != state.n_sites:
        raise ConfigError(
            f"basis has {basis.n_sites} sites but the field has {state.n_sites}"
        )
    if disorder.potential.shape[0] != state.n_sites:
        raise ConfigError(
            f"disorder has {disorder.potential.shape[0]} sites but the field has {state.n_sites}"
        )
    if n_steps == 0:
        return state

    t_final = state.time + dt * n_steps
    if epsilon == 0.0:
        a = basis.modes @ state.psi
        a = a * np.exp(-1.0j * (dt * n_steps) * basis.energies)
        return FieldState(psi=basis.modes.T @ a, time=t_final)

    psi = _strang_batch(basis.modes, basis.energies, state.psi.copy(), epsilon, dt, n_steps)
    return FieldState(psi=psi, time=t_final)


def project_amplitudes(state: FieldState, basis: EigenBasis) -> ModeState:
    """Interaction-picture amplitudes c_j = e^{+i e_j t} <psi_j, Psi>."""
    if basis.n_sites != state.n_sites:
        raise ConfigError(
            f"basis has {basis.n_sites} sites but the field has {state.n_sites}"
        )
    c = np.exp(1.0j * basis.energies * state.time) * (basis.modes @ state.psi)
    return ModeState(c=c, time=state.time)


def synthesize_field(basis: EigenBasis, state: ModeState) -> FieldState:
    """Inverse of project_amplitudes: rebuild the site field from c_j."""
    a = state.c * np.exp(-1.0j * basis.energies * state.time)
    return FieldState(psi=basis.modes.T @ a, time=state.time)


def phase_integral(x, horizon: float):
    """Finite-horizon phase integral int_0^T e^{ixt} dt = (e^{ixT} - 1)/(ix).

    The removable singularity at x = 0 evaluates to T.
    """
    if not horizon > 0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    x = np.asarray(x, dtype=float)
    xt = x * horizon
    small = np.abs(xt) < 1e-8
    safe = np.where(small, 1.0, x)
    out = np.where(
        small,
        horizon * (1.0 + 0.5j * xt),
        (np.exp(1.0j * xt) - 1.0) / (1.0j * safe),
    )
    if out.ndim == 0:
        return complex(out)
    return out


@numba.njit(cache=True)
def _first_order_sum(
    pairs: np.ndarray, energies: np.ndarray, c0: np.ndarray, horizon: float
) -> np.ndarray:  # pragma: no cover - exercised through first_order_check
    n = c0.shape[0]
    n_sites = pairs.shape[2]
    out = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        acc = 0.0 + 0.0j
        for l in range(n):
            cl = np.conj(c0[l])
            for m in range(n):
                cml = c0[m] * cl
                for nn in range(n):
                    if (nn == l and m == j) or (nn == j and m == l):
                        continue
                    v = 0.0
                    for x in range(n_sites):
                        v += pairs[l, j, x] * pairs[m, nn, x]
                    if v == 0.0:
                        continue
                    # de-tuning of the quadruple as felt by dc_j/dt
                    y = energies[j] + energies[l] - energies[m] - energies[nn]
                    yt = y * horizon
                    if abs(yt) < 1e-8:
                        delta = horizon * (1.0 + 0.5j * yt)
                    else:
                        delta = (np.exp(1.0j * yt) - 1.0) / (1.0j * y)
                    acc += v * delta * cml * c0[nn]
        out[j] = acc
    return out


def first_order_check(
    c0: ModeState, basis: EigenBasis, epsilon: float, horizon: float
) -> np.ndarray:
    """Predicted c_j(T) from first-order perturbation theory.

    Evaluates c_j(0) - i eps sum' V[l,j,m,n] D_T(e_j + e_l - e_m - e_n)
    c_m c_n conj(c_l) with the diagonal quadruples excluded, where D_T is
    phase_integral. The sign of the de-tuning follows the equations of
    motion integrated by evolve_field, so the two agree to O(eps^2 T^2).
    Quartic cost in the mode count; intended for small validation lattices.
    """
    if not horizon > 0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    if c0.c.shape[0] != basis.n_modes:
        raise ConfigError(
            f"initial amplitudes have {c0.c.shape[0]} entries but the basis has {basis.n_modes} modes"
        )
    pairs = basis.modes[:, None, :] * basis.modes[None, :, :]
    correction = _first_order_sum(
        np.ascontiguousarray(pairs),
        basis.energies.astype(np.float64),
        c0.c.astype(np.complex128),
        float(horizon),
    )
    return c0.c + epsilon * (-1.0j) * correction


@dataclass(frozen=True)
class TimeWindow:
    """Horizon range where perturbative transfer rates are meaningful:
    long against the linear period, short against the nonlinear time."""

    lower: float
    upper: float

    @property
    def midpoint(self) -> float:
        """Geometric midpoint of the window."""
        return float(np.sqrt(self.lower * self.upper))


def intermediate_time_window(basis: EigenBasis, epsilon: float) -> TimeWindow:
    """Window 2 pi / E_char << T << 2 pi / (E_char eps^2).

    E_char is the median |energy| of the basis; the geometric midpoint is
    2 pi / (E_char eps).
    """
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    e_char = float(np.median(np.abs(basis.energies)))
    if e_char <= 0:
        raise DomainError("median |energy| is zero; no characteristic linear period")
    lower = 2.0 * np.pi / e_char
    return TimeWindow(lower=lower, upper=lower / epsilon**2)


@dataclass(frozen=True)
class InitialSpec:
    """Initial-condition recipe.

    kind "site":           all intensity on one lattice site.
    kind "mode":           all intensity in one eigenmode.
    kind "gaussian_modes": intensity envelope A exp(-(j-center)^2 / 2 width^2)
                           over mode indices, with independent uniform random
                           phases per mode and per draw.
    """

    kind: str
    index: int = 0
    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("site", "mode", "gaussian_modes"):
            raise ConfigError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "gaussian_modes":
            if not self.width > 0:
                raise ConfigError(f"envelope width must be > 0, got {self.width}")
            if not self.amplitude > 0:
                raise ConfigError(f"envelope amplitude must be > 0, got {self.amplitude}")
        elif self.index < 0:
            raise ConfigError(f"index must be >= 0, got {self.index}")

    def envelope(self, n_modes: int) -> np.ndarray:
        """Target mode intensities (deterministic part of the recipe)."""
        if self.kind == "gaussian_modes":
            j = np.arange(n_modes, dtype=float)
            return self.amplitude * np.exp(-((j - self.center) ** 2) / (2.0 * self.width**2))
        n0 = np.zeros(n_modes)
        if self.index >= n_modes:
            raise ConfigError(f"index {self.index} out of range for {n_modes} modes")
        if self.kind == "mode":
            n0[self.index] = self.amplitude
        return n0  # for "site" the mode content depends on the basis


def initial_mode_amplitudes(
    spec: InitialSpec, basis: EigenBasis, seed: int, draws: int = 1
) -> np.ndarray:
    """Columns of initial lab-frame mode amplitudes, one per draw.

    Site and mode recipes are deterministic (phases are irrelevant global
    factors); the gaussian recipe draws phases from the seed's phase stream.
    """
    if draws < 1:
        raise ConfigError(f"draws must be >= 1, got {draws}")
    n = basis.n_modes
    if spec.kind == "site":
        if spec.index >= basis.n_sites:
            raise ConfigError(f"site {spec.index} out of range for {basis.n_sites} sites")
        col = np.sqrt(spec.amplitude) * basis.modes[:, spec.index].astype(complex)
        return np.repeat(col[:, None], draws, axis=1)
    if spec.kind == "mode":
        col = np.zeros(n, dtype=complex)
        col[spec.index] = np.sqrt(spec.amplitude)
        return np.repeat(col[:, None], draws, axis=1)
    moduli = np.sqrt(spec.envelope(n))
    theta = make_rng(seed, PHASE_STREAM).random((n, draws))
    return moduli[:, None] * np.exp(2.0j * np.pi * theta)


@dataclass(frozen=True)
class EnsembleRates:
    """Secant intensity transfer rates averaged over disorder and phases."""

    rates: np.ndarray
    std_error: np.ndarray
    seed_rates: np.ndarray  # one row per disorder seed (cluster means)
    mean_initial: np.ndarray
    horizon: float
    n_seeds: int
    draws_per_seed: int

    def __post_init__(self) -> None:
        for name in ("rates", "std_error", "seed_rates", "mean_initial"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _seed_rates(
    config: LatticeConfig,
    epsilon: float,
    spec: InitialSpec,
    seed: int,
    horizon: float,
    dt: float,
    draws: int,
) -> tuple[np.ndarray, np.ndarray]:
    """(mean initial intensities, secant rates) for one disorder draw."""
    basis = solve_eigen(build_hamiltonian(config, sample_disorder(config, seed)))
    a0 = initial_mode_amplitudes(spec, basis, seed, draws)
    n_steps = max(1, int(round(horizon / dt)))
    step = horizon / n_steps
    if epsilon == 0.0:
        a_final = a0 * np.exp(-1.0j * horizon * basis.energies)[:, None]
    else:
        psi = basis.modes.T @ a0
        psi = _strang_batch(basis.modes, basis.energies, psi, epsilon, step, n_steps)
        a_final = basis.modes @ psi
    n0 = np.mean(np.abs(a0) ** 2, axis=1)
    nt = np.mean(np.abs(a_final) ** 2, axis=1)
    return n0, (nt - n0) / horizon


def ensemble_intensity_rate(
    config: LatticeConfig,
    epsilon: float,
    spec: InitialSpec,
    seeds,
    horizon: float,
    dt: float,
    *,
    draws_per_seed: int = 1,
    workers: int = 1,
) -> EnsembleRates:
    """(<N_j(T)> - <N_j(0)>)/T over disorder seeds and phase draws.

    Standard errors are computed across per-seed cluster means, so draws
    sharing a disorder realization are never treated as independent.
    Per-seed results are reduced in seed order; the worker count does not
    affect the output.
    """
    seeds = [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ConfigError(f"need at least 2 seeds, got {len(seeds)}")
    if not horizon > 0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    if draws_per_seed < 1:
        raise ConfigError(f"draws_per_seed must be >= 1, got {draws_per_seed}")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _seed_rates,
                    [config] * len(seeds),
                    [epsilon] * len(seeds),
                    [spec] * len(seeds),
                    seeds,
                    [horizon] * len(seeds),
                    [dt] * len(seeds),
                    [draws_per_seed] * len(seeds),
                    chunksize=max(1, len(seeds) // (4 * workers)),
                )
            )
    else:
        results = [
            _seed_rates(config, epsilon, spec, s, horizon, dt, draws_per_seed)
            for s in seeds
        ]

    initials = np.stack([r[0] for r in results])
    seed_rates = np.stack([r[1] for r in results])
    rates = seed_rates.mean(axis=0)
    std_error = seed_rates.std(axis=0, ddof=1) / np.sqrt(len(seeds))
    return EnsembleRates(
        rates=rates,
        std_error=std_error,
        seed_rates=seed_rates,
        mean_initial=initials.mean(axis=0),
        horizon=horizon,
        n_seeds=len(seeds),
        draws_per_seed=draws_per_seed,
    )

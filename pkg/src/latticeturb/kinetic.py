"""Collision dynamics of mode intensities under a cutoff interaction kernel.

The spectrum N_j evolves by

    dN_j/dt = sum' K(l-j, m-j, n-j) (N_l N_m N_n + N_n N_m N_j
                                     - N_j N_n N_l - N_l N_j N_m)

with the diagonal quadruples (n,m) = (l,j) and (n,m) = (j,l) excluded and
offsets confined to the kernel's cutoff cube. Sums run over quadruples
whose members all lie on the stored grid; since the spectrum vanishes
identically outside it, this coincides with zero-padding whenever the
support stays a cutoff radius away from the edges, and it keeps the grid
sum of the right-hand side exactly zero for exchange-symmetric kernels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import ConfigError, DivergenceError, DomainError
from .kernel import KernelTable

__all__ = [
    "SpectrumField",
    "ClipLog",
    "KineticRun",
    "collision_rhs",
    "collision_scale",
    "step_kinetic",
    "evolve_kinetic",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumField:
    """Non-negative intensity profile on a uniformly spaced grid.

    The grid may be mode indices (spacing 1) or a continuum wavenumber
    axis; mass is always sum(values) * spacing.
    """

    values: np.ndarray
    coords: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        coords = np.asarray(self.coords, dtype=float)
        if values.ndim != 1 or coords.ndim != 1 or values.shape != coords.shape:
            raise DomainError(
                f"values and coords must be 1-d and equally long, got {values.shape} and {coords.shape}"
            )
        if values.shape[0] < 2:
            raise DomainError("a spectrum needs at least 2 grid points")
        if not np.all(np.isfinite(values)):
            raise DomainError("intensities must be finite")
        if np.any(values < 0):
            raise DomainError("intensities must be >= 0")
        steps = np.diff(coords)
        if not np.all(steps > 0):
            raise DomainError("coords must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError("coords must be uniformly spaced")
        values.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def on_lattice(cls, values, start_index: int = 0) -> "SpectrumField":
        values = np.asarray(values, dtype=float)
        coords = np.arange(start_index, start_index + values.shape[0], dtype=float)
        return cls(values=values, coords=coords)

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return float(self.coords[1] - self.coords[0])

    @property
    def mass(self) -> float:
        return float(np.sum(self.values) * self.spacing)

    def with_values(self, values) -> "SpectrumField":
        return SpectrumField(values=values, coords=self.coords)


@numba.njit(cache=True)
def _collision_core(values, kernel, r):  # pragma: no cover - driven by wrappers
    n = values.shape[0]
    rhs = np.zeros(n)
    scale = 0.0
    for j in range(n):
        lo = max(0, j - r)
        hi = min(n - 1, j + r)
        nj = values[j]
        acc = 0.0
        for l in range(lo, hi + 1):
            nl = values[l]
            for m in range(lo, hi + 1):
                nm = values[m]
                for q in range(lo, hi + 1):
                    if (q == l and m == j) or (q == j and m == l):
                        continue
                    k = kernel[l - j + r, m - j + r, q - j + r]
                    if k == 0.0:
                        continue
                    nq = values[q]
                    gain1 = nl * nm * nq
                    gain2 = nq * nm * nj
                    loss1 = nj * nq * nl
                    loss2 = nl * nj * nm
                    acc += k * (gain1 + gain2 - loss1 - loss2)
                    scale += abs(k) * (abs(gain1) + abs(gain2) + abs(loss1) + abs(loss2))
        rhs[j] = acc
    return rhs, scale


def _check_grid(spectrum: SpectrumField, kernel: KernelTable) -> None:
    if spectrum.n_points < kernel.cutoff_radius + 1:
        raise ConfigError(
            f"grid with {spectrum.n_points} points cannot host a kernel of cutoff {kernel.cutoff_radius}"
        )


def collision_rhs(spectrum: SpectrumField, kernel: KernelTable) -> np.ndarray:
    """Intensity transfer rate dN_j/dt for the given spectrum and kernel."""
    _check_grid(spectrum, kernel)
    rhs, _ = _collision_core(
        spectrum.values, np.asarray(kernel.values), kernel.cutoff_radius
    )
    return rhs


def collision_scale(spectrum: SpectrumField, kernel: KernelTable) -> float:
    """Sum of |K| times |monomial| over all contributing quadruples.

    The natural magnitude against which cancellations in collision_rhs
    (e.g. the conservation sum) should be measured.
    """
    _check_grid(spectrum, kernel)
    _, scale = _collision_core(
        spectrum.values, np.asarray(kernel.values), kernel.cutoff_radius
    )
    return float(scale)


@dataclass
class ClipLog:
    """Mutable counter of negative-intensity clips during time stepping."""

    events: int = 0
    magnitude: float = 0.0

    def add(self, count: int, magnitude: float) -> None:
        self.events += int(count)
        self.magnitude += float(magnitude)


def step_kinetic(
    spectrum: SpectrumField,
    kernel: KernelTable,
    dt: float,
    n_steps: int,
    *,
    clip_log: ClipLog | None = None,
) -> SpectrumField:
    """Advance the spectrum by n_steps classical Runge-Kutta steps.

    Negative intensities produced by a step are clipped to zero; clips are
    counted in clip_log (and logged as warnings when no log is supplied).
    Any intensity exceeding 1e12 times the initial scale aborts the run.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ConfigError(f"n_steps must be >= 0, got {n_steps}")
    _check_grid(spectrum, kernel)

    values = spectrum.values.copy()
    table = np.asarray(kernel.values)
    r = kernel.cutoff_radius
    blow_up = 1e12 * max(float(values.max(initial=0.0)), 1e-300)
    clips = 0
    clipped_mass = 0.0

    for _ in range(n_steps):
        k1, _ = _collision_core(values, table, r)
        k2, _ = _collision_core(values + 0.5 * dt * k1, table, r)
        k3, _ = _collision_core(values + 0.5 * dt * k2, table, r)
        k4, _ = _collision_core(values + dt * k3, table, r)
        values = values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        negative = values < 0.0
        if negative.any():
            clips += int(negative.sum())
            clipped_mass += float(-values[negative].sum())
            values[negative] = 0.0
        peak = float(np.abs(values).max())
        if not np.isfinite(peak) or peak > blow_up:
            raise DivergenceError(
                f"kinetic intensities reached {peak:.3e}, beyond 1e12 x the initial scale; "
                f"reduce dt"
            )

    if clips:
        if clip_log is not None:
            clip_log.add(clips, clipped_mass)
        else:
            logger.warning(
                "clipped %d negative intensities (total magnitude %.3e) during kinetic stepping",
                clips,
                clipped_mass,
            )
    return spectrum.with_values(values)


@dataclass(frozen=True)
class KineticRun:
    """Recorded trajectory of a kinetic integration."""

    times: np.ndarray
    snapshots: tuple[SpectrumField, ...]
    clip_events: int
    clip_magnitude: float

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "snapshots", tuple(self.snapshots))


def evolve_kinetic(
    spectrum: SpectrumField,
    kernel: KernelTable,
    dt: float,
    record_times,
) -> KineticRun:
    """Integrate and record snapshots at the given times.

    Segment lengths between records are divided into whole steps no longer
    than dt; each record lands exactly on its requested time.
    """
    record_times = np.asarray(list(record_times), dtype=float)
    if record_times.size == 0:
        raise ConfigError("record_times must not be empty")
    if np.any(np.diff(record_times) <= 0):
        raise ConfigError("record_times must be strictly increasing")
    if record_times[0] < 0:
        raise ConfigError("record_times must be >= 0")

    clip_log = ClipLog()
    times = [0.0]
    snapshots = [spectrum]
    current = spectrum
    t = 0.0
    for target in record_times:
        span = target - t
        if span > 0:
            n = max(1, int(np.ceil(span / dt - 1e-12)))
            current = step_kinetic(current, kernel, span / n, n, clip_log=clip_log)
            t = target
        times.append(target)
        snapshots.append(current)
    return KineticRun(
        times=np.asarray(times),
        snapshots=tuple(snapshots),
        clip_events=clip_log.events,
        clip_magnitude=clip_log.magnitude,
    )

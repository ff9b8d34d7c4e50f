"""Four-mode interaction kernel on the disordered lattice.

The cubic term couples eigenmodes through real overlap coefficients

    V[l, m, n, j] = sum_x psi_l(x) psi_m(x) psi_n(x) psi_j(x)

and transfers intensity between quadruples whose renormalized energy
mismatch E_n - E_l + E_m - E_j is small. Averaging the squared coupling
against a broadened delta of the mismatch, over disorder realizations and
over interior center modes j, yields a translation-covariant kernel table

    K(dl, dm, dn) = 4 pi eps^2 < |V|^2 delta_b(E mismatch) >

indexed by mode-index offsets (l, m, n) = j + (dl, dm, dn) inside a cutoff
cube. The table is what the kinetic solver consumes, and its weighted sum
gives the diffusion coefficient of the spreading limit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenBasis, solve_eigen
from .errors import ConfigError, DomainError
from .lattice import LatticeConfig, build_hamiltonian, sample_disorder

__all__ = [
    "OverlapCoefficient",
    "RenormalizedEnergies",
    "BroadeningSpec",
    "KernelTable",
    "overlap_coefficient",
    "nonlinear_shift",
    "broadened_delta",
    "kernel_table",
    "symmetrize_kernel_values",
    "diffusion_coefficient",
]


@dataclass(frozen=True)
class OverlapCoefficient:
    """A tagged overlap value; indices are (l, m, n, j)."""

    value: float
    indices: tuple[int, int, int, int]


def overlap_coefficient(basis: EigenBasis, j: int, l: int, m: int, n: int) -> float:
    """Real overlap sum_x psi_l psi_m psi_n psi_j.

    The product is accumulated in a canonical (sorted-index) order, so any
    permutation of the four indices returns bit-identical values.
    """
    for idx in (j, l, m, n):
        if not 0 <= idx < basis.n_modes:
            raise DomainError(f"mode index {idx} out of range [0, {basis.n_modes})")
    a, b, c, d = sorted((j, l, m, n))
    prod = basis.modes[a] * basis.modes[b]
    prod = prod * basis.modes[c]
    prod = prod * basis.modes[d]
    return float(np.sum(prod))


@dataclass(frozen=True)
class RenormalizedEnergies:
    """Mode energies shifted by the mean-field of a reference spectrum:

    E_j = e_j + 2 eps sum_n V[j,n,j,n] |c_n|^2
    """

    values: np.ndarray
    epsilon: float
    shift_amplitudes: np.ndarray

    def __post_init__(self) -> None:
        for name in ("values", "shift_amplitudes"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def mismatch(self, j: int, l: int, m: int, n: int) -> float:
        """E_n - E_l + E_m - E_j."""
        e = self.values
        return float(e[n] - e[l] + e[m] - e[j])


def nonlinear_shift(
    basis: EigenBasis, amplitudes: np.ndarray, epsilon: float
) -> RenormalizedEnergies:
    """Renormalize energies with diagonal overlaps against |c_n|^2 weights."""
    amps = np.asarray(amplitudes, dtype=float)
    if amps.shape != (basis.n_modes,):
        raise DomainError(
            f"amplitudes must have one entry per mode ({basis.n_modes}), got shape {amps.shape}"
        )
    if np.any(amps < 0):
        raise DomainError("amplitudes are squared moduli and must be >= 0")
    sq = basis.modes**2
    diag_overlap = sq @ sq.T  # [j, n] = sum_x psi_j^2 psi_n^2
    values = basis.energies + 2.0 * epsilon * (diag_overlap @ amps)
    return RenormalizedEnergies(values=values, epsilon=epsilon, shift_amplitudes=amps)


@dataclass(frozen=True)
class BroadeningSpec:
    """Finite-width stand-in for the energy delta.

    kind "gaussian": exp(-x^2 / 2 width^2) / (width sqrt(2 pi)).
    kind "fejer":    |D_T(x)|^2 / (2 pi T) with D_T(x) = (e^{ixT} - 1)/(ix),
                     the window that arises from integrating phases over a
                     horizon T. Both integrate to 1 over the real line.
    """

    kind: str
    width: float | None = None
    horizon: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "gaussian":
            if self.width is None or not self.width > 0:
                raise ConfigError("gaussian broadening needs width > 0")
            if self.horizon is not None:
                raise ConfigError("gaussian broadening takes no horizon")
        elif self.kind == "fejer":
            if self.horizon is None or not self.horizon > 0:
                raise ConfigError("fejer broadening needs horizon > 0")
            if self.width is not None:
                raise ConfigError("fejer broadening takes no width")
        else:
            raise ConfigError(f"unknown broadening kind {self.kind!r}")

    @property
    def effective_width(self) -> float:
        """Scale of the central lobe (exact width for gaussian)."""
        if self.kind == "gaussian":
            return float(self.width)
        return 2.0 * np.pi / float(self.horizon)


def broadened_delta(x, spec: BroadeningSpec):
    """Evaluate the broadened delta at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "gaussian":
        w = float(spec.width)
        out = np.exp(-0.5 * (x / w) ** 2) / (w * np.sqrt(2.0 * np.pi))
    else:
        t = float(spec.horizon)
        # (T / 2 pi) sinc^2(x T / 2 pi); sinc handles the removable x = 0
        out = (t / (2.0 * np.pi)) * np.sinc(x * t / (2.0 * np.pi)) ** 2
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class KernelTable:
    """Offset-indexed interaction kernel on the cube |dl|,|dm|,|dn| <= cutoff.

    values[dl + R, dm + R, dn + R] holds K(dl, dm, dn). Entries are
    non-negative and exactly symmetric under dm <-> dn; the center-exchange
    symmetry K(dl, dm, dn) = K(-dl, dm - dl, dn - dl) holds in expectation
    for empirical tables and exactly after symmetrize().
    """

    cutoff_radius: int
    values: np.ndarray
    epsilon: float
    n_realizations: int
    broadening: BroadeningSpec | None = None
    lattice: LatticeConfig | None = None
    seeds: tuple[int, ...] = ()
    symmetrized: bool = False

    def __post_init__(self) -> None:
        r = int(self.cutoff_radius)
        if r < 1:
            raise ConfigError(f"cutoff_radius must be >= 1, got {self.cutoff_radius}")
        vals = np.asarray(self.values, dtype=float)
        w = 2 * r + 1
        if vals.shape != (w, w, w):
            raise ConfigError(
                f"kernel values must have shape {(w, w, w)} for cutoff {r}, got {vals.shape}"
            )
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ConfigError("kernel values must be finite and >= 0")
        if not np.allclose(vals, vals.swapaxes(1, 2), rtol=1e-12, atol=1e-300):
            raise ConfigError("kernel values must be symmetric under dm <-> dn")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "cutoff_radius", r)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def value_at(self, dl: int, dm: int, dn: int) -> float:
        r = self.cutoff_radius
        if max(abs(dl), abs(dm), abs(dn)) > r:
            return 0.0
        return float(self.values[dl + r, dm + r, dn + r])

    def offsets(self):
        """Iterate (dl, dm, dn, value) over the cube."""
        r = self.cutoff_radius
        for dl in range(-r, r + 1):
            for dm in range(-r, r + 1):
                for dn in range(-r, r + 1):
                    yield dl, dm, dn, float(self.values[dl + r, dm + r, dn + r])

    def symmetrize(self) -> "KernelTable":
        """Project onto the full exchange-symmetry group of the physical
        kernel (see symmetrize_kernel_values)."""
        return KernelTable(
            cutoff_radius=self.cutoff_radius,
            values=symmetrize_kernel_values(self.values),
            epsilon=self.epsilon,
            n_realizations=self.n_realizations,
            broadening=self.broadening,
            lattice=self.lattice,
            seeds=self.seeds,
            symmetrized=True,
        )


# The physical kernel inherits the full exchange group of the quadruple
# (j, l | m, n): swapping j with l, m with n, or the pair (j, l) with
# (m, n) leaves |V|^2 delta(E) unchanged. In offset coordinates each group
# element remaps (dl, dm, dn) through the position tuple (0, dl, dm, dn).
_ROLE_ASSIGNMENTS = (
    (0, 1, 2, 3),
    (1, 0, 2, 3),
    (0, 1, 3, 2),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 0, 1),
    (2, 3, 1, 0),
    (3, 2, 1, 0),
)


def _offset_orbit(dl: int, dm: int, dn: int):
    pos = (0, dl, dm, dn)
    orbit = set()
    for a in _ROLE_ASSIGNMENTS:
        base = pos[a[0]]
        orbit.add((pos[a[1]] - base, pos[a[2]] - base, pos[a[3]] - base))
    return orbit


def symmetrize_kernel_values(values: np.ndarray) -> np.ndarray:
    """Average each offset over its exchange-group orbit.

    Orbits that leave the stored cube cannot be represented consistently,
    so their in-cube members are zeroed. The result, extended by zero, is
    invariant under the full group, which is what makes the kinetic
    collision operator conserve total intensity exactly.
    """
    values = np.asarray(values, dtype=float)
    w = values.shape[0]
    r = (w - 1) // 2
    out = np.zeros_like(values)
    done = np.zeros(values.shape, dtype=bool)
    for dl in range(-r, r + 1):
        for dm in range(-r, r + 1):
            for dn in range(-r, r + 1):
                if done[dl + r, dm + r, dn + r]:
                    continue
                orbit = _offset_orbit(dl, dm, dn)
                inside = all(max(abs(a), abs(b), abs(c)) <= r for a, b, c in orbit)
                if inside:
                    mean = sum(values[a + r, b + r, c + r] for a, b, c in orbit) / len(orbit)
                else:
                    mean = 0.0
                for a, b, c in orbit:
                    if max(abs(a), abs(b), abs(c)) <= r:
                        out[a + r, b + r, c + r] = mean
                        done[a + r, b + r, c + r] = True
    return out


def _realization_table(
    config: LatticeConfig,
    epsilon: float,
    spec: BroadeningSpec,
    cutoff: int,
    seed: int,
    reference_amplitudes: np.ndarray | None,
) -> np.ndarray:
    """Center-averaged |V|^2 delta_b(E) cube for a single disorder draw."""
    basis = solve_eigen(build_hamiltonian(config, sample_disorder(config, seed)))
    if reference_amplitudes is None:
        energies = basis.energies
    else:
        energies = nonlinear_shift(basis, reference_amplitudes, epsilon).values
    r = cutoff
    w = 2 * r + 1
    modes = basis.modes
    acc = np.zeros((w, w, w))
    centers = range(r, config.n_sites - r)
    for j in centers:
        block = modes[j - r : j + r + 1]
        pair_j = block * modes[j]
        pair_mn = (block[:, None, :] * block[None, :, :]).reshape(w * w, -1)
        v = (pair_j @ pair_mn.T).reshape(w, w, w)
        e = energies[j - r : j + r + 1]
        mismatch = e[None, :, None] + e[None, None, :] - e[:, None, None] - energies[j]
        acc += v * v * broadened_delta(mismatch, spec)
    acc *= 4.0 * np.pi * epsilon**2 / len(centers)
    # quadruples with {m, n} = {j, l} are excluded from every kinetic sum
    idx = np.arange(w)
    acc[idx, r, idx] = 0.0
    acc[idx, idx, r] = 0.0
    return acc


def kernel_table(
    config: LatticeConfig,
    epsilon: float,
    spec: BroadeningSpec,
    cutoff: int,
    seeds,
    *,
    reference_amplitudes: np.ndarray | None = None,
    workers: int = 1,
    enforce_min_size: bool = True,
) -> KernelTable:
    """Ensemble-averaged kernel over the given disorder seeds.

    Mode offsets run over the cube [-cutoff, cutoff]^3 around every center
    mode at least `cutoff` positions from the chain ends; the lattice must
    satisfy n_sites >= 10 cutoff so boundary modes stay out of the average.
    Tiny diagnostic lattices may drop that margin with
    enforce_min_size=False, as long as at least one interior center exists.
    Energy mismatches use bare eigenvalues unless reference_amplitudes are
    supplied. Per-seed cubes are reduced in seed order, so the result does
    not depend on worker scheduling.
    """
    cutoff = int(cutoff)
    if cutoff < 1:
        raise ConfigError(f"cutoff must be >= 1, got {cutoff}")
    if enforce_min_size and config.n_sites < 10 * cutoff:
        raise ConfigError(
            f"n_sites must be >= 10 * cutoff ({10 * cutoff}), got {config.n_sites}"
        )
    if config.n_sites <= 2 * cutoff:
        raise ConfigError(
            f"no interior center modes: n_sites = {config.n_sites} with cutoff {cutoff}"
        )
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigError("kernel_table needs at least one seed")
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")

    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tables = list(
                pool.map(
                    _realization_table,
                    [config] * len(seeds),
                    [epsilon] * len(seeds),
                    [spec] * len(seeds),
                    [cutoff] * len(seeds),
                    seeds,
                    [reference_amplitudes] * len(seeds),
                    chunksize=max(1, len(seeds) // (4 * workers)),
                )
            )
    else:
        tables = [
            _realization_table(config, epsilon, spec, cutoff, s, reference_amplitudes)
            for s in seeds
        ]

    total = np.zeros_like(tables[0])
    for t in tables:  # fixed seed order
        total += t
    total /= len(seeds)
    return KernelTable(
        cutoff_radius=cutoff,
        values=total,
        epsilon=epsilon,
        n_realizations=len(seeds),
        broadening=spec,
        lattice=config,
        seeds=tuple(seeds),
    )


def diffusion_coefficient(table: KernelTable) -> float:
    """Weighted kernel sum (1/12) sum K(dl,dm,dn) (dl - dm - dn)^2."""
    r = table.cutoff_radius
    d = np.arange(-r, r + 1)
    weight = (d[:, None, None] - d[None, :, None] - d[None, None, :]) ** 2
    return float(np.sum(table.values * weight) / 12.0)

"""One-dimensional disordered lattice: geometry, random potential, Hamiltonian.

The linear operator acting on a field psi is

    (H psi)_x = (psi_{x+1} + psi_{x-1} - 2 psi_x) / xi^2 + V_x psi_x

with V_x drawn i.i.d. uniform on [-w/2, w/2]. H is real symmetric and
tridiagonal (plus one corner entry for periodic rings).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .rng import DISORDER_STREAM, check_seed, make_rng


class Boundary(str, enum.Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class LatticeConfig:
    """Geometry and disorder parameters of the 1D lattice."""

    n_sites: int
    disorder_strength: float
    spacing: float = 1.0
    boundary: Boundary = Boundary.DIRICHLET

    def __post_init__(self) -> None:
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ConfigError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        if not self.spacing > 0:
            raise ConfigError(f"spacing must be > 0, got {self.spacing}")
        if not self.disorder_strength >= 0:
            raise ConfigError(
                f"disorder_strength must be >= 0, got {self.disorder_strength}"
            )
        try:
            boundary = Boundary(self.boundary)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if boundary is Boundary.PERIODIC and self.n_sites < 3:
            raise ConfigError("periodic rings need n_sites >= 3")

    @property
    def hopping(self) -> float:
        """Off-diagonal coupling 1/xi^2."""
        return 1.0 / self.spacing**2


@dataclass(frozen=True)
class DisorderRealization:
    """One sampled on-site potential together with the seed that made it."""

    potential: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        pot = np.asarray(self.potential, dtype=float)
        pot.setflags(write=False)
        object.__setattr__(self, "potential", pot)
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Symmetric tridiagonal operator; corner holds the periodic wrap term."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    corner: float | None = None

    def __post_init__(self) -> None:
        diag = np.asarray(self.diagonal, dtype=float)
        off = np.asarray(self.off_diagonal, dtype=float)
        if off.shape != (diag.size - 1,):
            raise ConfigError(
                f"off_diagonal must have length n_sites-1, got {off.size} for {diag.size} sites"
            )
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "off_diagonal", off)

    @property
    def n_sites(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        n = self.n_sites
        h = np.zeros((n, n))
        h[np.arange(n), np.arange(n)] = self.diagonal
        idx = np.arange(n - 1)
        h[idx, idx + 1] = self.off_diagonal
        h[idx + 1, idx] = self.off_diagonal
        if self.corner is not None:
            h[0, n - 1] += self.corner
            h[n - 1, 0] += self.corner
        return h

    def inf_norm(self) -> float:
        return float(np.abs(self.to_dense()).sum(axis=1).max())

    def spectrum_bounds(self) -> tuple[float, float]:
        """Gershgorin enclosure of the spectrum."""
        radius = np.zeros(self.n_sites)
        radius[:-1] += np.abs(self.off_diagonal)
        radius[1:] += np.abs(self.off_diagonal)
        if self.corner is not None:
            radius[0] += abs(self.corner)
            radius[-1] += abs(self.corner)
        return (
            float((self.diagonal - radius).min()),
            float((self.diagonal + radius).max()),
        )


def sample_disorder(config: LatticeConfig, seed: int) -> DisorderRealization:
    """Draw one i.i.d. uniform potential on [-w/2, w/2]."""
    rng = make_rng(seed, DISORDER_STREAM)
    half = 0.5 * config.disorder_strength
    potential = rng.uniform(-half, half, config.n_sites)
    return DisorderRealization(potential=potential, seed=seed)


def build_hamiltonian(
    config: LatticeConfig, disorder: DisorderRealization
) -> HamiltonianMatrix:
    """Assemble H for the given potential.

    Diagonal entries are -2/xi^2 + V_x, neighbor coupling is +1/xi^2.
    """
    if disorder.potential.size != config.n_sites:
        raise ConfigError(
            f"potential length {disorder.potential.size} does not match "
            f"n_sites {config.n_sites}"
        )
    hop = config.hopping
    diagonal = -2.0 * hop + disorder.potential
    off_diagonal = np.full(config.n_sites - 1, hop)
    corner = hop if config.boundary is Boundary.PERIODIC else None
    return HamiltonianMatrix(diagonal=diagonal, off_diagonal=off_diagonal, corner=corner)

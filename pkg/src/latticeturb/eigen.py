"""Orthonormal eigenbasis of the lattice Hamiltonian.

Modes are indexed by their localization center (the site where |psi|^2
peaks), not by energy, so that mode index differences behave like lattice
distances in the interaction sums downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError
from .lattice import HamiltonianMatrix


@dataclass(frozen=True)
class EigenBasis:
    """Full eigendecomposition, center-sorted.

    energies[j] and modes[j] (a row of length n_sites) belong together.
    Sign convention: the largest-magnitude entry of each mode is positive,
    ties broken by lower site index. Modes are sorted by localization
    center, then energy, then pre-sort position, so the ordering is a
    deterministic function of the matrix.
    """

    energies: np.ndarray
    modes: np.ndarray
    center_of_mode: np.ndarray

    def __post_init__(self) -> None:
        for name in ("energies", "modes", "center_of_mode"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self) -> int:
        return self.energies.size

    @property
    def n_sites(self) -> int:
        return self.modes.shape[1]


def solve_eigen(hamiltonian: HamiltonianMatrix) -> EigenBasis:
    """Diagonalize H and return the center-sorted orthonormal basis."""
    try:
        if hamiltonian.corner is None:
            energies, vectors = scipy.linalg.eigh_tridiagonal(
                hamiltonian.diagonal, hamiltonian.off_diagonal
            )
        else:
            energies, vectors = np.linalg.eigh(hamiltonian.to_dense())
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc

    # columns of `vectors` are eigenvectors; fix signs deterministically
    peak = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[peak, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs

    centers = np.square(vectors).argmax(axis=0)
    order = np.lexsort((np.arange(energies.size), energies, centers))
    return EigenBasis(
        energies=energies[order],
        modes=vectors[:, order].T.copy(),
        center_of_mode=centers[order],
    )


def participation_ratio(mode: np.ndarray) -> float:
    """Inverse of sum(psi^4) for a normalized mode; 1 for a single site,
    n_sites for a uniform mode."""
    mode = np.asarray(mode, dtype=float)
    s4 = float(np.sum(mode**4))
    if s4 == 0.0:
        raise DomainError("participation ratio of a zero vector is undefined")
    return 1.0 / s4


@dataclass(frozen=True)
class LocalizationReport:
    participation_ratios: np.ndarray
    mean_localization_length: float


def localization_report(basis: EigenBasis) -> LocalizationReport:
    ratios = 1.0 / np.sum(basis.modes**4, axis=1)
    return LocalizationReport(
        participation_ratios=ratios,
        mean_localization_length=float(ratios.mean()),
    )

"""Independent reference implementations used only by the test suite.

Each oracle recomputes a result through a different algorithm or a direct
definition-level sum, deliberately avoiding the package's vectorized code
paths so that structural mistakes (index maps, exclusions, prefactors)
cannot cancel between implementation and test.
"""

from __future__ import annotations

import math

import numba
import numpy as np
import scipy.integrate
import scipy.special


@numba.njit(cache=True)
def _jacobi_sweeps(a, v):  # pragma: no cover - compiled
    n = a.shape[0]
    for _ in range(200):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off <= 1e-30 * n * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq


def jacobi_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigenvalues ascending, eigenvectors as columns).
    """
    a = np.array(matrix, dtype=float, copy=True)
    if not np.allclose(a, a.T):
        raise ValueError("jacobi_eigh needs a symmetric matrix")
    n = a.shape[0]
    v = np.eye(n)
    _jacobi_sweeps(a, v)
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def brute_force_kernel_cube(
    modes: np.ndarray,
    energies: np.ndarray,
    epsilon: float,
    delta,
    cutoff: int,
) -> np.ndarray:
    """Definition-level kernel: explicit loops over centers and quadruples.

    modes has one eigenvector per row; delta is a scalar function of the
    energy mismatch. Mirrors the documented average: centers at least
    `cutoff` from either end, diagonal-excluded cells zero, prefactor
    4 pi eps^2, divided by the number of centers.
    """
    n = modes.shape[0]
    r = cutoff
    w = 2 * r + 1
    acc = np.zeros((w, w, w))
    centers = list(range(r, n - r))
    for j in centers:
        for dl in range(-r, r + 1):
            for dm in range(-r, r + 1):
                for dn in range(-r, r + 1):
                    l, m, nn = j + dl, j + dm, j + dn
                    overlap = 0.0
                    for x in range(modes.shape[1]):
                        overlap += modes[l, x] * modes[m, x] * modes[nn, x] * modes[j, x]
                    mismatch = energies[m] + energies[nn] - energies[l] - energies[j]
                    acc[dl + r, dm + r, dn + r] += overlap * overlap * float(delta(mismatch))
    acc *= 4.0 * math.pi * epsilon**2 / len(centers)
    for d in range(-r, r + 1):
        acc[d + r, r, d + r] = 0.0
        acc[d + r, d + r, r] = 0.0
    return acc


def two_mode_collision_rates(n0: float, n1: float) -> tuple[float, float]:
    """Exhaustive 8-triple enumeration of the collision sum for two modes
    with an all-ones kernel and the two diagonal exclusions."""
    n = (n0, n1)
    out = []
    for j in (0, 1):
        total = 0.0
        for l in (0, 1):
            for m in (0, 1):
                for q in (0, 1):
                    if (q == l and m == j) or (q == j and m == l):
                        continue
                    total += (
                        n[l] * n[m] * n[q]
                        + n[q] * n[m] * n[j]
                        - n[j] * n[q] * n[l]
                        - n[l] * n[j] * n[m]
                    )
        out.append(total)
    return out[0], out[1]


def dense_ode_evolve(
    psi0: np.ndarray, h_dense: np.ndarray, epsilon: float, t_final: float
) -> np.ndarray:
    """High-order reference integration of i dPsi/dt = H Psi + eps |Psi|^2 Psi.

    Integrates the stacked real system with DOP853 at tight tolerances.
    """
    n = psi0.shape[0]

    def rhs(_t, y):
        psi = y[:n] + 1j * y[n:]
        dpsi = -1j * (h_dense @ psi + epsilon * np.abs(psi) ** 2 * psi)
        return np.concatenate([dpsi.real, dpsi.imag])

    y0 = np.concatenate([psi0.real, psi0.imag])
    sol = scipy.integrate.solve_ivp(
        rhs, (0.0, t_final), y0, method="DOP853", rtol=1e-12, atol=1e-13
    )
    if not sol.success:
        raise RuntimeError(f"reference ODE integration failed: {sol.message}")
    y = sol.y[:, -1]
    return y[:n] + 1j * y[n:]


def quad_unit_mass(delta, half_width: float) -> float:
    """Adaptive quadrature of a broadened delta over [-half_width, half_width]."""
    value, _ = scipy.integrate.quad(delta, -half_width, half_width, limit=400)
    return value


def fejer_tail_mass(horizon: float, half_width: float) -> float:
    """Exact mass of the Fejer window beyond |x| > half_width.

    With u = x T / 2 the density is (1/pi) sin^2(u)/u^2 du, and
    int_U^inf sin^2 u / u^2 du = 1/(2U) - cos(2U)/(2U) + pi/2 - Si(2U).
    """
    big_u = half_width * horizon / 2.0
    si, _ = scipy.special.sici(2.0 * big_u)
    one_side = (
        1.0 / (2.0 * big_u)
        - math.cos(2.0 * big_u) / (2.0 * big_u)
        + math.pi / 2.0
        - si
    ) / math.pi
    return 2.0 * one_side


def direct_second_moment(values: np.ndarray, coords: np.ndarray, center: float) -> float:
    total = 0.0
    spacing = coords[1] - coords[0]
    for v, k in zip(values, coords):
        total += (k - center) ** 2 * v * spacing
    return total


def barenblatt_moment_quadrature(m: float, front: float) -> float:
    """int xi^2 f(xi) d xi over the support by adaptive quadrature."""
    coeff = (m - 1.0) / (2.0 * m * (m + 1.0))

    def integrand(xi):
        return xi * xi * (coeff * (front**2 - xi**2)) ** (1.0 / (m - 1.0))

    value, _ = scipy.integrate.quad(integrand, -front, front, limit=200)
    return value

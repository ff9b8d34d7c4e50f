"""Collision operator and kinetic time stepping."""

import numpy as np
import pytest

from latticeturb import (
    ClipLog,
    ConfigError,
    DivergenceError,
    DomainError,
    KernelTable,
    SpectrumField,
    collision_rhs,
    collision_scale,
    evolve_kinetic,
    step_kinetic,
    symmetrize_kernel_values,
)
from oracles import two_mode_collision_rates


def random_symmetric_kernel(r: int, seed: int, scale: float = 1.0) -> KernelTable:
    """Random table with the full exchange symmetry (conserves mass exactly)."""
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.0, scale, (2 * r + 1,) * 3)
    v = 0.5 * (v + v.swapaxes(1, 2))
    return KernelTable(
        cutoff_radius=r,
        values=symmetrize_kernel_values(v),
        epsilon=1.0,
        n_realizations=1,
        symmetrized=True,
    )


def ones_kernel(r: int) -> KernelTable:
    return KernelTable(
        cutoff_radius=r, values=np.ones((2 * r + 1,) * 3), epsilon=1.0, n_realizations=1
    )


def bump_spectrum(n: int, seed: int = 0) -> SpectrumField:
    rng = np.random.default_rng(seed)
    j = np.arange(n, dtype=float)
    values = np.exp(-((j - n / 2) ** 2) / 8.0) * (1.0 + 0.1 * rng.random(n))
    return SpectrumField.on_lattice(values)


class TestSpectrumField:
    def test_on_lattice_and_mass(self):
        field = SpectrumField.on_lattice([1.0, 2.0, 3.0], start_index=5)
        assert np.array_equal(field.coords, [5.0, 6.0, 7.0])
        assert field.spacing == 1.0
        assert field.mass == 6.0

    def test_grid_mass_uses_spacing(self):
        field = SpectrumField(values=[2.0, 2.0, 2.0], coords=[0.0, 0.5, 1.0])
        assert field.mass == pytest.approx(3.0)

    def test_with_values_keeps_coords(self):
        field = SpectrumField.on_lattice([1.0, 2.0])
        other = field.with_values([3.0, 4.0])
        assert np.array_equal(other.coords, field.coords)

    def test_validation(self):
        with pytest.raises(DomainError):
            SpectrumField(values=[1.0, -0.5], coords=[0.0, 1.0])
        with pytest.raises(DomainError):
            SpectrumField(values=[1.0, np.nan], coords=[0.0, 1.0])
        with pytest.raises(DomainError):
            SpectrumField(values=[1.0, 2.0], coords=[1.0, 0.0])
        with pytest.raises(DomainError):
            SpectrumField(values=[1.0, 2.0, 3.0], coords=[0.0, 1.0, 3.0])
        with pytest.raises(DomainError):
            SpectrumField(values=[1.0], coords=[0.0])


class TestCollisionRhs:
    def test_constant_spectrum_is_stationary(self):
        kernel = random_symmetric_kernel(2, seed=1)
        spectrum = SpectrumField.on_lattice(np.full(20, 0.7))
        rhs = collision_rhs(spectrum, kernel)
        assert np.array_equal(rhs, np.zeros(20))

    def test_two_mode_toy_matches_enumeration(self):
        spectrum = SpectrumField.on_lattice([1.0, 2.0])
        rhs = collision_rhs(spectrum, ones_kernel(1))
        assert np.array_equal(rhs, [9.0, -9.0])
        assert two_mode_collision_rates(1.0, 2.0) == (9.0, -9.0)

    def test_two_mode_pattern_for_other_values(self):
        n0, n1 = 0.3, 1.7
        rhs = collision_rhs(SpectrumField.on_lattice([n0, n1]), ones_kernel(1))
        oracle = two_mode_collision_rates(n0, n1)
        assert rhs[0] == pytest.approx(oracle[0], rel=1e-14)
        assert rhs[1] == pytest.approx(oracle[1], rel=1e-14)
        # (N0+N1)^2 (N1-N0) pattern
        assert rhs[0] == pytest.approx((n0 + n1) ** 2 * (n1 - n0), rel=1e-12)

    def test_mass_conserved_for_symmetric_kernel(self):
        kernel = random_symmetric_kernel(3, seed=2)
        spectrum = bump_spectrum(40, seed=3)
        rhs = collision_rhs(spectrum, kernel)
        scale = collision_scale(spectrum, kernel)
        assert abs(rhs.sum()) <= 1e-12 * scale

    def test_cubic_amplitude_scaling(self):
        kernel = random_symmetric_kernel(2, seed=4)
        spectrum = bump_spectrum(24, seed=5)
        lam = 1.9
        rhs = collision_rhs(spectrum, kernel)
        scaled = collision_rhs(spectrum.with_values(lam * spectrum.values), kernel)
        assert np.allclose(scaled, lam**3 * rhs, rtol=1e-12, atol=1e-300)

    def test_zero_padding_matches_wider_grid(self):
        kernel = random_symmetric_kernel(2, seed=6)
        inner = bump_spectrum(30, seed=7)
        pad = 6
        wide_values = np.concatenate([np.zeros(pad), inner.values, np.zeros(pad)])
        wide = SpectrumField.on_lattice(wide_values)
        rhs_inner = collision_rhs(inner, kernel)
        rhs_wide = collision_rhs(wide, kernel)
        # interior cells see identical windows on both grids
        r = kernel.cutoff_radius
        assert np.array_equal(rhs_wide[pad + r : pad + 30 - r], rhs_inner[r : 30 - r])
        # cells far from the support stay silent
        assert np.array_equal(rhs_wide[: pad - 2 * r], np.zeros(pad - 2 * r))

    def test_grid_too_small_for_cutoff(self):
        kernel = random_symmetric_kernel(3, seed=8)
        with pytest.raises(ConfigError):
            collision_rhs(SpectrumField.on_lattice([1.0, 1.0, 1.0]), kernel)


class TestStepKinetic:
    def test_constant_spectrum_unchanged(self):
        kernel = random_symmetric_kernel(2, seed=1)
        spectrum = SpectrumField.on_lattice(np.full(16, 1.3))
        out = step_kinetic(spectrum, kernel, dt=0.1, n_steps=25)
        assert np.array_equal(out.values, spectrum.values)

    def test_short_run_mass_drift(self):
        kernel = random_symmetric_kernel(2, seed=2)
        spectrum = bump_spectrum(30, seed=3)
        out = step_kinetic(spectrum, kernel, dt=0.01, n_steps=50)
        assert abs(out.mass - spectrum.mass) / spectrum.mass < 1e-8

    def test_fourth_order_convergence(self):
        kernel = random_symmetric_kernel(2, seed=4)
        spectrum = bump_spectrum(20, seed=5)
        t_final = 0.4
        reference = step_kinetic(spectrum, kernel, dt=t_final / 2048, n_steps=2048)
        coarse = step_kinetic(spectrum, kernel, dt=t_final / 32, n_steps=32)
        fine = step_kinetic(spectrum, kernel, dt=t_final / 64, n_steps=64)
        e_coarse = np.max(np.abs(coarse.values - reference.values))
        e_fine = np.max(np.abs(fine.values - reference.values))
        ratio = e_coarse / e_fine
        assert 12.0 < ratio < 22.0

    def test_divergence_error(self):
        kernel = ones_kernel(1)
        spectrum = SpectrumField.on_lattice([1e3, 2e3, 3e3])
        with pytest.raises(DivergenceError):
            step_kinetic(spectrum, kernel, dt=1e6, n_steps=50)

    def test_negative_clip_counted(self):
        kernel = ones_kernel(1)
        spectrum = SpectrumField.on_lattice([0.05, 2.0])
        clip_log = ClipLog()
        out = step_kinetic(spectrum, kernel, dt=0.35, n_steps=2, clip_log=clip_log)
        assert clip_log.events > 0
        assert clip_log.magnitude > 0
        assert np.all(out.values >= 0)

    def test_zero_steps_identity(self):
        kernel = random_symmetric_kernel(1, seed=6)
        spectrum = bump_spectrum(10, seed=7)
        out = step_kinetic(spectrum, kernel, dt=0.1, n_steps=0)
        assert np.array_equal(out.values, spectrum.values)

    def test_argument_validation(self):
        kernel = random_symmetric_kernel(1, seed=6)
        spectrum = bump_spectrum(10, seed=7)
        with pytest.raises(ConfigError):
            step_kinetic(spectrum, kernel, dt=0.0, n_steps=1)
        with pytest.raises(ConfigError):
            step_kinetic(spectrum, kernel, dt=0.1, n_steps=-1)


class TestEvolveKinetic:
    def test_exact_record_landings(self):
        kernel = random_symmetric_kernel(2, seed=1)
        spectrum = bump_spectrum(24, seed=2)
        run = evolve_kinetic(spectrum, kernel, dt=0.03, record_times=[0.1, 0.25, 0.7])
        assert np.array_equal(run.times, [0.0, 0.1, 0.25, 0.7])
        assert len(run.snapshots) == 4
        assert run.snapshots[0] is spectrum

    def test_even_segments_match_plain_stepping(self):
        kernel = random_symmetric_kernel(2, seed=3)
        spectrum = bump_spectrum(24, seed=4)
        run = evolve_kinetic(spectrum, kernel, dt=0.1, record_times=[0.2, 0.4])
        direct = step_kinetic(spectrum, kernel, dt=0.1, n_steps=4)
        assert np.array_equal(run.snapshots[-1].values, direct.values)

    def test_mass_conserved_along_run(self):
        kernel = random_symmetric_kernel(2, seed=5)
        spectrum = bump_spectrum(30, seed=6)
        run = evolve_kinetic(spectrum, kernel, dt=0.02, record_times=[0.2, 0.5, 1.0])
        for snap in run.snapshots:
            assert abs(snap.mass - spectrum.mass) / spectrum.mass < 1e-10

    def test_record_times_validation(self):
        kernel = random_symmetric_kernel(1, seed=7)
        spectrum = bump_spectrum(10, seed=8)
        with pytest.raises(ConfigError):
            evolve_kinetic(spectrum, kernel, dt=0.1, record_times=[])
        with pytest.raises(ConfigError):
            evolve_kinetic(spectrum, kernel, dt=0.1, record_times=[0.2, 0.2])
        with pytest.raises(ConfigError):
            evolve_kinetic(spectrum, kernel, dt=0.1, record_times=[-0.1, 0.2])

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticeturb import (
    Boundary,
    ConfigError,
    DisorderRealization,
    LatticeConfig,
    build_hamiltonian,
    check_seed,
    make_rng,
    sample_disorder,
)


def test_zero_disorder_gives_zero_potential():
    config = LatticeConfig(n_sites=16, disorder_strength=0.0)
    assert np.all(sample_disorder(config, 123).potential == 0.0)


def test_samples_stay_inside_half_width_interval():
    config = LatticeConfig(n_sites=4096, disorder_strength=1.0)
    v = sample_disorder(config, 99).potential
    assert np.all(v >= -0.5)
    assert np.all(v <= 0.5)


def test_uniform_moments_match_distribution():
    config = LatticeConfig(n_sites=10**6, disorder_strength=1.0)
    v = sample_disorder(config, 2024).potential
    assert abs(v.mean()) < 5e-3
    assert abs(v.var() - 1.0 / 12.0) < 0.02 / 12.0


@given(seed=st.integers(min_value=0, max_value=2**64 - 1), n=st.integers(2, 64))
def test_sampling_is_reproducible(seed, n):
    config = LatticeConfig(n_sites=n, disorder_strength=2.5)
    a = sample_disorder(config, seed).potential
    b = sample_disorder(config, seed).potential
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    config = LatticeConfig(n_sites=64, disorder_strength=1.0)
    assert not np.array_equal(
        sample_disorder(config, 1).potential, sample_disorder(config, 2).potential
    )


def test_disorder_and_phase_streams_are_independent():
    a = make_rng(7, 0).random(8)
    b = make_rng(7, 1).random(8)
    assert not np.array_equal(a, b)


def test_seed_range_is_enforced():
    check_seed(0)
    check_seed(2**64 - 1)
    with pytest.raises(ConfigError):
        check_seed(-1)
    with pytest.raises(ConfigError):
        check_seed(2**64)


def test_hamiltonian_clean_three_site_chain():
    config = LatticeConfig(n_sites=3, disorder_strength=0.0, spacing=1.0)
    h = build_hamiltonian(config, sample_disorder(config, 0))
    assert np.allclose(h.diagonal, [-2.0, -2.0, -2.0])
    assert np.allclose(h.off_diagonal, [1.0, 1.0])
    assert h.corner is None


def test_hamiltonian_two_sites_with_potential_and_spacing():
    config = LatticeConfig(n_sites=2, disorder_strength=1.0, spacing=2.0)
    disorder = DisorderRealization(potential=np.array([0.1, -0.1]), seed=0)
    h = build_hamiltonian(config, disorder)
    assert np.allclose(h.diagonal, [-0.5 + 0.1, -0.5 - 0.1])
    assert np.allclose(h.off_diagonal, [0.25])


@given(
    n=st.integers(2, 32),
    strength=st.floats(0.0, 10.0),
    seed=st.integers(0, 2**32),
    spacing=st.floats(0.25, 4.0),
)
def test_hamiltonian_is_symmetric_with_gershgorin_spectrum(n, strength, seed, spacing):
    config = LatticeConfig(n_sites=n, disorder_strength=strength, spacing=spacing)
    h = build_hamiltonian(config, sample_disorder(config, seed))
    dense = h.to_dense()
    assert np.array_equal(dense, dense.T)
    lo, hi = h.spectrum_bounds()
    assert lo <= hi
    eigs = np.linalg.eigvalsh(dense)
    assert eigs.min() >= lo - 1e-9
    assert eigs.max() <= hi + 1e-9


def test_periodic_chain_gets_corner_coupling():
    config = LatticeConfig(
        n_sites=5, disorder_strength=0.0, boundary=Boundary.PERIODIC
    )
    h = build_hamiltonian(config, sample_disorder(config, 0))
    assert h.corner == 1.0
    dense = h.to_dense()
    assert dense[0, -1] == 1.0
    assert dense[-1, 0] == 1.0


def test_length_mismatch_is_rejected():
    config = LatticeConfig(n_sites=4, disorder_strength=1.0)
    other = LatticeConfig(n_sites=5, disorder_strength=1.0)
    with pytest.raises(ConfigError):
        build_hamiltonian(config, sample_disorder(other, 1))


def test_config_validation():
    with pytest.raises(ConfigError):
        LatticeConfig(n_sites=1, disorder_strength=0.0)
    with pytest.raises(ConfigError):
        LatticeConfig(n_sites=8, disorder_strength=-0.5)
    with pytest.raises(ConfigError):
        LatticeConfig(n_sites=8, disorder_strength=0.0, spacing=0.0)
    with pytest.raises(ConfigError):
        LatticeConfig(n_sites=2, disorder_strength=0.0, boundary="periodic")
    with pytest.raises(ConfigError):
        LatticeConfig(n_sites=8, disorder_strength=0.0, boundary="moebius")

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loschmidt import dynamics as D
from loschmidt import linalg, models
from loschmidt import purification as P
from loschmidt.errors import DimMismatch, DomainError
from loschmidt.linalg import SIGMA_0, SIGMA_Z

seeds = st.integers(0, 2**32 - 1)


def qubit(beta, R_vec):
    spec = models.TwoLevelSpec(R_vec, beta)
    return models.two_level_density(spec), models.two_level_hamiltonian(R_vec), spec


def test_evolve_zero_time(rng):
    W0 = P.amplitude_from_density(linalg.random_density(3, rng))
    H = linalg.random_hermitian(3, rng)
    assert np.allclose(D.evolve_amplitude(W0, H, 0.0).mat, W0.mat)


def test_quasistatic_density_frozen():
    rho, H, _ = qubit(0.9, (0.3, -0.4, 1.1))
    W0 = P.amplitude_from_density(rho)
    for t in np.linspace(0, 7, 15):
        Wt = D.evolve_amplitude(W0, H, t)
        assert np.max(np.abs(Wt.density() - rho)) < 1e-12


def test_evolution_in_purified_picture(rng):
    rho = linalg.random_density(3, rng)
    H = linalg.random_hermitian(3, rng)
    W0 = P.amplitude_from_density(rho, linalg.random_unitary(3, rng))
    t = 1.3
    lhs = P.purify(D.evolve_amplitude(W0, H, t)).vec
    rhs = linalg.kron(linalg.expm_i(H, t), np.eye(3)) @ P.purify(W0).vec
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    rho_t = D.evolve_amplitude(W0, H, t).density()
    assert np.max(np.abs(rho_t - D.evolve_density(rho, H, t))) < 1e-10


def test_dimension_mismatch():
    with pytest.raises(DimMismatch):
        D.loschmidt_amplitude(np.eye(2) / 2, np.eye(3), 1.0)
    with pytest.raises(DimMismatch):
        D.evolve_amplitude(P.Amplitude(np.eye(2) / math.sqrt(2)), np.eye(3), 1.0)


def test_loschmidt_two_level_quasistatic():
    beta, R_vec = 0.7, (0.2, 0.5, -0.9)
    rho, H, spec = qubit(beta, R_vec)
    w = spec.R
    for t in np.linspace(0, 5, 11):
        expected = math.cos(w * t) + 1j * math.sin(w * t) * math.tanh(beta * w)
        assert abs(D.loschmidt_amplitude(rho, H, t) - expected) < 1e-12


def test_loschmidt_two_level_quench_zero():
    R_f = np.array([0.0, 0.0, 1.4])
    R0 = np.array([0.5, 0.3, 0.0])  # perpendicular to R_f
    rho0 = models.bloch_density(R0)
    t = math.pi / (2 * 1.4)
    assert abs(D.loschmidt_amplitude(rho0, models.two_level_hamiltonian(R_f), t)) < 1e-15


def test_loschmidt_three_level_quench_matches_closed_form():
    for theta in (0.3, math.pi / 5, 2 * math.pi / 5, 2.0):
        spec = models.ThreeLevelSpec(1.3, theta, 0.8, 0.6)
        rho0 = models.three_level_density(spec.R, spec.beta)
        H = models.three_level_quench_hamiltonian(spec.R, theta, spec.phi)
        for t in np.linspace(0, 6, 13):
            assert abs(D.loschmidt_amplitude(rho0, H, t) - models.three_level_quench_G(spec, t)) < 1e-12


def test_series_matches_pointwise(rng):
    rho = linalg.random_density(3, rng)
    H = linalg.random_hermitian(3, rng)
    times = np.linspace(-2, 5, 17)
    series = D.loschmidt_series(rho, H, times)
    assert np.allclose(series, [D.loschmidt_amplitude(rho, H, t) for t in times], atol=1e-13)


@given(seeds, st.integers(2, 4), st.floats(-20, 20))
def test_amplitude_bounds(seed, d, t):
    r = np.random.default_rng(seed)
    rho = linalg.random_density(d, r)
    H = linalg.random_hermitian(d, r)
    assert abs(D.loschmidt_amplitude(rho, H, 0.0) - 1) < 1e-12
    sample = D.sample(rho, H, t)
    assert abs(sample.G) <= 1 + 1e-10
    assert abs(sample.echo - (sample.G * sample.G.conjugate()).real) < 1e-14


@given(seeds, st.floats(0, 10))
def test_quasistatic_invariance(seed, t):
    r = np.random.default_rng(seed)
    H = linalg.random_hermitian(3, r)
    rho = P.DensityMatrix.thermal(H, float(r.uniform(0.1, 3))).mat
    assert np.max(np.abs(D.evolve_density(rho, H, t) - rho)) < 1e-12


def test_process_kind():
    rho, H, _ = qubit(1.0, (0, 0, 1))
    assert D.ProcessKind.for_state(rho, H).tag is D.Process.QUASISTATIC
    Hx = models.two_level_hamiltonian((1, 0, 0))
    kind = D.ProcessKind.for_state(rho, Hx)
    assert kind.tag is D.Process.QUENCH
    with pytest.raises(DomainError):
        D.ProcessKind(D.Process.QUASISTATIC, Hx).validate(rho)


def test_dynamical_phase_examples():
    assert D.dynamical_phase(1.0) == 0.0
    assert D.dynamical_phase(0.5j) == pytest.approx(math.pi / 2)
    assert D.dynamical_phase(-1.0) == math.pi
    assert D.dynamical_phase(complex(-1.0, -0.0)) == math.pi
    assert D.dynamical_phase(1e-11) is None


def test_dynamical_phase_high_temperature_limit():
    """Approaching T -> infinity at omega t = pi/2 the phase stays at +pi/2."""
    for beta in (1e-1, 1e-3, 1e-6):
        _, _, spec = qubit(beta, (0, 0, 1))
        G = models.two_level_quasistatic_G(spec, math.pi / 2)
        assert D.dynamical_phase(G) == pytest.approx(math.pi / 2, abs=1e-9)


def test_phase_series_marks_zeros_and_unwraps():
    G = np.exp(1j * np.linspace(0, 4 * math.pi, 50))
    G[10] = 0
    raw = D.phase_series(G)
    assert math.isnan(raw[10])
    assert np.all((raw[~np.isnan(raw)] > -math.pi) & (raw[~np.isnan(raw)] <= math.pi))
    cont = D.phase_series(G, continuous=True)
    assert cont[-1] == pytest.approx(4 * math.pi)


def test_free_energy_examples():
    assert D.free_energy_density(1.0) == 0.0
    assert D.free_energy_density(math.exp(-0.5)) == pytest.approx(1.0)
    assert D.free_energy_density(math.exp(-0.5), L=4) == pytest.approx(0.25)
    assert D.free_energy_density(0.0) == D.RATE_CAP
    assert D.is_divergent(D.free_energy_density(0.0))
    with pytest.raises(ValueError):
        D.free_energy_density(0.5, L=0)


def test_free_energy_diverges_at_quench_transition():
    theta = math.pi / 5
    T_h = models.critical_temperatures_analytic(models.CriticalKind.THREE_LEVEL_QUENCH, 1.0, theta)
    spec = models.ThreeLevelSpec(1.0, theta, 0.0, 1 / T_h)
    G = models.three_level_quench_G(spec, math.pi / 2)
    assert D.free_energy_density(G) >= D.RATE_CAP
    rho0 = models.three_level_density(1.0, 1 / T_h)
    H = models.three_level_quench_hamiltonian(1.0, theta, 0.0)
    assert D.sample(rho0, H, math.pi / 2).divergent


def test_zero_times_infinite_temperature():
    zeros = D.find_zero_times(SIGMA_0 / 2, SIGMA_Z, 0.0, 10.0, n_grid=512)
    times = [z.t for z in zeros if z.is_zero]
    assert len(times) == 3
    for n, t in enumerate(times):
        assert abs(t - (n + 0.5) * math.pi) < 1e-8


def test_zero_times_finite_temperature_none():
    rho, H, _ = qubit(0.5, (0, 0, 1))
    zeros = D.find_zero_times(rho, H, 0.0, 10.0)
    assert not any(z.is_zero for z in zeros)
    mags = np.abs(D.loschmidt_series(rho, H, np.linspace(0, 10, 4001)))
    assert mags.min() > math.tanh(0.5) - 1e-9


def test_zero_times_three_level_quasistatic():
    R = 1.5
    spec = models.ThreeLevelSpec(R, beta=math.log(2) / (2 * R))
    rho0 = models.three_level_density(R, spec.beta)
    zeros = [z for z in D.find_zero_times(rho0, models.three_level_hamiltonian(R), 0.0, 8.0) if z.is_zero]
    expected = [(n + 0.5) * math.pi / R for n in range(4)]
    assert len(zeros) == len(expected)
    for z, t in zip(zeros, expected):
        assert abs(z.t - t) < 1e-8 and z.magnitude < 1e-8


def test_zero_times_validation():
    with pytest.raises(ValueError):
        D.find_zero_times(SIGMA_0 / 2, SIGMA_Z, 1.0, 0.0)
    with pytest.raises(ValueError):
        D.find_zero_times(SIGMA_0 / 2, SIGMA_Z, 0.0, 1.0, n_grid=8)


@given(st.floats(0.05, 5), st.floats(0.1, 3), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.2, 1))
def test_thermal_quench_has_no_finite_temperature_zero(beta, E, rx, ry, rz):
    R_f = np.array([rx, ry, rz])
    w = float(np.linalg.norm(R_f))
    times = np.linspace(0, 2 * math.pi / w, 2001)
    G = models.two_level_thermal_quench_G(E, beta, R_f, times)
    assert np.min(np.abs(G)) > 0


def test_three_level_quasistatic_phase_jump():
    R = 1.0
    T_q = models.critical_temperatures_analytic(models.CriticalKind.THREE_LEVEL_QUASISTATIC, R)
    eps = 1e-4 * T_q
    for n in range(3):
        t = (n + 0.5) * math.pi / R
        below = D.dynamical_phase(models.three_level_quasistatic_G(models.ThreeLevelSpec(R, beta=1 / (T_q - eps)), t))
        above = D.dynamical_phase(models.three_level_quasistatic_G(models.ThreeLevelSpec(R, beta=1 / (T_q + eps)), t))
        assert abs(abs(below - above) - math.pi) < 1e-6

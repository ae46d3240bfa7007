"""Tests for two-level density matrices."""
import cmath
import math

import numpy as np
import pytest

from src.exceptions import InvalidStateError, UnphysicalParameterError
from src.qdmat import (
    DensityMatrix2,
    PauliBasisLabel,
    dephase_evolve,
    psi_minus,
    psi_plus,
    trace_distance,
    von_neumann_entropy,
)


def test_state_validation():
    """Trace, population and positivity violations are rejected."""
    with pytest.raises(InvalidStateError):
        DensityMatrix2(0.6, 0.6, 0j)
    with pytest.raises(InvalidStateError):
        DensityMatrix2(1.5, -0.5, 0j)
    with pytest.raises(InvalidStateError):
        DensityMatrix2(0.5, 0.5, 0.6)
    with pytest.raises(InvalidStateError):
        DensityMatrix2(math.nan, 0.5, 0j)


def test_rounding_noise_is_clamped():
    rho = DensityMatrix2(0.5, 0.5, 0.5 + 1e-14)
    assert abs(rho.rho01) ** 2 <= rho.rho00 * rho.rho11
    edge = DensityMatrix2(1.0 + 1e-13, -1e-13, 0j)
    assert edge.rho00 == 1.0 and edge.rho11 == 0.0


def test_from_amplitudes():
    rho = DensityMatrix2.from_amplitudes(math.sqrt(0.5), -1j * math.sqrt(0.5))
    assert rho.rho00 == pytest.approx(0.5)
    assert rho.rho01 == pytest.approx(0.5j)
    with pytest.raises(InvalidStateError):
        DensityMatrix2.from_amplitudes(1.0, 1.0)


def test_from_bloch_is_pure():
    rho = DensityMatrix2.from_bloch(1.1, 2.3)
    low, high = rho.eigenvalues()
    assert low == pytest.approx(0.0, abs=1e-12)
    assert high == pytest.approx(1.0)


def test_matrix_round_trip_and_hermiticity():
    rho = DensityMatrix2(0.3, 0.7, 0.2 - 0.1j)
    assert DensityMatrix2.from_matrix(rho.to_matrix()) == rho
    with pytest.raises(InvalidStateError):
        DensityMatrix2.from_matrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(InvalidStateError):
        DensityMatrix2.from_matrix(np.eye(3) / 3)


def test_eigenvalues_match_numpy():
    rho = DensityMatrix2(0.3, 0.7, 0.2 - 0.1j)
    np.testing.assert_allclose(rho.eigenvalues(), np.linalg.eigvalsh(rho.to_matrix()), atol=1e-14)


def test_trace_distance():
    assert trace_distance(psi_plus(), psi_minus()) == pytest.approx(1.0)
    assert trace_distance(psi_plus(), psi_plus()) == 0.0
    a, b = DensityMatrix2.diagonal(0.8), DensityMatrix2.diagonal(0.3)
    assert trace_distance(a, b) == pytest.approx(0.5)


def test_dephase_evolve():
    rho = dephase_evolve(psi_plus(), 0.4, omega_s=2.0, t=0.5)
    assert rho.rho00 == psi_plus().rho00
    assert rho.rho01 == pytest.approx(0.5 * 0.4 * cmath.exp(-1j))
    with pytest.raises(UnphysicalParameterError):
        dephase_evolve(psi_plus(), 1.1, 0.0, 1.0)


def test_entropy_limits():
    assert von_neumann_entropy(psi_plus()) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(DensityMatrix2.diagonal(0.5)) == pytest.approx(math.log(2.0))


def test_pauli_basis():
    """σ- = |1><0| gives <σ-> = rho01; the basis is Hilbert-Schmidt orthonormal."""
    rho = DensityMatrix2(0.3, 0.7, 0.2 - 0.1j)
    sigma_minus = PauliBasisLabel.SIGMA_MINUS.matrix
    assert np.trace(sigma_minus @ rho.to_matrix()) == pytest.approx(rho.rho01)
    labels = list(PauliBasisLabel)
    gram = np.array([[np.trace(a.matrix.conj().T @ b.matrix) for b in labels] for a in labels])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-15)
    assert PauliBasisLabel.SIGMA_MINUS.adjoint is PauliBasisLabel.SIGMA_PLUS
    assert PauliBasisLabel.SIGMA_Z.is_conserved
    assert not PauliBasisLabel.SIGMA_PLUS.is_conserved


def random_state(rng: np.random.Generator) -> DensityMatrix2:
    """Uniform population, coherence anywhere inside the positivity disk."""
    p = rng.uniform()
    radius = math.sqrt(p * (1.0 - p)) * math.sqrt(rng.uniform())
    return DensityMatrix2(p, 1.0 - p, cmath.rect(radius, rng.uniform(0.0, 2.0 * math.pi)))


def random_gamma(rng: np.random.Generator) -> complex:
    return cmath.rect(rng.uniform(), rng.uniform(0.0, 2.0 * math.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def test_trace_distance_is_a_metric(rng):
    for _ in range(200):
        a, b, c = random_state(rng), random_state(rng), random_state(rng)
        d_ab = trace_distance(a, b)
        assert trace_distance(a, a) == pytest.approx(0.0, abs=1e-15)
        assert d_ab == pytest.approx(trace_distance(b, a), abs=1e-15)
        assert 0.0 <= d_ab <= 1.0 + 1e-12
        assert d_ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12


def test_dephasing_contracts_trace_distance(rng):
    for _ in range(200):
        a, b = random_state(rng), random_state(rng)
        gamma, omega_s, t = random_gamma(rng), rng.normal(), rng.uniform(0.0, 5.0)
        evolved = trace_distance(dephase_evolve(a, gamma, omega_s, t), dephase_evolve(b, gamma, omega_s, t))
        assert evolved <= trace_distance(a, b) + 1e-12


def test_trace_distance_of_dephased_pair(rng):
    """D = √(δp² + |δc|²|γ|²) for any pair, not only |ψ±>."""
    for _ in range(200):
        a, b = random_state(rng), random_state(rng)
        gamma = random_gamma(rng)
        dp, dc = a.rho00 - b.rho00, a.rho01 - b.rho01
        expected = math.sqrt(dp**2 + abs(dc) ** 2 * abs(gamma) ** 2)
        evolved = trace_distance(dephase_evolve(a, gamma, 0.3, 1.0), dephase_evolve(b, gamma, 0.3, 1.0))
        assert evolved == pytest.approx(expected, abs=1e-12)

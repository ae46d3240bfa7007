"""Tests for sign intervals, the BLP/RHP measures and the Choi cross-check."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.exceptions import UnphysicalParameterError
from src.measures import (
    MeasurePair,
    SignIntervalSet,
    blp_measure,
    blp_pair_search,
    choi_eigenvalues,
    choi_g_numeric,
    choi_matrix,
    choi_trace_norm,
    compute_measures,
    find_negative_rate_intervals,
    optimal_pair,
    rhp_measure,
    rhp_rate,
    trace_distance_evolution,
)
from src.qdmat import DensityMatrix2
from src.spectral import OhmicFamilySpectralDensity
from src.strategy import SpinBosonClosedBackend


def closed(lam: float, s: float, omega: float = 1.0) -> SpinBosonClosedBackend:
    return SpinBosonClosedBackend(OhmicFamilySpectralDensity(lam=lam, s=s, omega=omega))


def test_s3_has_open_ended_interval(closed_s3):
    found = find_negative_rate_intervals(closed_s3)
    assert len(found) == 1
    start, end = found.intervals[0]
    assert start == pytest.approx(math.sqrt(3.0), abs=1e-10)
    assert math.isinf(end)
    assert found.tail_flag
    assert not found.tail_unresolved


def test_s4_interval_starts_at_inverse_cutoff():
    found = find_negative_rate_intervals(closed(1.0, 4.0, omega=2.0))
    assert found.intervals[0][0] == pytest.approx(0.5, abs=1e-10)
    assert found.tail_flag


def test_s5_has_one_finite_interval():
    found = find_negative_rate_intervals(closed(1.0, 5.0))
    assert len(found) == 1
    a, b = found.intervals[0]
    assert a == pytest.approx(math.tan(math.pi / 5), abs=1e-10)
    assert b == pytest.approx(math.tan(2 * math.pi / 5), abs=1e-10)
    assert not found.tail_flag


@pytest.mark.parametrize("s", [1.0, 2.0])
def test_no_intervals_for_s_up_to_two(s):
    assert find_negative_rate_intervals(closed(1.5, s)).is_empty


def test_horizon_must_be_positive(closed_s3):
    with pytest.raises(UnphysicalParameterError):
        find_negative_rate_intervals(closed_s3, horizon=0.0)


def test_interval_set_validation():
    with pytest.raises(ValueError):
        SignIntervalSet(((1.0, 3.0), (2.0, 4.0)), horizon=10.0)
    with pytest.raises(ValueError):
        SignIntervalSet(((1.0, 3.0),), horizon=10.0, tail_flag=True)
    with pytest.raises(ValueError):
        MeasurePair(-0.1, 0.0)


def test_closed_form_measures_s3(closed_s3):
    result = compute_measures(closed_s3)
    assert result.blp == pytest.approx(math.exp(-1.0) - math.exp(-9.0 / 8.0), abs=1e-10)
    assert result.blp == pytest.approx(0.043227, abs=1e-6)
    assert result.rhp == pytest.approx(0.125, abs=1e-10)
    assert not result.lower_bound


def test_closed_form_measures_s4():
    result = compute_measures(closed(1.0, 4.0))
    assert result.blp == pytest.approx(0.053250, abs=1e-6)
    assert result.rhp == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("lam", [0.25, 0.5, 2.0, 3.0])
def test_rhp_is_linear_in_coupling(lam):
    assert compute_measures(closed(lam, 3.0)).rhp == pytest.approx(lam / 8.0, abs=1e-10)


@pytest.mark.parametrize("lam", np.linspace(0.1, 3.0, 5))
@pytest.mark.parametrize("s", [1.0, 2.0])
def test_measures_vanish_for_s_up_to_two(lam, s):
    result = compute_measures(closed(float(lam), s))
    assert result.blp == 0.0 and result.rhp == 0.0


def test_rhp_equals_integrated_negative_rate(closed_s3):
    integral, _ = quad(lambda t: rhp_rate(closed_s3, t), math.sqrt(3.0), 400.0, limit=200)
    assert integral == pytest.approx(0.125, abs=1e-4)


def test_blp_uses_trace_distance_of_optimal_pair(closed_s3):
    rho1, rho2 = optimal_pair()
    for t in (0.5, 2.0, 7.0):
        assert trace_distance_evolution(closed_s3, rho1, rho2, t) == pytest.approx(abs(closed_s3.gamma(t)))


def test_pair_search_confirms_optimal_pair(closed_s3):
    intervals = find_negative_rate_intervals(closed_s3)
    best = blp_pair_search(closed_s3, intervals)
    assert best.value == pytest.approx(blp_measure(closed_s3, intervals), rel=1e-9)
    assert best.theta == pytest.approx(math.pi / 2)


def test_measure_functions_share_intervals():
    model = closed(1.0, 5.0)
    intervals = find_negative_rate_intervals(model)
    (a, b), = intervals.intervals
    assert rhp_measure(model, intervals) == pytest.approx(math.log(model.gamma(b).real / model.gamma(a).real))


def test_choi_spectrum():
    c = 0.6 * np.exp(0.4j)
    eigenvalues = np.linalg.eigvalsh(choi_matrix(c))
    np.testing.assert_allclose(eigenvalues, sorted(choi_eigenvalues(c)), atol=1e-14)
    assert choi_trace_norm(c) == pytest.approx(2.0)
    assert choi_trace_norm(1.2) == pytest.approx(2.4)


def test_choi_rate_matches_rhp_rate(closed_s3):
    for t in (2.5, 4.0, 8.0):
        assert choi_g_numeric(closed_s3, t) == pytest.approx(rhp_rate(closed_s3, t), rel=1e-3, abs=1e-9)
    assert choi_g_numeric(closed_s3, 1.0) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("lam", [0.25, 1.0, 2.5])
@pytest.mark.parametrize("s", [1.0, 1.5, 2.0, 2.5, 3.0, 3.7, 4.5, 5.5])
def test_blp_and_rhp_vanish_together(lam, s):
    """Both measures are positive exactly when s > 2."""
    result = compute_measures(closed(lam, s))
    assert (result.blp > 0.0) == (result.rhp > 0.0) == (s > 2.0)


def test_blp_bounds_the_rise_of_any_pair():
    """The trace-distance rise over the negative-rate intervals is largest for |ψ±>."""
    model = closed(1.0, 5.0)
    intervals = find_negative_rate_intervals(model)
    blp = blp_measure(model, intervals)

    def rise(rho1, rho2):
        return sum(
            trace_distance_evolution(model, rho1, rho2, b) - trace_distance_evolution(model, rho1, rho2, a)
            for a, b in intervals.intervals
        )

    assert rise(*optimal_pair()) == pytest.approx(blp, rel=1e-12)
    rng = np.random.default_rng(7)
    for _ in range(50):
        theta, phi = rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi)
        rho1 = DensityMatrix2.from_bloch(theta, phi)
        rho2 = DensityMatrix2.from_bloch(math.pi - theta, phi + math.pi)
        assert 0.0 <= rise(rho1, rho2) <= blp + 1e-12
    mixed = DensityMatrix2(0.4, 0.6, 0.1 + 0.2j), DensityMatrix2(0.7, 0.3, -0.3j)
    assert rise(*mixed) <= blp

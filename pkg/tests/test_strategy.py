"""Tests for the dephasing backends and BackendFactory."""
import math

import pytest

from src.dephasing import InverseTemperature
from src.exceptions import UnsupportedParameterError
from src.photonic import PhotonicModel
from src.spectral import LorentzianMixture, OhmicFamilySpectralDensity
from src.strategy import (
    BackendFactory,
    OracleBackend,
    PhotonicBackend,
    SpinBosonClosedBackend,
    SpinBosonQuadratureBackend,
)


def test_factory_creates_each_backend(sd_s3):
    assert isinstance(BackendFactory.create_backend("closed", sd=sd_s3), SpinBosonClosedBackend)
    assert isinstance(BackendFactory.create_backend("quadrature", sd=sd_s3), SpinBosonQuadratureBackend)
    model = PhotonicModel(LorentzianMixture.single(1.0))
    assert isinstance(BackendFactory.create_backend("photonic", model=model), PhotonicBackend)
    oracle_backend = BackendFactory.create_backend("oracle", sd=sd_s3.with_updates(omega=2.0), modes=256)
    assert isinstance(oracle_backend, OracleBackend)
    assert oracle_backend.time_scale == 0.5


def test_factory_rejects_unknown_type(sd_s3):
    with pytest.raises(ValueError):
        BackendFactory.create_backend("lindblad", sd=sd_s3)


def test_closed_form_preferred_where_available(sd_s3):
    assert isinstance(BackendFactory.for_spectral_density(sd_s3), SpinBosonClosedBackend)
    assert isinstance(
        BackendFactory.for_spectral_density(sd_s3, InverseTemperature(1.0)), SpinBosonQuadratureBackend
    )
    sub_ohmic = OhmicFamilySpectralDensity(lam=1.0, s=0.5)
    assert isinstance(BackendFactory.for_spectral_density(sub_ohmic), SpinBosonQuadratureBackend)


def test_quadrature_two_time_needs_zero_temperature(sd_s3):
    backend = SpinBosonQuadratureBackend(sd_s3, InverseTemperature(1.0))
    with pytest.raises(UnsupportedParameterError):
        backend.two_time(1.0, 2.0)
    assert backend.gamma_limit is None
    cold = SpinBosonQuadratureBackend(sd_s3, InverseTemperature.zero_temperature())
    assert cold.gamma_limit == pytest.approx(math.exp(-1.0))
    assert cold.two_time(1.0, 2.0)[1] == pytest.approx(-0.84, abs=1e-7)


def test_default_log_derivative(closed_s3):
    assert closed_s3.epsilon(1.0) == closed_s3.omega_s
    assert closed_s3.log_derivative(2.0) == pytest.approx(complex(-closed_s3.dephasing_rate(2.0), 0.0))


def test_photonic_epsilon_is_shifted_frequency():
    backend = PhotonicBackend(PhotonicModel(LorentzianMixture.single(1.0, omega0=0.5, delta_n=2.0)), omega_s=3.0)
    assert backend.epsilon(1.2) == pytest.approx(3.0 - 2.0 * 0.5)
    assert backend.two_time(1.0, 3.0)[1] == 0.0


def test_describe(closed_s3):
    description = closed_s3.describe()
    assert description["backend"] == "SpinBosonClosedBackend"
    assert description["s"] == 3.0

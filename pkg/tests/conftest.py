"""Shared fixtures for the test suite."""
import math

import pytest

from src.photonic import PhotonicModel
from src.spectral import LorentzianMixture, OhmicFamilySpectralDensity
from src.strategy import PhotonicBackend, SpinBosonClosedBackend


class CorruptedGammaBackend(SpinBosonClosedBackend):
    """γ scaled by 1 - 0.05(1 - cos Ωt) while 𝒟 keeps its closed form, so γ and 𝒟 disagree."""

    def gamma(self, t: float) -> complex:
        return super().gamma(t) * (1.0 - 0.05 * (1.0 - math.cos(self.sd.omega * t)))


@pytest.fixture
def sd_s3():
    return OhmicFamilySpectralDensity(lam=1.0, s=3.0)


@pytest.fixture
def sd_s4():
    return OhmicFamilySpectralDensity(lam=1.0, s=4.0)


@pytest.fixture
def closed_s3(sd_s3):
    return SpinBosonClosedBackend(sd_s3)


@pytest.fixture
def single_lorentzian():
    return PhotonicModel(LorentzianMixture.single(1.0))


@pytest.fixture
def photonic_single(single_lorentzian):
    return PhotonicBackend(single_lorentzian)


@pytest.fixture
def corrupted_backend(sd_s3):
    return CorruptedGammaBackend(sd_s3)

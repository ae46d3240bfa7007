"""
Strategy Pattern: Dephasing Model Interface
Enables swapping between closed-form, quadrature, photonic and oracle backends
behind one interface consumed by measures, qrt and the command line.
"""
import logging
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from src import dephasing, oracle, photonic
from src.dephasing import InverseTemperature
from src.exceptions import UnsupportedParameterError
from src.oracle import BathModeSet
from src.photonic import PhotonicModel
from src.spectral import OhmicFamilySpectralDensity

logger = logging.getLogger(__name__)


class IDephasingModel(ABC):
    """
    Interface for dephasing backends.

    Every backend describes ρ01(t) = ρ01(0)·γ(t)·e^{-iω_s t} with γ(0) = 1.
    """

    omega_s: float = 0.0

    @abstractmethod
    def gamma(self, t: float) -> complex:
        """Decoherence function γ(t)."""

    @abstractmethod
    def dephasing_rate(self, t: float) -> float:
        """Dephasing rate 𝒟(t) = -d ln|γ(t)|/dt."""

    @abstractmethod
    def two_time(self, t1: float, t2: float) -> Tuple[complex, float]:
        """
        Two-time decoherence factor and phase.

        Returns:
            Tuple of (γ(t2, t1), φ(t2, t1))

        Raises:
            UnsupportedParameterError: If the backend has no two-time data for its parameters
        """

    @property
    @abstractmethod
    def time_scale(self) -> float:
        """Characteristic time of the backend (1/Ω for the spin-boson family)."""

    @property
    def gamma_limit(self) -> Optional[float]:
        """|γ(∞)| when known exactly, otherwise None."""
        return None

    def rate_on_grid(self, ts: ArrayLike) -> np.ndarray:
        """𝒟 on an array of times; backends override with vectorized versions."""
        return np.array([self.dephasing_rate(float(t)) for t in np.asarray(ts, dtype=float)])

    def epsilon(self, t: float) -> float:
        """Master-equation frequency ε(t) = ω_s - Im[γ'/γ]."""
        return self.omega_s

    def log_derivative(self, t: float) -> complex:
        """γ'(t)/γ(t) = -𝒟(t) - i(ε(t) - ω_s)."""
        return complex(-self.dephasing_rate(t), -(self.epsilon(t) - self.omega_s))

    def describe(self) -> dict:
        """Parameters for output metadata."""
        return {"backend": self.__class__.__name__, "omega_s": self.omega_s}


class SpinBosonClosedBackend(IDephasingModel):
    """
    Zero-temperature spin-boson model with J(ω) = λω^sΩ^{1-s}e^{-ω/Ω}, closed forms only.
    Supports s > 1 and s = 1.
    """

    def __init__(self, sd: OhmicFamilySpectralDensity, omega_s: float = 0.0):
        self.sd = sd
        self.omega_s = omega_s

    def gamma(self, t: float) -> complex:
        return complex(dephasing.decoherence_closed(self.sd, t))

    def dephasing_rate(self, t: float) -> float:
        return dephasing.dephasing_rate_closed(self.sd, t)

    def rate_on_grid(self, ts: ArrayLike) -> np.ndarray:
        return np.atleast_1d(dephasing.dephasing_rate_closed(self.sd, ts))

    def two_time(self, t1: float, t2: float) -> Tuple[complex, float]:
        return self.gamma(t2 - t1), dephasing.phase_phi(self.sd, t1, t2)

    @property
    def time_scale(self) -> float:
        return 1.0 / self.sd.omega

    @property
    def gamma_limit(self) -> Optional[float]:
        return dephasing.decoherence_limit(self.sd)

    def describe(self) -> dict:
        return {**super().describe(), "lambda": self.sd.lam, "s": self.sd.s, "omega": self.sd.omega, "beta": "inf"}


class SpinBosonQuadratureBackend(IDephasingModel):
    """Spin-boson model at any temperature, by quadrature over the spectral density."""

    def __init__(self, sd: OhmicFamilySpectralDensity, beta: InverseTemperature, omega_s: float = 0.0):
        self.sd = sd
        self.beta = beta
        self.omega_s = omega_s

    def gamma(self, t: float) -> complex:
        return complex(dephasing.decoherence_quadrature(self.sd, self.beta, t))

    def dephasing_rate(self, t: float) -> float:
        return dephasing.dephasing_rate_quadrature(self.sd, self.beta, t)

    def rate_on_grid(self, ts: ArrayLike) -> np.ndarray:
        return dephasing.dephasing_rate_quadrature_grid(self.sd, self.beta, ts)

    def two_time(self, t1: float, t2: float) -> Tuple[complex, float]:
        if not self.beta.is_zero_temperature:
            raise UnsupportedParameterError(
                "two-time correlators are only available at zero temperature; use --beta inf"
            )
        return self.gamma(t2 - t1), dephasing.phase_phi_quadrature(self.sd, t1, t2)

    @property
    def time_scale(self) -> float:
        return 1.0 / self.sd.omega

    @property
    def gamma_limit(self) -> Optional[float]:
        if self.beta.is_zero_temperature and self.sd.s >= 1.0:
            return dephasing.decoherence_limit(self.sd)
        return None

    def describe(self) -> dict:
        return {
            **super().describe(),
            "lambda": self.sd.lam,
            "s": self.sd.s,
            "omega": self.sd.omega,
            "beta": str(self.beta),
        }


class PhotonicBackend(IDephasingModel):
    """Polarization qubit dephased by its Lorentzian frequency distribution."""

    def __init__(self, model: PhotonicModel, omega_s: float = 0.0):
        self.model = model
        self.omega_s = omega_s

    def gamma(self, t: float) -> complex:
        return photonic.photonic_gamma(self.model, t)

    def dephasing_rate(self, t: float) -> float:
        return photonic.photonic_dephasing_rate(self.model, t)

    def rate_on_grid(self, ts: ArrayLike) -> np.ndarray:
        return np.atleast_1d(photonic.photonic_dephasing_rate(self.model, ts))

    def epsilon(self, t: float) -> float:
        return photonic.photonic_epsilon(self.model, t, self.omega_s)

    def log_derivative(self, t: float) -> complex:
        return photonic.photonic_log_derivative(self.model, t)

    def two_time(self, t1: float, t2: float) -> Tuple[complex, float]:
        # the frequency bath is static, so the phase φ vanishes identically
        return self.gamma(t2 - t1), 0.0

    @property
    def time_scale(self) -> float:
        return self.model.time_scale

    def describe(self) -> dict:
        components = [
            {"A": c.weight, "omega0": c.omega0, "delta_omega": c.delta_omega} for c in self.model.mixture.components
        ]
        return {**super().describe(), "delta_n": self.model.delta_n, "components": components}


class OracleBackend(IDephasingModel):
    """Discretized bath evaluated mode by mode."""

    def __init__(self, bath: BathModeSet, omega_s: float = 0.0, time_scale: float = 1.0):
        self.bath = bath
        self.omega_s = omega_s
        self._time_scale = time_scale

    def gamma(self, t: float) -> complex:
        return complex(oracle.oracle_gamma(self.bath, t))

    def dephasing_rate(self, t: float) -> float:
        return oracle.oracle_rate(self.bath, t)

    def rate_on_grid(self, ts: ArrayLike) -> np.ndarray:
        return np.atleast_1d(oracle.oracle_rate(self.bath, ts))

    def two_time(self, t1: float, t2: float) -> Tuple[complex, float]:
        gamma21, phi21 = oracle.oracle_two_time(self.bath, t1, t2)
        return complex(gamma21), phi21

    @property
    def time_scale(self) -> float:
        return self._time_scale

    def describe(self) -> dict:
        return {**super().describe(), "modes": len(self.bath), "beta": str(self.bath.beta)}


class BackendFactory:
    """Factory for creating dephasing backend instances."""

    BACKEND_TYPES = ("closed", "quadrature", "photonic", "oracle")

    @staticmethod
    def create_backend(backend_type: str = "closed", **params) -> IDephasingModel:
        """
        Create a dephasing backend instance.

        Args:
            backend_type: 'closed', 'quadrature', 'photonic' or 'oracle'
            **params: Backend arguments (sd, beta, model, bath, omega_s, modes, omega_max)

        Returns:
            IDephasingModel implementation
        """
        omega_s = params.get("omega_s", 0.0)
        kind = backend_type.lower()
        if kind == "closed":
            return SpinBosonClosedBackend(params["sd"], omega_s)
        elif kind == "quadrature":
            beta = params.get("beta") or InverseTemperature.zero_temperature()
            return SpinBosonQuadratureBackend(params["sd"], beta, omega_s)
        elif kind == "photonic":
            return PhotonicBackend(params["model"], omega_s)
        elif kind == "oracle":
            bath = params.get("bath")
            if bath is None:
                sd = params["sd"]
                bath = oracle.discretize_bath(sd, params.get("beta"), params.get("modes"), params.get("omega_max"))
                return OracleBackend(bath, omega_s, 1.0 / sd.omega)
            return OracleBackend(bath, omega_s)
        else:
            raise ValueError(f"Unknown backend type: {backend_type}")

    @staticmethod
    def for_spectral_density(
        sd: OhmicFamilySpectralDensity, beta: Optional[InverseTemperature] = None, omega_s: float = 0.0
    ) -> IDephasingModel:
        """Closed forms where they exist (zero temperature, s ≥ 1 with s = 1 or s > 1), quadrature otherwise."""
        beta = beta or InverseTemperature.zero_temperature()
        if beta.is_zero_temperature and sd.s >= 1.0:
            return SpinBosonClosedBackend(sd, omega_s)
        logger.debug("using quadrature backend for s=%g, beta=%s", sd.s, beta)
        return SpinBosonQuadratureBackend(sd, beta, omega_s)

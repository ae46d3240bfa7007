"""
Photonic dephasing model: polarization qubit coupled to its own frequency degree of freedom
in a birefringent medium. The decoherence function is the Fourier transform of a Lorentzian
mixture, so everything here is closed form.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike

import config.settings as settings
from src.exceptions import IllConditionedError, UnphysicalParameterError, UnsupportedParameterError
from src.qdmat import DensityMatrix2, von_neumann_entropy
from src.spectral import LorentzianMixture

logger = logging.getLogger(__name__)

PANELS = ("a", "b")


@dataclass(frozen=True)
class PhotonicModel:
    """Lorentzian frequency mixture with refractive-index difference Δn ≠ 0."""

    mixture: LorentzianMixture

    def __post_init__(self):
        if self.mixture.delta_n == 0.0:
            raise UnphysicalParameterError("Δn = 0 gives trivial dynamics (γ ≡ 1)")

    @property
    def delta_n(self) -> float:
        return self.mixture.delta_n

    @property
    def time_scale(self) -> float:
        """1/(|Δn|·min δω), the slowest decay time."""
        return 1.0 / (abs(self.delta_n) * min(c.delta_omega for c in self.mixture.components))

    def exponents(self) -> np.ndarray:
        """Complex decay exponents -Δn(δω_j - iω0_j)."""
        return np.array(
            [-self.delta_n * complex(c.delta_omega, -c.omega0) for c in self.mixture.components], dtype=complex
        )

    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.mixture.components], dtype=float)


def photonic_gamma(model: PhotonicModel, t: ArrayLike):
    """
    γ(t) = Σ_j A_j exp[-Δn(δω_j - iω0_j) t].

    Args:
        model: Photonic model
        t: Time or array of times ≥ 0

    Returns:
        Complex γ with the shape of t
    """
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0):
        raise UnphysicalParameterError("times must be non-negative")
    value = np.exp(np.multiply.outer(ts, model.exponents())) @ model.weights()
    return complex(value) if value.ndim == 0 else value


def photonic_gamma_derivative(model: PhotonicModel, t: ArrayLike):
    """dγ/dt, term by term."""
    ts = np.asarray(t, dtype=float)
    rates = model.exponents()
    value = np.exp(np.multiply.outer(ts, rates)) @ (model.weights() * rates)
    return complex(value) if value.ndim == 0 else value


def photonic_log_derivative(model: PhotonicModel, t: ArrayLike):
    """
    γ'(t)/γ(t).

    Both sums are taken relative to the slowest decay e^{-Δn·min δω·t}, so the ratio stays
    finite long after γ itself underflows.

    Raises:
        IllConditionedError: Where |γ(t)| is below ILL_CONDITIONED_THRESHOLD times the
            decay envelope Σ|A_j|e^{-Δn δω_j t}
    """
    ts = np.asarray(t, dtype=float)
    rates = model.exponents()
    weights = model.weights()
    scaled = np.exp(np.multiply.outer(ts, rates - np.max(rates.real)))
    gamma = scaled @ weights
    envelope = np.abs(scaled) @ np.abs(weights)
    relative = np.abs(gamma) / envelope
    if np.min(relative) < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("photonic rate is singular at a zero of γ", float(np.min(relative)))
    value = (scaled @ (weights * rates)) / gamma
    return complex(value) if value.ndim == 0 else value


def photonic_dephasing_rate(model: PhotonicModel, t: ArrayLike):
    """𝒟(t) = -d ln|γ|/dt = -Re[γ'/γ]."""
    value = -np.real(photonic_log_derivative(model, t))
    return float(value) if np.ndim(value) == 0 else value


def photonic_epsilon(model: PhotonicModel, t: ArrayLike, omega_s: float = 0.0):
    """Master-equation frequency ε(t) = ω_s - Im[γ'/γ]; ω_s - Δn·ω0 for a single peak."""
    value = omega_s - np.imag(photonic_log_derivative(model, t))
    return float(value) if np.ndim(value) == 0 else value


def equal_centers_rate(model: PhotonicModel, t: ArrayLike):
    """
    Δn Σ A_j δω_j e^{-Δn δω_j t} / Σ A_j e^{-Δn δω_j t}, valid when every peak shares one center.

    Raises:
        UnsupportedParameterError: If the centers differ
    """
    centers = {c.omega0 for c in model.mixture.components}
    if len(centers) != 1:
        raise UnsupportedParameterError("equal-centers rate needs a common ω0; use photonic_dephasing_rate")
    ts = np.asarray(t, dtype=float)
    widths = np.array([c.delta_omega for c in model.mixture.components])
    decays = np.exp(-model.delta_n * np.multiply.outer(ts, widths))
    value = model.delta_n * (decays @ (model.weights() * widths)) / (decays @ model.weights())
    return float(value) if value.ndim == 0 else value


def photonic_z(model: PhotonicModel, t1: float, t2: float) -> float:
    """
    Z = |1 - γ(t2)/(γ(t1)γ(t2-t1))|; the two-time phase vanishes for this model.

    Raises:
        IllConditionedError: If |γ(t1)γ(t2-t1)| is below ILL_CONDITIONED_THRESHOLD
    """
    if t1 < 0.0 or t2 < t1:
        raise UnphysicalParameterError(f"need 0 ≤ t1 ≤ t2, got t1={t1!r}, t2={t2!r}")
    g1, g2, gtau = photonic_gamma(model, np.array([t1, t2, t2 - t1]))
    denominator = g1 * gtau
    if abs(denominator) < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("Z denominator γ(t1)γ(τ) vanishes", abs(denominator))
    return abs(1.0 - g2 / denominator)


def guarded_z(model: PhotonicModel, t1: float, t2: float) -> Tuple[float, bool]:
    """Z with points near a zero of γ(t1)γ(τ) flagged as (nan, True) instead of raising."""
    g1, gtau = photonic_gamma(model, np.array([t1, t2 - t1]))
    if abs(g1 * gtau) < settings.GAMMA_ZERO_RADIUS:
        logger.warning("⚠ Z singular near γ zero at t1=%g, t2=%g; row flagged", t1, t2)
        return math.nan, True
    return photonic_z(model, t1, t2), False


def total_state_entanglement(model: PhotonicModel, alpha: complex, beta: complex, t: float) -> float:
    """
    Entanglement entropy (nats) of the polarization-frequency state at time t.

    The reduced polarization state has populations |α|², |β|² and coherence αβ*γ*(t).

    Raises:
        InvalidStateError: If |α|² + |β|² ≠ 1
    """
    initial = DensityMatrix2.from_amplitudes(alpha, beta)
    gamma = photonic_gamma(model, t)
    reduced = DensityMatrix2(initial.rho00, initial.rho11, initial.rho01 * gamma.conjugate())
    return von_neumann_entropy(reduced)


def panel_model(panel: str, split: float, delta_n: float = 1.0) -> PhotonicModel:
    """
    Two-peak models of the split-width / split-center sweeps.

    Panel "a": equal centers, r = 1, widths δω and δω + Δδω (split = Δδω).
    Panel "b": equal widths δω, r = 2, centers 0 and Δω0 (split = Δω0).
    Frequencies are in units of PHOTONIC_BASE_WIDTH.
    """
    base = settings.PHOTONIC_BASE_WIDTH
    if panel == "a":
        mixture = LorentzianMixture.two_peak(
            ratio=1.0, omega01=base, omega02=base, delta_omega1=base + split, delta_omega2=base, delta_n=delta_n
        )
    elif panel == "b":
        mixture = LorentzianMixture.two_peak(
            ratio=2.0, omega01=split, omega02=0.0, delta_omega1=base, delta_omega2=base, delta_n=delta_n
        )
    else:
        raise ValueError(f"unknown panel {panel!r}; expected one of {PANELS}")
    return PhotonicModel(mixture)

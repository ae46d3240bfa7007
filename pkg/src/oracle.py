"""
Brute-force bath oracle.
The continuum bath is replaced by a finite set of modes and every quantity is assembled
mode by mode from displacement amplitudes α_k(t) = 2g_k(1 - e^{iω_k t})/ω_k, independently
of the closed forms in src.dephasing.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike
from scipy.special import gammaincc

import config.settings as settings
from src.dephasing import InverseTemperature
from src.exceptions import IllConditionedError, UnphysicalParameterError
from src.spectral import OhmicFamilySpectralDensity, evaluate_spectral_density

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BathModeSet:
    """
    Discrete bath: frequencies ω_k, weights J(ω_k)Δω_k = 4|g_k|²·density, temperature.

    coupling_phases are the arguments of g_k; observables only see |g_k|².
    """

    omegas: np.ndarray
    weights: np.ndarray
    beta: InverseTemperature = field(default_factory=InverseTemperature.zero_temperature)
    coupling_phases: Optional[np.ndarray] = None

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if omegas.ndim != 1 or omegas.shape != weights.shape or omegas.size == 0:
            raise UnphysicalParameterError("omegas and weights must be equal-length 1-D arrays")
        if np.any(omegas <= 0.0) or np.any(np.diff(omegas) <= 0.0):
            raise UnphysicalParameterError("mode frequencies must be positive and strictly increasing")
        if np.any(weights < 0.0) or not np.isfinite(weights.sum()):
            raise UnphysicalParameterError("mode weights must be finite and non-negative")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "weights", weights)
        if self.coupling_phases is not None:
            phases = np.asarray(self.coupling_phases, dtype=float)
            if phases.shape != omegas.shape:
                raise UnphysicalParameterError("one coupling phase per mode is required")
            object.__setattr__(self, "coupling_phases", phases)

    def __len__(self) -> int:
        return self.omegas.size

    @property
    def couplings(self) -> np.ndarray:
        """g_k = ½√(weight_k) e^{iθ_k}."""
        magnitude = 0.5 * np.sqrt(self.weights)
        if self.coupling_phases is None:
            return magnitude.astype(complex)
        return magnitude * np.exp(1j * self.coupling_phases)

    def thermal_factors(self) -> np.ndarray:
        return self.beta.coth_half(self.omegas)

    def amplitudes(self, t: float) -> np.ndarray:
        """Displacement amplitudes α_k(t)."""
        return 2.0 * self.couplings * (1.0 - np.exp(1j * self.omegas * t)) / self.omegas


@lru_cache(maxsize=8)
def _legendre_rule(modes: int):
    """Gauss-Legendre nodes and weights on [-1, 1]; the eigenvalue solve is the expensive part."""
    return leggauss(modes)


def discretize_bath(
    sd: OhmicFamilySpectralDensity,
    beta: Optional[InverseTemperature] = None,
    modes: Optional[int] = None,
    omega_max: Optional[float] = None,
) -> BathModeSet:
    """
    Gauss-Legendre discretization of J on [0, omega_max].

    Args:
        sd: Spectral density to discretize
        beta: Bath temperature (zero temperature by default)
        modes: Number of modes K ≥ 2 (ORACLE_MODES by default)
        omega_max: Upper frequency ≥ 10Ω (ORACLE_OMEGA_MAX_FACTOR·Ω by default)

    Returns:
        BathModeSet with weights J(ω_k)·w_k
    """
    beta = beta or InverseTemperature.zero_temperature()
    modes = settings.ORACLE_MODES if modes is None else modes
    omega_max = settings.ORACLE_OMEGA_MAX_FACTOR * sd.omega if omega_max is None else omega_max
    if modes < 2:
        raise UnphysicalParameterError(f"need at least 2 bath modes, got {modes}")
    if omega_max < 10.0 * sd.omega:
        raise UnphysicalParameterError(f"omega_max={omega_max} is below 10Ω={10.0 * sd.omega}")

    nodes, node_weights = _legendre_rule(modes)
    half_width = 0.5 * omega_max
    omegas = half_width * (nodes + 1.0)
    weights = half_width * node_weights * evaluate_spectral_density(sd, omegas)

    # fraction of ∫J above the cut: Q(s+1, ω_max/Ω)
    tail = float(gammaincc(sd.s + 1.0, omega_max / sd.omega))
    if tail > settings.ORACLE_TAIL_TOLERANCE:
        logger.warning("⚠ omega_max=%g drops a fraction %.3e of the spectral weight", omega_max, tail)
    logger.debug("discretized bath: %d modes on [0, %g], beta=%s", modes, omega_max, beta)
    return BathModeSet(omegas, weights, beta)


def _decoherence_exponent(bath: BathModeSet, t: float) -> float:
    """Σ_k weight_k coth(βω_k/2)(1 - cos ω_k t)/ω_k²."""
    kernel = 2.0 * np.sin(0.5 * bath.omegas * t) ** 2 / bath.omegas**2
    return float(np.sum(bath.weights * bath.thermal_factors() * kernel))


def oracle_gamma(bath: BathModeSet, t: ArrayLike):
    """
    Decoherence function from the mode sum; scalar or array in t.

    Returns:
        γ(t) in (0, 1]
    """
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0):
        raise UnphysicalParameterError("times must be non-negative")
    values = np.array([math.exp(-_decoherence_exponent(bath, float(x))) for x in ts.ravel()])
    return float(values[0]) if ts.ndim == 0 else values.reshape(ts.shape)


def oracle_rate(bath: BathModeSet, t: ArrayLike):
    """𝒟(t) = Σ_k weight_k coth(βω_k/2) sin(ω_k t)/ω_k."""
    ts = np.asarray(t, dtype=float)
    scaled = bath.weights * bath.thermal_factors() / bath.omegas
    values = np.array([float(np.sum(scaled * np.sin(bath.omegas * x))) for x in ts.ravel()])
    return float(values[0]) if ts.ndim == 0 else values.reshape(ts.shape)


def oracle_two_time(bath: BathModeSet, t1: float, t2: float) -> Tuple[float, float]:
    """
    Two-time decoherence factor and phase from per-mode displacement algebra.

    γ(t2, t1) = exp[-½ Σ coth(βω_k/2)|α_k(t2) - α_k(t1)|²]
    φ(t2, t1) = Σ Im[α_k*(t2) α_k(t1)]

    Returns:
        Tuple of (gamma21, phi21)
    """
    if t1 < 0.0 or t2 < t1:
        raise UnphysicalParameterError(f"need 0 ≤ t1 ≤ t2, got t1={t1!r}, t2={t2!r}")
    alpha1 = bath.amplitudes(t1)
    alpha2 = bath.amplitudes(t2)
    displacement = alpha2 - alpha1
    gamma21 = math.exp(-0.5 * float(np.sum(bath.thermal_factors() * (displacement * displacement.conj()).real)))
    phi21 = float(np.sum((alpha2.conj() * alpha1).imag))
    return gamma21, phi21


def oracle_z(bath: BathModeSet, t1: float, t2: float) -> float:
    """
    Z = |1 - γ(t2)/(γ(t1)γ(t2,t1)e^{iφ})| with every factor from the mode sums.

    Raises:
        IllConditionedError: If the denominator magnitude is below ILL_CONDITIONED_THRESHOLD
    """
    gamma21, phi21 = oracle_two_time(bath, t1, t2)
    gamma1, gamma2 = oracle_gamma(bath, np.array([t1, t2]))
    denominator = gamma1 * gamma21
    if denominator < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("oracle Z denominator vanishes", denominator)
    return abs(1.0 - gamma2 / (denominator * complex(math.cos(phi21), math.sin(phi21))))

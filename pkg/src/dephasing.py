"""
Dephasing dynamics of the spin-boson model.
Decoherence function γ(t), dephasing rate 𝒟(t) and phase φ(t2, t1) from closed forms and
from adaptive quadrature, plus numerical integration of the time-local master equation.
"""
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, List

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import quad, quad_vec, solve_ivp
from scipy.special import gamma as gamma_function
from scipy.special import gammaincc

import config.settings as settings
from src.exceptions import (
    IntegrationError,
    QuadratureError,
    UnphysicalParameterError,
    UnsupportedParameterError,
)
from src.qdmat import DensityMatrix2
from src.spectral import OhmicFamilySpectralDensity

if TYPE_CHECKING:
    from src.strategy import IDephasingModel

logger = logging.getLogger(__name__)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class InverseTemperature:
    """β = 1/(k_B T); β = inf is the zero-temperature limit where coth(βω/2) ≡ 1."""

    beta: float = math.inf

    def __post_init__(self):
        if not self.beta > 0.0:
            raise UnphysicalParameterError(f"inverse temperature must be positive, got {self.beta!r}")

    @classmethod
    def zero_temperature(cls) -> "InverseTemperature":
        return cls(math.inf)

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def coth_half(self, omega: ArrayLike):
        """coth(βω/2), vectorized over ω > 0."""
        w = np.asarray(omega, dtype=float)
        if self.is_zero_temperature:
            return np.ones_like(w)
        return 1.0 / np.tanh(0.5 * self.beta * w)

    def __str__(self) -> str:
        return "inf" if self.is_zero_temperature else f"{self.beta:g}"


def _as_times(t: ArrayLike) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0):
        raise UnphysicalParameterError("times must be non-negative")
    return ts


def _scalar_or_array(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def _check_time_pair(t1: float, t2: float) -> None:
    if t1 < 0.0 or t2 < t1:
        raise UnphysicalParameterError(f"need 0 ≤ t1 ≤ t2, got t1={t1!r}, t2={t2!r}")


# Zero-temperature closed forms

def dephasing_rate_closed(sd: OhmicFamilySpectralDensity, t: ArrayLike):
    """
    𝒟_s(t) = λΩΓ(s) (1+(Ωt)²)^{-s/2} sin(s·arctan Ωt).

    Args:
        sd: Spectral density parameters
        t: Time or array of times ≥ 0

    Returns:
        Dephasing rate with the shape of t
    """
    x = sd.omega * _as_times(t)
    value = (
        sd.lam * sd.omega * gamma_function(sd.s)
        * np.power(1.0 + x * x, -0.5 * sd.s) * np.sin(sd.s * np.arctan(x))
    )
    return _scalar_or_array(value)


def dephasing_rate_compact(sd: OhmicFamilySpectralDensity, t: ArrayLike):
    """Same rate written as λΩΓ(s) Im[(1+iΩt)^s] / (1+(Ωt)²)^s."""
    x = sd.omega * _as_times(t)
    power = np.power(1.0 + 1j * x, sd.s)
    value = sd.lam * sd.omega * gamma_function(sd.s) * power.imag / np.power(1.0 + x * x, sd.s)
    return _scalar_or_array(value)


def dephasing_zeros(sd: OhmicFamilySpectralDensity) -> List[float]:
    """Zeros t_k = tan(kπ/s)/Ω of the zero-temperature rate, for k ≥ 1 with kπ/s < π/2."""
    zeros = []
    k = 1
    while k * math.pi / sd.s < 0.5 * math.pi:
        zeros.append(math.tan(k * math.pi / sd.s) / sd.omega)
        k += 1
    return zeros


def decoherence_closed(sd: OhmicFamilySpectralDensity, t: ArrayLike):
    """
    Zero-temperature decoherence function γ_s(t).

    s > 1: exp[-λΓ(s-1)(1 - Re[(1+iΩt)^{s-1}]/(1+(Ωt)²)^{s-1})]
    s = 1: (1+(Ωt)²)^{-λ/2}

    Raises:
        UnsupportedParameterError: For non-integer s < 1 (use the quadrature backend)
    """
    x = sd.omega * _as_times(t)
    if sd.s > 1.0:
        power = np.power(1.0 + 1j * x, sd.s - 1.0)
        exponent = -sd.lam * gamma_function(sd.s - 1.0) * (
            1.0 - power.real / np.power(1.0 + x * x, sd.s - 1.0)
        )
    elif sd.s == 1.0:
        exponent = -0.5 * sd.lam * np.log1p(x * x)
    else:
        raise UnsupportedParameterError(
            f"closed-form decoherence needs s > 1 or s = 1 (got s={sd.s}); use the quadrature backend"
        )
    return _scalar_or_array(np.exp(exponent))


def decoherence_limit(sd: OhmicFamilySpectralDensity) -> float:
    """lim_{t→∞} |γ_s(t)| at zero temperature: e^{-λΓ(s-1)} for s > 1, 0 for s = 1."""
    if sd.lam == 0.0:
        return 1.0
    if sd.s > 1.0:
        return math.exp(-sd.lam * gamma_function(sd.s - 1.0))
    if sd.s == 1.0:
        return 0.0
    raise UnsupportedParameterError(f"no closed-form long-time limit for s={sd.s}")


def phase_phi(sd: OhmicFamilySpectralDensity, t1: float, t2: float) -> float:
    """
    Two-time phase φ_s(t2, t1) = (𝒟_{s-1}(t2) - 𝒟_{s-1}(t1) - 𝒟_{s-1}(t2-t1))/Ω.

    Raises:
        UnsupportedParameterError: If s ≤ 1
    """
    _check_time_pair(t1, t2)
    if sd.s <= 1.0:
        raise UnsupportedParameterError(f"phase φ needs s > 1 (got s={sd.s})")
    lower = sd.with_updates(s=sd.s - 1.0)
    rates = dephasing_rate_closed(lower, np.array([t2, t1, t2 - t1]))
    return float((rates[0] - rates[1] - rates[2]) / sd.omega)


# Quadrature backends

def _upper_limit(sd: OhmicFamilySpectralDensity, beta: InverseTemperature) -> float:
    """
    Truncation frequency: multiples of Ω until the tail bound drops below the panel tolerance.
    All integrands here are bounded by 3·J(ω)·coth(βω/2)·max(1/ω, 1/ω²) past the cut.
    """
    knots = settings.QUAD_KNOT_COUNT
    while True:
        cut = knots * sd.omega
        tail_mass = sd.lam * sd.omega**2 * gamma_function(sd.s + 1.0) * gammaincc(sd.s + 1.0, cut / sd.omega)
        bound = 3.0 * float(beta.coth_half(cut)) * max(1.0 / cut, 1.0 / cut**2) * tail_mass
        if bound <= settings.QUAD_PANEL_ABS_TOLERANCE or knots >= settings.QUAD_MAX_KNOTS:
            if bound > settings.QUAD_PANEL_ABS_TOLERANCE:
                logger.warning("⚠ quadrature tail bound %.3e at %d knots exceeds tolerance", bound, knots)
            elif knots > settings.QUAD_KNOT_COUNT:
                logger.debug("extended quadrature range to %d·Ω (tail bound %.3e)", knots, bound)
            return cut
        knots += settings.QUAD_KNOT_COUNT


def _panel_edges(sd: OhmicFamilySpectralDensity, upper: float, t_max: float) -> np.ndarray:
    """Knots at every multiple of Ω, subdivided so no panel exceeds a quarter period π/(4t)."""
    per_unit = 1 if t_max <= 0.0 else max(1, math.ceil(sd.omega * 4.0 * t_max / math.pi))
    count = int(round(upper / sd.omega)) * per_unit
    return np.linspace(0.0, upper, count + 1)


def _integrate_panels(integrand: Callable[[float], float], edges: np.ndarray, what: str) -> float:
    values = []
    total_error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        result = quad(
            integrand,
            a,
            b,
            epsabs=settings.QUAD_PANEL_ABS_TOLERANCE,
            epsrel=settings.QUAD_RELATIVE_TOLERANCE,
            limit=settings.QUAD_SUBDIVISION_LIMIT,
            full_output=1,
        )
        if len(result) > 3:
            raise QuadratureError(f"{what}: panel [{a:.4g}, {b:.4g}] did not converge: {result[3]}", result[1])
        values.append(result[0])
        total_error += result[1]
    total = math.fsum(values)
    budget = max(settings.QUAD_PANEL_ABS_TOLERANCE * len(values), settings.QUAD_RELATIVE_TOLERANCE * abs(total))
    if total_error > budget:
        raise QuadratureError(f"{what}: accumulated error above budget {budget:.3e}", total_error)
    return total


def _scalar_weight(sd: OhmicFamilySpectralDensity, beta: InverseTemperature) -> Callable[[float], float]:
    """J(ω)·coth(βω/2) as a plain-float function."""
    lam, s, cutoff = sd.lam, sd.s, sd.omega
    prefactor = lam * cutoff ** (1.0 - s)
    if beta.is_zero_temperature:
        return lambda w: prefactor * w**s * math.exp(-w / cutoff)
    half_beta = 0.5 * beta.beta
    return lambda w: prefactor * w**s * math.exp(-w / cutoff) / math.tanh(half_beta * w)


def dephasing_rate_quadrature(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, t: float) -> float:
    """
    𝒟(t) = ∫₀^∞ J(ω) coth(βω/2) sin(ωt)/ω dω by panelled adaptive Gauss–Kronrod quadrature.

    Raises:
        QuadratureError: If a panel fails to converge within the subdivision budget
    """
    t = float(_as_times(t))
    if t == 0.0 or sd.lam == 0.0:
        return 0.0
    weight = _scalar_weight(sd, beta)
    upper = _upper_limit(sd, beta)
    return _integrate_panels(lambda w: weight(w) * math.sin(w * t) / w, _panel_edges(sd, upper, t), "dephasing rate")


def decoherence_quadrature(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, t: float) -> float:
    """
    γ(t) = exp[-∫₀^∞ J(ω) coth(βω/2) (1 - cos ωt)/ω² dω].

    Raises:
        QuadratureError: If a panel fails to converge within the subdivision budget
    """
    t = float(_as_times(t))
    if t == 0.0 or sd.lam == 0.0:
        return 1.0
    weight = _scalar_weight(sd, beta)
    upper = _upper_limit(sd, beta)
    # 1 - cos x = 2 sin²(x/2) avoids cancellation near ω = 0
    exponent = _integrate_panels(
        lambda w: weight(w) * 2.0 * math.sin(0.5 * w * t) ** 2 / (w * w),
        _panel_edges(sd, upper, t),
        "decoherence exponent",
    )
    return math.exp(-exponent)


def phase_phi_quadrature(sd: OhmicFamilySpectralDensity, t1: float, t2: float) -> float:
    """φ(t2, t1) = ∫₀^∞ J(ω)/ω² [sin ωt2 - sin ωt1 - sin ω(t2-t1)] dω (temperature independent)."""
    _check_time_pair(t1, t2)
    if t1 == 0.0 or t1 == t2 or sd.lam == 0.0:
        return 0.0
    weight = _scalar_weight(sd, InverseTemperature.zero_temperature())
    upper = _upper_limit(sd, InverseTemperature.zero_temperature())
    tau = t2 - t1
    return _integrate_panels(
        lambda w: weight(w) * (math.sin(w * t2) - math.sin(w * t1) - math.sin(w * tau)) / (w * w),
        _panel_edges(sd, upper, t2),
        "two-time phase",
    )


def _integrate_on_grid(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, ts: np.ndarray, kernel, what: str):
    upper = _upper_limit(sd, beta)
    edges = _panel_edges(sd, upper, float(ts.max()))

    def integrand(w: float) -> np.ndarray:
        j = float(evaluate_weight(sd, beta, w))
        return j * kernel(w, ts)

    result, error, info = quad_vec(
        integrand,
        0.0,
        upper,
        epsabs=settings.QUAD_PANEL_ABS_TOLERANCE,
        epsrel=settings.QUAD_RELATIVE_TOLERANCE,
        norm="max",
        limit=max(settings.QUAD_GRID_SUBDIVISION_LIMIT, 4 * len(edges)),
        points=edges[1:-1],
        full_output=True,
    )
    if info.status != 0:
        raise QuadratureError(f"{what} on grid: {info.message}", float(error))
    return result


def evaluate_weight(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, omega: ArrayLike):
    """J(ω)·coth(βω/2) for ω > 0."""
    w = np.asarray(omega, dtype=float)
    return sd.lam * np.power(w, sd.s) * sd.omega ** (1.0 - sd.s) * np.exp(-w / sd.omega) * beta.coth_half(w)


def dephasing_rate_quadrature_grid(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, t: ArrayLike) -> np.ndarray:
    """Vectorized 𝒟(t) over many times with one adaptive pass over ω."""
    ts = np.atleast_1d(_as_times(t))
    if sd.lam == 0.0 or not np.any(ts > 0.0):
        return np.zeros_like(ts)
    return _integrate_on_grid(sd, beta, ts, lambda w, tt: np.sin(w * tt) / w, "dephasing rate")


def decoherence_quadrature_grid(sd: OhmicFamilySpectralDensity, beta: InverseTemperature, t: ArrayLike) -> np.ndarray:
    """Vectorized γ(t) over many times with one adaptive pass over ω."""
    ts = np.atleast_1d(_as_times(t))
    if sd.lam == 0.0 or not np.any(ts > 0.0):
        return np.ones_like(ts)
    exponent = _integrate_on_grid(
        sd, beta, ts, lambda w, tt: 2.0 * np.sin(0.5 * w * tt) ** 2 / (w * w), "decoherence exponent"
    )
    return np.exp(-exponent)


# Master equation

def integrate_master_equation(
    model: "IDephasingModel", rho0: DensityMatrix2, t_grid: ArrayLike
) -> List[DensityMatrix2]:
    """
    Integrate dρ/dt = -i(ε/2)[σz, ρ] + (𝒟/2)(σz ρ σz - ρ) with an embedded RK 5(4) scheme.

    Args:
        model: Dephasing backend supplying 𝒟(t) and ε(t)
        rho0: State at t = 0
        t_grid: Ascending times starting at 0

    Returns:
        States at every grid time

    Raises:
        IntegrationError: If the integrator stops early (step-size underflow)
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or ts[0] != 0.0 or np.any(np.diff(ts) <= 0.0):
        raise UnphysicalParameterError("t_grid must be strictly ascending and start at 0")
    if ts.size == 1 or rho0.rho01 == 0:
        return [rho0 for _ in ts]

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(2, 2)
        commutator = SIGMA_Z @ rho - rho @ SIGMA_Z
        dissipator = SIGMA_Z @ rho @ SIGMA_Z - rho
        return (-0.5j * model.epsilon(t) * commutator + 0.5 * model.dephasing_rate(t) * dissipator).ravel()

    solution = solve_ivp(
        rhs,
        (0.0, float(ts[-1])),
        rho0.to_matrix().ravel(),
        method="RK45",
        t_eval=ts,
        rtol=settings.ODE_RTOL,
        atol=settings.ODE_ATOL,
    )
    if solution.status < 0:
        failed_at = float(solution.t[-1]) if solution.t.size else 0.0
        raise IntegrationError(f"master equation integration failed: {solution.message}", failed_at)
    logger.debug("master equation: %d right-hand-side evaluations", solution.nfev)

    trajectory = []
    for column in solution.y.T:
        trajectory.append(DensityMatrix2(column[0].real, column[3].real, column[1]))
    return trajectory

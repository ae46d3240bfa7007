"""
Two-time correlation functions: exact values, regression-theorem (QRT) predictions and the
relative-error estimator Z.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma as gamma_function

import config.settings as settings
from src.exceptions import IllConditionedError, UnphysicalParameterError, UnsupportedParameterError
from src.qdmat import DensityMatrix2, PauliBasisLabel, dephase_evolve, psi_plus
from src.spectral import OhmicFamilySpectralDensity
from src.strategy import IDephasingModel

logger = logging.getLogger(__name__)

OperatorPair = Tuple[PauliBasisLabel, PauliBasisLabel]

LOWER_RAISE: OperatorPair = (PauliBasisLabel.SIGMA_MINUS, PauliBasisLabel.SIGMA_PLUS)
RAISE_LOWER: OperatorPair = (PauliBasisLabel.SIGMA_PLUS, PauliBasisLabel.SIGMA_MINUS)


@dataclass(frozen=True)
class TwoTimeCorrelation:
    """
    <A(t2)B(t1)> exactly and as predicted by the regression theorem.

    trivial is set for operator pairs the regression theorem reproduces exactly
    (any conserved operator, or A = B = σ±).
    """

    exact: complex
    qrt: complex
    t1: float
    t2: float
    operator_pair: OperatorPair
    trivial: bool = False

    def __post_init__(self):
        if self.t2 < self.t1:
            raise UnphysicalParameterError(f"need t1 ≤ t2, got t1={self.t1}, t2={self.t2}")

    @property
    def relative_error(self) -> float:
        """|1 - qrt/exact|, 0 when both vanish."""
        if self.exact == 0:
            return 0.0 if self.qrt == 0 else math.inf
        return abs(1.0 - self.qrt / self.exact)


def _check_times(t1: float, t2: float) -> None:
    if t1 < 0.0 or t2 < t1:
        raise UnphysicalParameterError(f"need 0 ≤ t1 ≤ t2, got t1={t1!r}, t2={t2!r}")


def _state_at(model: IDephasingModel, rho0: DensityMatrix2, t: float) -> DensityMatrix2:
    return dephase_evolve(rho0, model.gamma(t), model.omega_s, t)


def _population(model: IDephasingModel, rho0: DensityMatrix2, t1: float, pair: OperatorPair) -> float:
    """<σ-σ+>(t1) = rho11 or <σ+σ->(t1) = rho00, read off the evolved state."""
    rho_t1 = _state_at(model, rho0, t1)
    return rho_t1.rho11 if pair == LOWER_RAISE else rho_t1.rho00


def _require_nontrivial(pair: OperatorPair) -> None:
    if pair not in (LOWER_RAISE, RAISE_LOWER):
        raise UnsupportedParameterError(
            f"pair {pair[0].value}/{pair[1].value} satisfies the regression theorem trivially; use two_time_correlation"
        )


def corr_exact(
    model: IDephasingModel, rho0: DensityMatrix2, t1: float, t2: float, pair: OperatorPair = LOWER_RAISE
) -> complex:
    """
    Exact <A(t2)B(t1)> for (σ-, σ+) or (σ+, σ-).

    (σ-, σ+): e^{-iω_s τ} γ(τ) e^{iφ(t2,t1)} <σ-σ+>(t1), τ = t2 - t1
    (σ+, σ-): e^{iω_s τ} γ*(τ) e^{iφ(t2,t1)} <σ+σ->(t1)
    """
    _check_times(t1, t2)
    _require_nontrivial(pair)
    gamma21, phi = model.two_time(t1, t2)
    tau = t2 - t1
    population = _population(model, rho0, t1, pair)
    if pair == LOWER_RAISE:
        return cmath.exp(-1j * model.omega_s * tau) * gamma21 * cmath.exp(1j * phi) * population
    return cmath.exp(1j * model.omega_s * tau) * complex(gamma21).conjugate() * cmath.exp(1j * phi) * population


def corr_qrt(
    model: IDephasingModel, rho0: DensityMatrix2, t1: float, t2: float, pair: OperatorPair = LOWER_RAISE
) -> complex:
    """
    Regression-theorem prediction: the correlator propagated in t2 with the one-time map.

    (σ-, σ+): e^{-iω_s τ} (γ(t2)/γ(t1)) <σ-σ+>(t1), and the conjugate pattern for (σ+, σ-).

    Raises:
        IllConditionedError: If |γ(t1)| is below ILL_CONDITIONED_THRESHOLD
    """
    _check_times(t1, t2)
    _require_nontrivial(pair)
    gamma1 = model.gamma(t1)
    if abs(gamma1) < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("QRT ratio γ(t2)/γ(t1) is ill-conditioned", abs(gamma1))
    ratio = model.gamma(t2) / gamma1
    tau = t2 - t1
    population = _population(model, rho0, t1, pair)
    if pair == LOWER_RAISE:
        return cmath.exp(-1j * model.omega_s * tau) * ratio * population
    return cmath.exp(1j * model.omega_s * tau) * ratio.conjugate() * population


def _trivial_value(model: IDephasingModel, rho0: DensityMatrix2, t1: float, t2: float, pair: OperatorPair) -> complex:
    """
    Correlators of pairs containing a conserved operator.

    A conserved: A(t2) = A(t1), so the value is Tr[AB ρ(t1)]; B conserved: Tr[AB ρ(t2)].
    A = B = σ± gives zero since σ±(t2)σ±(t1) ∝ σ±² = 0.
    """
    first, second = pair
    if not (first.is_conserved or second.is_conserved):
        return 0j
    t_eval = t1 if first.is_conserved else t2
    rho = _state_at(model, rho0, t_eval).to_matrix()
    return complex(np.trace(first.matrix @ second.matrix @ rho))


def two_time_correlation(
    model: IDephasingModel, rho0: DensityMatrix2, t1: float, t2: float, pair: OperatorPair = LOWER_RAISE
) -> TwoTimeCorrelation:
    """Exact and QRT correlators for any ordered pair of basis operators."""
    _check_times(t1, t2)
    if pair in (LOWER_RAISE, RAISE_LOWER):
        return TwoTimeCorrelation(
            corr_exact(model, rho0, t1, t2, pair), corr_qrt(model, rho0, t1, t2, pair), t1, t2, pair
        )
    value = _trivial_value(model, rho0, t1, t2, pair)
    return TwoTimeCorrelation(value, value, t1, t2, pair, trivial=True)


def z_estimator(model: IDephasingModel, t1: float, t2: float) -> float:
    """
    Z = |1 - γ(t2)/(γ(t1)γ(t2,t1)e^{iφ(t2,t1)})|, independent of the initial state.

    Raises:
        IllConditionedError: If |γ(t1)γ(t2,t1)| is below ILL_CONDITIONED_THRESHOLD
    """
    _check_times(t1, t2)
    gamma21, phi = model.two_time(t1, t2)
    denominator = model.gamma(t1) * gamma21
    if abs(denominator) < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("Z denominator vanishes", abs(denominator))
    return abs(1.0 - model.gamma(t2) / (denominator * cmath.exp(1j * phi)))


def z_closed_spinboson(sd: OhmicFamilySpectralDensity, t1: float, t2: float) -> float:
    """
    Closed-form Z for the zero-temperature spin-boson model,
    |1 - exp[λΓ(s-1)(1 - c(t2-t1) - c(t1) + c(t2))]| with c(t) = (1+iΩt)^{1-s}.

    Raises:
        UnsupportedParameterError: If s ≤ 1
    """
    _check_times(t1, t2)
    if sd.s <= 1.0:
        raise UnsupportedParameterError(f"closed-form Z needs s > 1 (got s={sd.s})")

    def c(t: float) -> complex:
        return (1.0 + 1j * sd.omega * t) ** (1.0 - sd.s)

    exponent = sd.lam * gamma_function(sd.s - 1.0) * (1.0 - c(t2 - t1) - c(t1) + c(t2))
    return abs(1.0 - cmath.exp(exponent))


def _generator_entry(model: IDephasingModel, label: PauliBasisLabel, t: float) -> complex:
    """Diagonal regression generator: γ'/γ - iω_s on σ-, its conjugate on σ+, 0 on conserved operators."""
    if label.is_conserved:
        return 0j
    entry = model.log_derivative(t) - 1j * model.omega_s
    return entry if label is PauliBasisLabel.SIGMA_MINUS else entry.conjugate()


def qrt_generator_check(
    model: IDephasingModel,
    t_grid: Sequence[float],
    rho0: Optional[DensityMatrix2] = None,
    pair: OperatorPair = LOWER_RAISE,
) -> float:
    """
    Verify d/dt2 <A(t2)B(t1)>_qrt = G_A(t2)·<A(t2)B(t1)>_qrt by central finite differences.

    t1 is the first grid time; points closer than one step to t1 are skipped.

    Args:
        model: Dephasing backend
        t_grid: Ascending times, t_grid[0] = t1
        rho0: Initial state (|ψ+> by default)
        pair: Operator pair (A, B)

    Returns:
        Max over the grid of |FD - prediction|·T/|C|, T the backend time scale
    """
    rho0 = rho0 or psi_plus()
    ts = np.asarray(t_grid, dtype=float)
    t1 = float(ts[0])
    step = settings.FD_STEP * model.time_scale
    worst = 0.0
    for t2 in ts:
        if t2 - step < t1:
            continue
        value = two_time_correlation(model, rho0, t1, t2, pair).qrt
        forward = two_time_correlation(model, rho0, t1, t2 + step, pair).qrt
        backward = two_time_correlation(model, rho0, t1, t2 - step, pair).qrt
        derivative = (forward - backward) / (2.0 * step)
        predicted = _generator_entry(model, pair[0], float(t2)) * value
        scale = abs(value) / model.time_scale
        if scale == 0.0:
            residual = 0.0 if derivative == 0 else math.inf
        else:
            residual = abs(derivative - predicted) / scale
        worst = max(worst, residual)
    logger.debug("QRT generator check: max residual %.3e over %d points", worst, ts.size)
    return worst

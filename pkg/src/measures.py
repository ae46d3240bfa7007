"""
Non-Markovianity measures for dephasing dynamics.
Sign-interval detection on 𝒟(t), the trace-distance (BLP) and divisibility (RHP) measures,
and a Choi-matrix cross-check of the divisibility-violation rate.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

import config.settings as settings
from src.exceptions import IllConditionedError, UnphysicalParameterError
from src.qdmat import DensityMatrix2, dephase_evolve, psi_minus, psi_plus, trace_distance
from src.strategy import IDephasingModel

logger = logging.getLogger(__name__)

BLOCH_POLAR_POINTS = 17
BLOCH_AZIMUTHAL_POINTS = 33


@dataclass(frozen=True)
class SignIntervalSet:
    """
    Ordered, disjoint time intervals on which 𝒟(t) < 0.

    An open-ended final interval has b = inf (tail_flag). tail_unresolved marks a
    horizon at which 𝒟 was indistinguishable from zero.
    """

    intervals: Tuple[Tuple[float, float], ...]
    horizon: float
    tail_flag: bool = False
    tail_unresolved: bool = False

    def __post_init__(self):
        previous_end = 0.0
        for a, b in self.intervals:
            if not previous_end <= a < b:
                raise ValueError(f"intervals must be ordered and disjoint, got ({a}, {b}) after {previous_end}")
            previous_end = b
        if self.tail_flag and (not self.intervals or not math.isinf(self.intervals[-1][1])):
            raise ValueError("tail_flag requires an open-ended final interval")

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals


@dataclass(frozen=True)
class MeasurePair:
    """BLP and RHP measures; lower_bound marks a horizon-truncated open-ended interval."""

    blp: float
    rhp: float
    lower_bound: bool = False

    def __post_init__(self):
        if self.blp < 0.0 or self.rhp < 0.0:
            raise ValueError(f"measures must be non-negative, got blp={self.blp}, rhp={self.rhp}")


@dataclass(frozen=True)
class BlochPairResult:
    theta: float
    phi: float
    value: float


def _refine_root(model: IDephasingModel, left: float, right: float, f_left: float, f_right: float) -> float:
    """Brent refinement inside a bracketing scan cell."""
    a, b = model.dephasing_rate(left), model.dephasing_rate(right)
    if a == 0.0:
        return left
    if b == 0.0:
        return right
    if a * b > 0.0:
        # pointwise and grid evaluations disagree on the sign; interpolate the grid values
        return left - f_left * (right - left) / (f_right - f_left)
    root, result = brentq(model.dephasing_rate, left, right, xtol=settings.ROOT_TOLERANCE * 1e-2, full_output=True)
    logger.debug("root %.12g after %d Brent iterations", root, result.iterations)
    return root


def find_negative_rate_intervals(model: IDephasingModel, horizon: Optional[float] = None) -> SignIntervalSet:
    """
    Locate every interval where 𝒟(t) < 0 up to the horizon.

    A uniform scan with SCAN_STEPS cells brackets each sign change, which is then
    refined with Brent's method. If 𝒟 is still negative at the horizon the last
    interval is open-ended.

    Args:
        model: Dephasing backend
        horizon: Largest time scanned (DEFAULT_HORIZON characteristic times by default)

    Returns:
        SignIntervalSet
    """
    horizon = settings.DEFAULT_HORIZON * model.time_scale if horizon is None else float(horizon)
    if not horizon > 0.0:
        raise UnphysicalParameterError(f"horizon must be positive, got {horizon!r}")
    ts = np.linspace(0.0, horizon, settings.SCAN_STEPS + 1)
    values = np.asarray(model.rate_on_grid(ts), dtype=float)

    intervals = []
    start = None
    for i in range(1, ts.size):
        prev, cur = values[i - 1], values[i]
        if start is None and prev >= 0.0 and cur < 0.0:
            start = _refine_root(model, ts[i - 1], ts[i], prev, cur)
        elif start is not None and prev < 0.0 and cur >= 0.0:
            end = _refine_root(model, ts[i - 1], ts[i], prev, cur)
            intervals.append((start, end))
            start = None

    tail_flag = start is not None
    if tail_flag:
        intervals.append((start, math.inf))

    scale = float(np.max(np.abs(values)))
    tail_unresolved = scale > 0.0 and abs(values[-1]) < settings.TAIL_NOISE_FRACTION * scale
    if tail_unresolved:
        logger.warning("⚠ 𝒟 is indistinguishable from zero at the horizon t=%g; tail sign unresolved", horizon)
    return SignIntervalSet(tuple(intervals), horizon, tail_flag, tail_unresolved)


def _abs_gamma_at(model: IDephasingModel, t: float, intervals: SignIntervalSet) -> Tuple[float, bool]:
    """|γ(t)|, with t = inf mapped to the exact limit or, failing that, the horizon value."""
    if not math.isinf(t):
        return abs(model.gamma(t)), False
    limit = model.gamma_limit
    if limit is not None:
        return limit, False
    return abs(model.gamma(intervals.horizon)), True


def blp_measure(model: IDephasingModel, intervals: SignIntervalSet) -> float:
    """
    Trace-distance measure Σ_m (|γ(b_m)| - |γ(a_m)|) for the optimal pair |ψ±>.

    Open-ended intervals use the exact long-time limit when the backend has one;
    otherwise the horizon value, which makes the result a lower bound.
    """
    total = 0.0
    for a, b in intervals.intervals:
        end, truncated = _abs_gamma_at(model, b, intervals)
        if truncated:
            logger.warning("⚠ BLP open-ended interval truncated at horizon t=%g; result is a lower bound", intervals.horizon)
        total += end - abs(model.gamma(a))
    return max(total, 0.0)


def rhp_measure(model: IDephasingModel, intervals: SignIntervalSet) -> float:
    """Divisibility measure Σ_m (ln|γ(b_m)| - ln|γ(a_m)|) = ∫ max(0, -𝒟) dt."""
    total = 0.0
    for a, b in intervals.intervals:
        end, truncated = _abs_gamma_at(model, b, intervals)
        if truncated:
            logger.warning("⚠ RHP open-ended interval truncated at horizon t=%g; result is a lower bound", intervals.horizon)
        total += math.log(end) - math.log(abs(model.gamma(a)))
    return max(total, 0.0)


def compute_measures(model: IDephasingModel, horizon: Optional[float] = None) -> MeasurePair:
    """Both measures from one interval scan."""
    intervals = find_negative_rate_intervals(model, horizon)
    lower_bound = intervals.tail_flag and model.gamma_limit is None
    return MeasurePair(blp_measure(model, intervals), rhp_measure(model, intervals), lower_bound)


def rhp_rate(model: IDephasingModel, t: float) -> float:
    """g(t) = max(0, -𝒟(t))."""
    return max(0.0, -model.dephasing_rate(t))


def choi_matrix(c: complex) -> np.ndarray:
    """
    Unnormalized Choi matrix Σ_ij |i><j| ⊗ Λ(|i><j|) of the dephasing map ρ01 -> c·ρ01.
    """
    choi = np.zeros((4, 4), dtype=complex)
    choi[0, 0] = choi[3, 3] = 1.0
    choi[0, 3] = c
    choi[3, 0] = complex(c).conjugate()
    return choi


def choi_eigenvalues(c: complex) -> Tuple[float, float, float, float]:
    """Closed-form spectrum {1 - |c|, 0, 0, 1 + |c|} of choi_matrix(c)."""
    return (1.0 - abs(c), 0.0, 0.0, 1.0 + abs(c))


def choi_trace_norm(c: complex) -> float:
    return float(sum(abs(x) for x in choi_eigenvalues(c)))


def choi_g_numeric(model: IDephasingModel, t: float, epsilon: Optional[float] = None) -> float:
    """
    (‖Choi[Λ(t+ε, t)]‖₁/2 - 1)/ε, which tends to rhp_rate(t) as ε -> 0.

    Args:
        model: Dephasing backend
        t: Time
        epsilon: Propagator step (CHOI_EPSILON characteristic times by default)

    Raises:
        IllConditionedError: If |γ(t)| is below ILL_CONDITIONED_THRESHOLD
    """
    epsilon = settings.CHOI_EPSILON * model.time_scale if epsilon is None else epsilon
    gamma_t = model.gamma(t)
    if abs(gamma_t) < settings.ILL_CONDITIONED_THRESHOLD:
        raise IllConditionedError("intermediate propagator is ill-conditioned", abs(gamma_t))
    c = model.gamma(t + epsilon) / gamma_t * complex(math.cos(model.omega_s * epsilon), -math.sin(model.omega_s * epsilon))
    return (0.5 * choi_trace_norm(c) - 1.0) / epsilon


def trace_distance_evolution(model: IDephasingModel, rho1: DensityMatrix2, rho2: DensityMatrix2, t: float) -> float:
    """
    Trace distance of two states after dephasing for time t, √(δp² + |δc|²|γ(t)|²).
    """
    gamma = model.gamma(t)
    return trace_distance(
        dephase_evolve(rho1, gamma, model.omega_s, t),
        dephase_evolve(rho2, gamma, model.omega_s, t),
    )


def optimal_pair() -> Tuple[DensityMatrix2, DensityMatrix2]:
    """|ψ+>, |ψ->, whose trace distance is |γ(t)|."""
    return psi_plus(), psi_minus()


def blp_pair_search(model: IDephasingModel, intervals: SignIntervalSet) -> BlochPairResult:
    """
    Search antipodal pure-state pairs on a polar × azimuthal Bloch-sphere grid for the largest
    total trace-distance rise over the intervals. Used to confirm that |ψ±> is optimal.
    """
    best = BlochPairResult(0.0, 0.0, -math.inf)
    endpoints = [
        (_abs_gamma_at(model, a, intervals)[0], _abs_gamma_at(model, b, intervals)[0]) for a, b in intervals.intervals
    ]
    for theta in np.linspace(0.0, math.pi, BLOCH_POLAR_POINTS):
        for phi in np.linspace(0.0, 2.0 * math.pi, BLOCH_AZIMUTHAL_POINTS):
            rho1 = DensityMatrix2.from_bloch(theta, phi)
            rho2 = DensityMatrix2.from_bloch(math.pi - theta, phi + math.pi)
            dp = rho1.rho00 - rho2.rho00
            dc = abs(rho1.rho01 - rho2.rho01)
            rise = math.fsum(math.hypot(dp, dc * gb) - math.hypot(dp, dc * ga) for ga, gb in endpoints)
            if rise > best.value:
                best = BlochPairResult(float(theta), float(phi), rise)
    return best

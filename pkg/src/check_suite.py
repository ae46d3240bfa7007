"""
Invariant check suite behind `app.py check`.
Each check computes a max residual against its threshold from settings.CHECK_THRESHOLDS;
the report is JSON-serializable and its pass flag drives the exit status.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

import config.settings as settings
from src import dephasing, measures, oracle, photonic, qrt
from src.dephasing import InverseTemperature
from src.exceptions import NumericalError, UnsupportedParameterError
from src.qdmat import dephase_evolve, psi_plus
from src.spectral import LorentzianMixture, OhmicFamilySpectralDensity
from src.strategy import BackendFactory, IDephasingModel, PhotonicBackend, SpinBosonClosedBackend

logger = logging.getLogger(__name__)

IDENTITY_EXPONENTS = (1.5, 2.0, 3.0, 3.5, 4.0, 5.5)
ZERO_EXPONENTS = (3.0, 4.0, 5.0, 5.5)
ORACLE_EXPONENTS = (2.0, 3.0, 4.0)
MEASURE_COUPLINGS = (0.25, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    threshold: float
    passed: bool
    status: str
    detail: str = ""


@dataclass(frozen=True)
class CheckReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.status != "skipped")

    def to_dict(self) -> dict:
        def clean(value):
            return value if value is None or math.isfinite(value) else str(value)

        checks = [{**asdict(c), "max_residual": clean(c.max_residual)} for c in self.checks]
        return {
            "tool": f"{settings.APP_TITLE} {settings.APP_VERSION}",
            "passed": self.passed,
            "checks": checks,
        }


@dataclass
class CheckContext:
    """Model parameters shared by the checks; `backend` replaces the model for backend-level checks."""

    sd: OhmicFamilySpectralDensity
    beta: InverseTemperature
    omega_s: float = 0.0
    backend: Optional[IDephasingModel] = None

    def model(self) -> IDephasingModel:
        if self.backend is not None:
            return self.backend
        return BackendFactory.for_spectral_density(self.sd, InverseTemperature.zero_temperature(), self.omega_s)

    def closed_model(self) -> IDephasingModel:
        model = self.model()
        if self.backend is None and not isinstance(model, SpinBosonClosedBackend):
            raise UnsupportedParameterError(f"no closed form for s={self.sd.s}")
        return model

    def coupled(self, **changes) -> OhmicFamilySpectralDensity:
        """Spectral density with at least unit coupling strength where λ = 0 would make a check vacuous."""
        sd = self.sd.with_updates(**changes)
        return sd if sd.lam > 0.0 else sd.with_updates(lam=1.0)


def _times(ctx: CheckContext, start: float, stop: float, count: int) -> np.ndarray:
    return np.linspace(start, stop, count) / ctx.sd.omega


def check_rate_forms_identity(ctx: CheckContext) -> float:
    """Sine form vs compact Im[(1+iΩt)^s] form of 𝒟_s, relative to max|𝒟| on the grid."""
    ts = _times(ctx, 0.0, 20.0, 200)
    worst = 0.0
    for s in IDENTITY_EXPONENTS:
        sd = ctx.coupled(s=s)
        sine_form = dephasing.dephasing_rate_closed(sd, ts)
        compact = dephasing.dephasing_rate_compact(sd, ts)
        worst = max(worst, float(np.max(np.abs(sine_form - compact)) / np.max(np.abs(sine_form))))
    return worst


def check_rate_log_derivative(ctx: CheckContext) -> float:
    """𝒟(t) against -d ln|γ|/dt by central differences, in units of the backend time scale."""
    model = ctx.closed_model()
    step = settings.FD_STEP * model.time_scale
    worst = 0.0
    for t in np.linspace(0.1, 10.0, 40) * model.time_scale:
        fd = -(math.log(abs(model.gamma(t + step))) - math.log(abs(model.gamma(t - step)))) / (2.0 * step)
        worst = max(worst, abs(fd - model.dephasing_rate(t)) * model.time_scale)
    return worst


def check_quadrature_gamma(ctx: CheckContext) -> float:
    """Quadrature at β = 1e6 against the zero-temperature closed form."""
    if ctx.sd.s <= 1.0:
        raise UnsupportedParameterError("closed-form γ needs s > 1")
    cold = InverseTemperature(1e6)
    worst = 0.0
    for t in _times(ctx, 0.0, 10.0, 21):
        closed = dephasing.decoherence_closed(ctx.sd, t)
        worst = max(worst, abs(dephasing.decoherence_quadrature(ctx.sd, cold, t) - closed) / closed)
    return worst


def check_quadrature_rate(ctx: CheckContext) -> float:
    ts = _times(ctx, 0.0, 10.0, 21)
    closed = dephasing.dephasing_rate_closed(ctx.sd, ts)
    quadrature = dephasing.dephasing_rate_quadrature_grid(ctx.sd, InverseTemperature(1e6), ts)
    scale = max(float(np.max(np.abs(closed))), settings.QUAD_PANEL_ABS_TOLERANCE)
    return float(np.max(np.abs(quadrature - closed))) / scale


def check_dephasing_zeros(ctx: CheckContext) -> float:
    """Sign changes found by the interval scan against tan(kπ/s)/Ω."""
    worst = 0.0
    for s in ZERO_EXPONENTS:
        sd = ctx.coupled(s=s)
        found = measures.find_negative_rate_intervals(SpinBosonClosedBackend(sd))
        endpoints = sorted(x for interval in found.intervals for x in interval if math.isfinite(x))
        expected = dephasing.dephasing_zeros(sd)
        if len(endpoints) != len(expected):
            return math.inf
        worst = max(worst, max(abs(a - b) for a, b in zip(endpoints, expected)))
    return worst


def check_closed_form_measures(ctx: CheckContext) -> float:
    """Interval-scan measures against the s = 3 and s = 4 closed forms."""
    closed_forms = {
        3.0: (lambda lam: math.exp(-lam) - math.exp(-9.0 * lam / 8.0), lambda lam: lam / 8.0),
        4.0: (lambda lam: math.exp(-2.0 * lam) - math.exp(-2.5 * lam), lambda lam: lam / 2.0),
    }
    worst = 0.0
    for s, (blp_form, rhp_form) in closed_forms.items():
        for lam in MEASURE_COUPLINGS:
            result = measures.compute_measures(SpinBosonClosedBackend(ctx.sd.with_updates(lam=lam, s=s)))
            worst = max(worst, abs(result.blp - blp_form(lam)), abs(result.rhp - rhp_form(lam)))
    return worst


def check_measure_zeros(ctx: CheckContext) -> float:
    """Both measures vanish exactly for s = 1, 2."""
    worst = 0.0
    for s in (1.0, 2.0):
        for lam in np.linspace(0.1, 3.0, 10):
            result = measures.compute_measures(SpinBosonClosedBackend(ctx.sd.with_updates(lam=float(lam), s=s)))
            worst = max(worst, result.blp, result.rhp)
    return worst


def _oracle_points(ctx: CheckContext):
    for s in ORACLE_EXPONENTS:
        for lam in (0.5, 1.0, 2.0):
            sd = ctx.sd.with_updates(lam=lam, s=s)
            yield sd, oracle.discretize_bath(sd)


def check_oracle_gamma(ctx: CheckContext) -> float:
    worst = 0.0
    ts = _times(ctx, 0.0, 10.0, 11)
    for sd, bath in _oracle_points(ctx):
        closed = dephasing.decoherence_closed(sd, ts)
        worst = max(worst, float(np.max(np.abs(oracle.oracle_gamma(bath, ts) - closed) / closed)))
    return worst


def check_oracle_phi(ctx: CheckContext) -> float:
    t1, t2 = 1.0 / ctx.sd.omega, 2.0 / ctx.sd.omega
    return max(abs(oracle.oracle_two_time(bath, t1, t2)[1] - dephasing.phase_phi(sd, t1, t2)) for sd, bath in _oracle_points(ctx))


def check_oracle_z(ctx: CheckContext) -> float:
    t1, t2 = 1.0 / ctx.sd.omega, 2.0 / ctx.sd.omega
    return max(abs(oracle.oracle_z(bath, t1, t2) - qrt.z_closed_spinboson(sd, t1, t2)) for sd, bath in _oracle_points(ctx))


def check_oracle_finite_temperature(ctx: CheckContext) -> float:
    """Thermal oracle against thermal quadrature at the requested β (β = 2 at zero temperature)."""
    beta = InverseTemperature(2.0) if ctx.beta.is_zero_temperature else ctx.beta
    sd = ctx.coupled()
    bath = oracle.discretize_bath(sd, beta)
    ts = _times(ctx, 0.5, 5.0, 10)
    quadrature = dephasing.decoherence_quadrature_grid(sd, beta, ts)
    return float(np.max(np.abs(oracle.oracle_gamma(bath, ts) - quadrature) / quadrature))


def check_time_translation(ctx: CheckContext) -> float:
    """Oracle γ(t2, t1) = γ(t2 - t1) on sampled pairs."""
    bath = oracle.discretize_bath(ctx.coupled())
    rng = np.random.default_rng(7)
    worst = 0.0
    for t1, tau in rng.uniform(0.0, 10.0, size=(20, 2)) / ctx.sd.omega:
        gamma21, _ = oracle.oracle_two_time(bath, t1, t1 + tau)
        worst = max(worst, abs(gamma21 - oracle.oracle_gamma(bath, tau)))
    return worst


def _trajectory_residual(model: IDephasingModel, ts: np.ndarray) -> float:
    rho0 = psi_plus()
    trajectory = dephasing.integrate_master_equation(model, rho0, ts)
    return max(
        abs(rho.rho01 - dephase_evolve(rho0, model.gamma(t), model.omega_s, t).rho01) for rho, t in zip(trajectory, ts)
    )


def check_master_equation_ohmic(ctx: CheckContext) -> float:
    model = ctx.closed_model()
    return _trajectory_residual(model, np.linspace(0.0, 5.0, 51) * model.time_scale)


def check_master_equation_photonic(ctx: CheckContext) -> float:
    model = PhotonicBackend(photonic.PhotonicModel(LorentzianMixture.single(1.0, omega0=0.5)), ctx.omega_s)
    return _trajectory_residual(model, np.linspace(0.0, 5.0, 51))


def check_qrt_generator(ctx: CheckContext) -> float:
    model = ctx.closed_model()
    return qrt.qrt_generator_check(model, np.linspace(0.1, 5.0, 50) * model.time_scale)


def check_choi_vs_rhp_rate(ctx: CheckContext) -> float:
    model = ctx.closed_model()
    worst = 0.0
    for t in np.linspace(0.5, 10.0, 20) * model.time_scale:
        worst = max(worst, abs(measures.choi_g_numeric(model, t) - measures.rhp_rate(model, t)) * model.time_scale)
    return worst


def check_semigroup_qrt(ctx: CheckContext) -> float:
    """Single Lorentzian: Z vanishes on a 50 x 50 (t1, τ) grid."""
    model = photonic.PhotonicModel(LorentzianMixture.single(1.0, omega0=0.5))
    grid = np.linspace(0.0, 5.0, 50)
    return max(photonic.photonic_z(model, t1, t1 + tau) for t1 in grid for tau in grid)


def check_markovian_qrt_violation(ctx: CheckContext) -> float:
    """
    Equal-centers two-peak model: 𝒟 ≥ 0 everywhere yet Z exceeds the threshold.
    Returns max Z, or 0 when 𝒟 dips below zero anywhere.
    """
    ts = np.linspace(0.0, 20.0, 401)
    max_z = 0.0
    for split in np.linspace(0.0, 5.0, 11):
        model = photonic.panel_model("a", float(split))
        if np.min(photonic.photonic_dephasing_rate(model, ts)) < 0.0:
            return 0.0
        for tau in np.linspace(0.0, 10.0, 21):
            max_z = max(max_z, photonic.photonic_z(model, 1.0, 1.0 + tau))
    return max_z


# name -> (check, passes when residual exceeds the threshold instead of staying below it)
CHECKS: List[tuple] = [
    ("rate_forms_identity", check_rate_forms_identity, False),
    ("rate_log_derivative", check_rate_log_derivative, False),
    ("quadrature_gamma", check_quadrature_gamma, False),
    ("quadrature_rate", check_quadrature_rate, False),
    ("dephasing_zeros", check_dephasing_zeros, False),
    ("closed_form_measures", check_closed_form_measures, False),
    ("measure_zeros", check_measure_zeros, False),
    ("oracle_gamma", check_oracle_gamma, False),
    ("oracle_phi", check_oracle_phi, False),
    ("oracle_z", check_oracle_z, False),
    ("oracle_finite_temperature", check_oracle_finite_temperature, False),
    ("time_translation", check_time_translation, False),
    ("master_equation_ohmic", check_master_equation_ohmic, False),
    ("master_equation_photonic", check_master_equation_photonic, False),
    ("qrt_generator", check_qrt_generator, False),
    ("choi_vs_rhp_rate", check_choi_vs_rhp_rate, False),
    ("semigroup_qrt", check_semigroup_qrt, False),
    ("markovian_qrt_violation", check_markovian_qrt_violation, True),
]


def _run_one(name: str, check: Callable[[CheckContext], float], exceeds: bool, ctx: CheckContext) -> CheckResult:
    threshold = settings.CHECK_THRESHOLDS[name]
    try:
        residual = float(check(ctx))
    except UnsupportedParameterError as e:
        logger.info("- %s skipped: %s", name, e)
        return CheckResult(name, math.nan, threshold, False, "skipped", str(e))
    except NumericalError as e:
        logger.warning("⚠ %s raised: %s", name, e)
        return CheckResult(name, math.inf, threshold, False, "error", str(e))
    passed = residual > threshold if exceeds else residual <= threshold
    if passed:
        logger.info("✓ %s: %.3e (threshold %.0e)", name, residual, threshold)
    else:
        logger.warning("⚠ %s FAILED: %.3e (threshold %.0e)", name, residual, threshold)
    return CheckResult(name, residual, threshold, passed, "passed" if passed else "failed")


def run_check_suite(
    sd: Optional[OhmicFamilySpectralDensity] = None,
    beta: Optional[InverseTemperature] = None,
    omega_s: float = 0.0,
    backend: Optional[IDephasingModel] = None,
    only: Optional[List[str]] = None,
) -> CheckReport:
    """
    Run the invariant checks.

    Args:
        sd: Spectral density for model-dependent checks (λ = 1, s = 3 by default)
        beta: Temperature for the finite-temperature oracle check
        omega_s: System frequency
        backend: Replacement backend for the backend-level checks (rate, master equation, QRT, Choi)
        only: Restrict to these check names

    Returns:
        CheckReport
    """
    ctx = CheckContext(
        sd or OhmicFamilySpectralDensity(lam=1.0, s=3.0),
        beta or InverseTemperature.zero_temperature(),
        omega_s,
        backend,
    )
    selected = [c for c in CHECKS if only is None or c[0] in only]
    report = CheckReport([_run_one(name, check, exceeds, ctx) for name, check, exceeds in selected])
    summary = sum(c.passed for c in report.checks)
    logger.info("Check results: %d/%d passed", summary, len(report.checks))
    return report

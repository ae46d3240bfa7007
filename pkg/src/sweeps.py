"""
Parameter sweeps: grid axes, sweep specification, and ordered parallel evaluation of
sweep rows into pandas DataFrames.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config.settings as settings
from src import measures, oracle, photonic, qrt
from src.dephasing import InverseTemperature
from src.exceptions import DephasingError
from src.spectral import LorentzianMixture, OhmicFamilySpectralDensity
from src.strategy import BackendFactory

logger = logging.getLogger(__name__)

Command = Literal["measures", "qrt", "photonic", "oracle"]

ALLOWED_AXES: Dict[str, set] = {
    "measures": {"lambda", "s", "omega", "beta"},
    "qrt": {"lambda", "s", "omega", "t1", "t2"},
    "photonic": {"delta_delta_omega", "delta_omega0", "tau", "t1"},
    "oracle": {"t"},
}

ALLOWED_QUANTITIES: Dict[str, tuple] = {
    "measures": ("blp", "rhp"),
    "qrt": ("z",),
    "photonic": ("z", "blp", "entropy"),
    "oracle": ("gamma", "rate", "z"),
}

DEFAULT_QUANTITIES: Dict[str, tuple] = {
    "measures": ("blp", "rhp"),
    "qrt": ("z",),
    "photonic": ("z",),
    "oracle": ("gamma", "rate", "z"),
}

DEFAULT_GRIDS: Dict[str, tuple] = {
    "measures": ("lambda:0.01:3:100:log", "s:3:5.5:6:lin"),
    "qrt": ("lambda:0:3:31:lin", "s:2:4:3:lin"),
    "photonic_a": ("delta_delta_omega:0:5:51:lin", "tau:0:10:101:lin"),
    "photonic_b": ("delta_omega0:0:10:51:lin", "tau:0:10:101:lin"),
    "oracle": ("t:0:10:51:lin",),
}

PANEL_SPLIT_AXIS = {"a": "delta_delta_omega", "b": "delta_omega0"}


class GridAxis(BaseModel):
    """One sweep axis, written `name:min:max:count:lin|log` on the command line."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    minimum: float
    maximum: float
    count: int = Field(ge=2)
    scale: Literal["lin", "log"] = "lin"

    @model_validator(mode="after")
    def _check_range(self) -> "GridAxis":
        if self.maximum < self.minimum:
            raise ValueError(f"axis {self.name}: max {self.maximum} is below min {self.minimum}")
        if self.scale == "log" and self.minimum <= 0.0:
            raise ValueError(f"axis {self.name}: log spacing needs min > 0")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ValueError(f"grid axis {text!r} is not of the form name:min:max:count[:lin|log]")
        name, low, high, count = parts[:4]
        scale = parts[4] if len(parts) == 5 else "lin"
        return cls(name=name, minimum=float(low), maximum=float(high), count=int(count), scale=scale)

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.minimum, self.maximum, self.count)
        return np.linspace(self.minimum, self.maximum, self.count)

    def __str__(self) -> str:
        return f"{self.name}:{self.minimum!r}:{self.maximum!r}:{self.count}:{self.scale}"


class SweepSpec(BaseModel):
    """Everything one sweep needs: model block, axes, requested quantities and output."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    ohmic: OhmicFamilySpectralDensity = OhmicFamilySpectralDensity(lam=1.0, s=3.0)
    mixture: Optional[LorentzianMixture] = None
    beta: Optional[float] = Field(default=None, gt=0.0)
    omega_s: float = 0.0
    grid: List[GridAxis] = Field(default_factory=list)
    quantities: List[str] = Field(default_factory=list)
    t1: Optional[float] = Field(default=None, ge=0.0)
    t2: Optional[float] = Field(default=None, ge=0.0)
    panel: Literal["a", "b"] = "a"
    oracle_check: bool = False
    modes: int = Field(default=settings.ORACLE_MODES, ge=2)
    omega_max: Optional[float] = Field(default=None, gt=0.0)
    horizon: Optional[float] = Field(default=None, gt=0.0)
    threads: int = Field(default=settings.DEFAULT_THREADS, ge=1)
    output_path: Optional[str] = None
    output_format: Literal["csv", "json"] = "csv"

    @field_validator("grid", mode="before")
    @classmethod
    def _parse_axes(cls, value):
        return [GridAxis.parse(v) if isinstance(v, str) else v for v in value or []]

    @model_validator(mode="after")
    def _check_command_fields(self) -> "SweepSpec":
        allowed_axes = ALLOWED_AXES[self.command]
        for axis in self.grid:
            if axis.name not in allowed_axes:
                raise ValueError(f"axis {axis.name!r} is not valid for {self.command}; allowed: {sorted(allowed_axes)}")
        names = [axis.name for axis in self.grid]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate grid axes: {names}")
        for quantity in self.quantities:
            if quantity not in ALLOWED_QUANTITIES[self.command]:
                raise ValueError(
                    f"quantity {quantity!r} is not valid for {self.command}; allowed: {ALLOWED_QUANTITIES[self.command]}"
                )
        if self.command == "photonic" and self.panel == "a" and "delta_omega0" in names:
            raise ValueError("panel a sweeps delta_delta_omega, not delta_omega0")
        if self.command == "photonic" and self.panel == "b" and "delta_delta_omega" in names:
            raise ValueError("panel b sweeps delta_omega0, not delta_delta_omega")
        if self.t1 is not None and self.t2 is not None and self.t2 < self.t1:
            raise ValueError(f"t2={self.t2} is before t1={self.t1}")
        return self

    @property
    def inverse_temperature(self) -> InverseTemperature:
        return InverseTemperature.zero_temperature() if self.beta is None else InverseTemperature(self.beta)

    @property
    def delta_n(self) -> float:
        return self.mixture.delta_n if self.mixture is not None else 1.0

    def resolved_quantities(self) -> tuple:
        return tuple(self.quantities) or DEFAULT_QUANTITIES[self.command]

    def resolved_grid(self) -> List[GridAxis]:
        """Default axes for the command, each replaced by a user axis of the same name; extra user axes appended."""
        key = f"photonic_{self.panel}" if self.command == "photonic" else self.command
        defaults = [GridAxis.parse(text) for text in DEFAULT_GRIDS[key]]
        overrides = {axis.name: axis for axis in self.grid}
        axes = [overrides.pop(axis.name, axis) for axis in defaults]
        return axes + [axis for axis in self.grid if axis.name in overrides]

    def points(self) -> List[dict]:
        """Cartesian product of the axes, first axis slowest."""
        axes = self.resolved_grid()
        return [dict(zip([a.name for a in axes], map(float, combo))) for combo in product(*[a.values() for a in axes])]

    def metadata(self) -> Dict[str, str]:
        meta = {
            "tool": f"{settings.APP_TITLE} {settings.APP_VERSION}",
            "command": self.command,
            "grid": " ".join(str(a) for a in self.resolved_grid()),
            "quantities": ",".join(self.resolved_quantities()),
            "omega_s": f"{self.omega_s!r}",
        }
        if self.command == "photonic":
            meta.update({"panel": self.panel, "delta_n": f"{self.delta_n!r}", "base_width": f"{settings.PHOTONIC_BASE_WIDTH!r}"})
        else:
            meta.update(
                {
                    "lambda": f"{self.ohmic.lam!r}",
                    "s": f"{self.ohmic.s!r}",
                    "omega": f"{self.ohmic.omega!r}",
                    "beta": str(self.inverse_temperature),
                }
            )
        if self.t1 is not None:
            meta["t1"] = f"{self.t1!r}"
        if self.t2 is not None:
            meta["t2"] = f"{self.t2!r}"
        return meta


class SweepRunner:
    """
    Evaluate sweep rows on a thread pool.
    Rows come back in input order, so the result does not depend on the thread count.
    """

    def __init__(self, threads: int = settings.DEFAULT_THREADS, strict: bool = True):
        self.threads = max(1, threads)
        self.strict = strict

    def _safe(self, evaluate: Callable[[dict], dict]) -> Callable[[dict], dict]:
        def run(point: dict) -> dict:
            try:
                return {**point, **evaluate(point)}
            except DephasingError as e:
                if self.strict:
                    raise
                logger.warning("⚠ row %s failed: %s", point, e)
                return {**point, "error": str(e)}

        return run

    def run(self, points: List[dict], evaluate: Callable[[dict], dict]) -> pd.DataFrame:
        if self.threads == 1:
            rows = [self._safe(evaluate)(p) for p in points]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                rows = list(executor.map(self._safe(evaluate), points))
        logger.info("✓ evaluated %d sweep rows on %d thread(s)", len(rows), self.threads)
        return pd.DataFrame(rows)


def _ohmic_for(spec: SweepSpec, point: dict) -> OhmicFamilySpectralDensity:
    changes = {key: point[key] for key in ("lambda", "s", "omega") if key in point}
    return spec.ohmic.with_updates(**{("lam" if k == "lambda" else k): v for k, v in changes.items()})


def _beta_for(spec: SweepSpec, point: dict) -> InverseTemperature:
    if "beta" in point:
        return InverseTemperature(point["beta"])
    return spec.inverse_temperature


def evaluate_measures_row(spec: SweepSpec, point: dict) -> dict:
    model = BackendFactory.for_spectral_density(_ohmic_for(spec, point), _beta_for(spec, point), spec.omega_s)
    result = measures.compute_measures(model, spec.horizon)
    row = {q: getattr(result, q) for q in spec.resolved_quantities()}
    row["lower_bound"] = result.lower_bound
    return row


@lru_cache(maxsize=64)
def _cached_bath(
    sd: OhmicFamilySpectralDensity, beta: InverseTemperature, modes: int, omega_max: Optional[float]
) -> oracle.BathModeSet:
    return oracle.discretize_bath(sd, beta, modes, omega_max)


def evaluate_qrt_row(spec: SweepSpec, point: dict) -> dict:
    sd = _ohmic_for(spec, point)
    # sweep times are in units of 1/Ω
    t1 = point.get("t1", spec.t1 if spec.t1 is not None else 1.0) / sd.omega
    t2 = point.get("t2", spec.t2 if spec.t2 is not None else 2.0) / sd.omega
    model = BackendFactory.create_backend("closed", sd=sd, omega_s=spec.omega_s)
    row = {"z": qrt.z_estimator(model, t1, t2)}
    if spec.oracle_check:
        row["z_oracle"] = oracle.oracle_z(_cached_bath(sd, InverseTemperature.zero_temperature(), spec.modes, spec.omega_max), t1, t2)
    return row


@lru_cache(maxsize=256)
def _panel_blp(panel: str, split: float, delta_n: float) -> float:
    model = BackendFactory.create_backend("photonic", model=photonic.panel_model(panel, split, delta_n))
    return measures.compute_measures(model).blp


def evaluate_photonic_row(spec: SweepSpec, point: dict) -> dict:
    split = point[PANEL_SPLIT_AXIS[spec.panel]]
    model = photonic.panel_model(spec.panel, split, spec.delta_n)
    t1 = point.get("t1", spec.t1 if spec.t1 is not None else 1.0 / settings.PHOTONIC_BASE_WIDTH)
    t2 = t1 + point["tau"]
    row = {}
    quantities = spec.resolved_quantities()
    if "z" in quantities:
        row["z"], row["flagged"] = photonic.guarded_z(model, t1, t2)
    if "blp" in quantities:
        row["blp"] = _panel_blp(spec.panel, split, spec.delta_n)
    if "entropy" in quantities:
        row["entropy"] = photonic.total_state_entanglement(model, math.sqrt(0.5), math.sqrt(0.5), t2)
    return row


def evaluate_oracle_row(spec: SweepSpec, point: dict) -> dict:
    """Closed form next to the oracle at time t; Z at (t1, t1 + t). Times in units of 1/Ω."""
    sd = spec.ohmic
    t = point["t"] / sd.omega
    closed = BackendFactory.for_spectral_density(sd, spec.inverse_temperature, spec.omega_s)
    bath = _cached_bath(sd, spec.inverse_temperature, spec.modes, spec.omega_max)
    quantities = spec.resolved_quantities()
    row = {}
    if "gamma" in quantities:
        row["gamma"] = abs(closed.gamma(t))
        row["gamma_oracle"] = oracle.oracle_gamma(bath, t)
    if "rate" in quantities:
        row["rate"] = closed.dephasing_rate(t)
        row["rate_oracle"] = oracle.oracle_rate(bath, t)
    if "z" in quantities:
        t1 = (spec.t1 if spec.t1 is not None else 1.0) / sd.omega
        row["z"] = qrt.z_estimator(closed, t1, t1 + t)
        row["z_oracle"] = oracle.oracle_z(bath, t1, t1 + t)
    return row


EVALUATORS = {
    "measures": evaluate_measures_row,
    "qrt": evaluate_qrt_row,
    "photonic": evaluate_photonic_row,
    "oracle": evaluate_oracle_row,
}


def run_sweep(spec: SweepSpec, strict: bool = True) -> pd.DataFrame:
    """
    Evaluate every grid point of the sweep.

    Args:
        spec: Validated sweep specification
        strict: Re-raise row failures instead of recording them in an `error` column

    Returns:
        DataFrame with one row per grid point, axes first, in grid order
    """
    evaluate = EVALUATORS[spec.command]
    points = spec.points()
    logger.info("running %s sweep over %d points", spec.command, len(points))
    return SweepRunner(spec.threads, strict).run(points, lambda p: evaluate(spec, p))


def format_sweep_summary(spec: SweepSpec, frame: pd.DataFrame) -> str:
    """
    Short text summary of a finished sweep.

    Args:
        spec: The sweep that produced the frame
        frame: Result of run_sweep

    Returns:
        Multi-line summary with row count, value ranges and flagged/failed rows
    """
    lines = [f"✓ {spec.command}: {len(frame)} rows"]
    for quantity in frame.columns:
        if quantity in ("blp", "rhp", "z", "z_oracle", "entropy", "gamma", "gamma_oracle", "rate", "rate_oracle"):
            column = frame[quantity]
            lines.append(f"  {quantity}: min {column.min():.6g}, max {column.max():.6g}")
    if "z_oracle" in frame.columns and "z" in frame.columns:
        lines.append(f"  max |z - z_oracle|: {(frame['z'] - frame['z_oracle']).abs().max():.3e}")
    if "flagged" in frame.columns and frame["flagged"].any():
        lines.append(f"  ⚠ {int(frame['flagged'].sum())} rows flagged near zeros of γ")
    if "lower_bound" in frame.columns and frame["lower_bound"].any():
        lines.append(f"  ⚠ {int(frame['lower_bound'].sum())} rows are horizon-truncated lower bounds")
    if "error" in frame.columns:
        lines.append(f"  ⚠ {int(frame['error'].notna().sum())} rows failed")
    return "\n".join(lines)

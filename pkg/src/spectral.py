"""
Spectral densities and photonic frequency distributions.
Validated parameter types with pointwise evaluation.
"""
import math
from typing import List

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.exceptions import UnphysicalParameterError

WEIGHT_SUM_TOLERANCE = 1e-12


class OhmicFamilySpectralDensity(BaseModel):
    """
    J(ω) = λ ω^s Ω^{1-s} e^{-ω/Ω}.

    s = 1 is ohmic, s > 1 super-ohmic. λ = 0 is the decoupled limit.
    Config files spell the fields `lambda`, `s`, `omega`.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lam: float = Field(alias="lambda", ge=0.0)
    s: float = Field(gt=0.0)
    omega: float = Field(default=1.0, gt=0.0)

    def with_updates(self, **changes) -> "OhmicFamilySpectralDensity":
        """Validated copy with some fields replaced."""
        return OhmicFamilySpectralDensity(**{**self.model_dump(), **changes})


class LorentzianComponent(BaseModel):
    """One Lorentzian peak A δω / (π[(ω-ω0)² + δω²])."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    weight: float = Field(alias="A", gt=0.0, le=1.0)
    omega0: float = 0.0
    delta_omega: float = Field(gt=0.0)


class LorentzianMixture(BaseModel):
    """Normalized mixture of Lorentzian peaks plus the refractive-index difference Δn."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    components: List[LorentzianComponent] = Field(min_length=1)
    delta_n: float = 1.0

    @model_validator(mode="after")
    def _weights_sum_to_one(self) -> "LorentzianMixture":
        total = math.fsum(c.weight for c in self.components)
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"component weights sum to {total!r}, expected 1")
        return self

    @property
    def ratio(self) -> float:
        """r = A₂/A₁ for two-component mixtures."""
        if len(self.components) != 2:
            raise ValueError("ratio r is defined for two-component mixtures only")
        return self.components[1].weight / self.components[0].weight

    @classmethod
    def single(cls, delta_omega: float, omega0: float = 0.0, delta_n: float = 1.0) -> "LorentzianMixture":
        return cls(components=[LorentzianComponent(A=1.0, omega0=omega0, delta_omega=delta_omega)], delta_n=delta_n)

    @classmethod
    def two_peak(
        cls,
        ratio: float,
        omega01: float,
        omega02: float,
        delta_omega1: float,
        delta_omega2: float,
        delta_n: float = 1.0,
    ) -> "LorentzianMixture":
        """Two components with weights 1/(1+r) and r/(1+r)."""
        a1 = 1.0 / (1.0 + ratio)
        a2 = 1.0 - a1
        return cls(
            components=[
                LorentzianComponent(A=a1, omega0=omega01, delta_omega=delta_omega1),
                LorentzianComponent(A=a2, omega0=omega02, delta_omega=delta_omega2),
            ],
            delta_n=delta_n,
        )


def evaluate_spectral_density(sd: OhmicFamilySpectralDensity, omega: ArrayLike):
    """
    Evaluate J(ω).

    Args:
        sd: Spectral density parameters
        omega: Frequency or array of frequencies, all ≥ 0

    Returns:
        J(ω) with the same shape as omega

    Raises:
        UnphysicalParameterError: If any frequency is negative
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise UnphysicalParameterError("spectral density is defined for ω ≥ 0 only")
    value = sd.lam * np.power(w, sd.s) * sd.omega ** (1.0 - sd.s) * np.exp(-w / sd.omega)
    return float(value) if value.ndim == 0 else value


def evaluate_frequency_distribution(mix: LorentzianMixture, omega: ArrayLike):
    """|f(ω)|² = Σ_j A_j δω_j / (π[(ω - ω0_j)² + δω_j²])."""
    w = np.asarray(omega, dtype=float)
    total = np.zeros_like(w)
    for c in mix.components:
        total = total + c.weight * c.delta_omega / (np.pi * ((w - c.omega0) ** 2 + c.delta_omega**2))
    return float(total) if total.ndim == 0 else total

"""
Two-level density-matrix algebra.
Construction and validation of qubit states, trace distance, dephasing evolution and entropy.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import entr

import config.settings as settings
from src.exceptions import InvalidStateError, UnphysicalParameterError


@dataclass(frozen=True)
class DensityMatrix2:
    """
    Hermitian, unit-trace, positive 2×2 matrix [[rho00, rho01], [conj(rho01), rho11]].

    Populations outside [0, 1] or coherences violating |rho01|² ≤ rho00·rho11 by
    less than POSITIVITY_TOLERANCE are clamped onto the boundary; larger
    violations raise InvalidStateError.
    """

    rho00: float
    rho11: float
    rho01: complex = 0j

    def __post_init__(self):
        tol = settings.POSITIVITY_TOLERANCE
        rho00, rho11, rho01 = float(self.rho00), float(self.rho11), complex(self.rho01)
        if not all(math.isfinite(x) for x in (rho00, rho11, rho01.real, rho01.imag)):
            raise InvalidStateError("density matrix entries must be finite")
        if abs(rho00 + rho11 - 1.0) > tol:
            raise InvalidStateError(f"trace is {rho00 + rho11!r}, expected 1")
        for name, p in (("rho00", rho00), ("rho11", rho11)):
            if p < -tol or p > 1.0 + tol:
                raise InvalidStateError(f"{name}={p!r} is not a probability")
        rho00 = min(max(rho00, 0.0), 1.0)
        rho11 = min(max(rho11, 0.0), 1.0)

        excess = abs(rho01) ** 2 - rho00 * rho11
        if excess > tol:
            raise InvalidStateError(
                f"not positive: |rho01|^2 - rho00*rho11 = {excess:.3e} exceeds tolerance {tol:.0e}"
            )
        if excess > 0.0:
            rho01 = cmath.rect(math.sqrt(rho00 * rho11), cmath.phase(rho01))

        object.__setattr__(self, "rho00", rho00)
        object.__setattr__(self, "rho11", rho11)
        object.__setattr__(self, "rho01", rho01)

    @property
    def rho10(self) -> complex:
        return self.rho01.conjugate()

    @classmethod
    def diagonal(cls, p0: float) -> "DensityMatrix2":
        """Incoherent mixture diag(p0, 1 - p0)."""
        return cls(p0, 1.0 - p0, 0j)

    @classmethod
    def from_amplitudes(cls, alpha: complex, beta: complex) -> "DensityMatrix2":
        """
        Pure state alpha|0> + beta|1>.

        Raises:
            InvalidStateError: If |alpha|² + |beta|² differs from 1 beyond tolerance
        """
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(norm - 1.0) > settings.POSITIVITY_TOLERANCE:
            raise InvalidStateError(f"amplitudes are not normalized: |alpha|^2+|beta|^2 = {norm!r}")
        return cls(abs(alpha) ** 2, abs(beta) ** 2, alpha * complex(beta).conjugate())

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "DensityMatrix2":
        """Pure state with Bloch vector (sinθcosφ, sinθsinφ, cosθ)."""
        return cls(
            0.5 * (1.0 + math.cos(theta)),
            0.5 * (1.0 - math.cos(theta)),
            0.5 * math.sin(theta) * cmath.exp(-1j * phi),
        )

    @classmethod
    def from_matrix(cls, matrix) -> "DensityMatrix2":
        """Build from a 2×2 array; the matrix must be Hermitian within tolerance."""
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > settings.POSITIVITY_TOLERANCE:
            raise InvalidStateError("matrix is not Hermitian")
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1])

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    def eigenvalues(self) -> tuple:
        """Ascending eigenvalues from the trace/determinant quadratic."""
        return _hermitian_eigenvalues(self.rho00, self.rho11, self.rho01)


def psi_plus() -> DensityMatrix2:
    """|ψ+><ψ+| with |ψ+> = (|0> + |1>)/√2."""
    return DensityMatrix2(0.5, 0.5, 0.5)


def psi_minus() -> DensityMatrix2:
    """|ψ-><ψ-| with |ψ-> = (|0> - |1>)/√2."""
    return DensityMatrix2(0.5, 0.5, -0.5)


class PauliBasisLabel(Enum):
    """Hilbert-Schmidt orthonormal operator basis {1/√2, σ-, σ+, σz/√2} on C²."""

    IDENTITY = "identity"
    SIGMA_MINUS = "sigma_minus"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_Z = "sigma_z"

    @property
    def matrix(self) -> np.ndarray:
        # σ- = |1><0| lowers |0> (the σz = +1 state), so <σ-> = rho01
        if self is PauliBasisLabel.IDENTITY:
            return np.eye(2, dtype=complex) / math.sqrt(2.0)
        if self is PauliBasisLabel.SIGMA_MINUS:
            return np.array([[0, 0], [1, 0]], dtype=complex)
        if self is PauliBasisLabel.SIGMA_PLUS:
            return np.array([[0, 1], [0, 0]], dtype=complex)
        return np.diag([1.0, -1.0]).astype(complex) / math.sqrt(2.0)

    @property
    def adjoint(self) -> "PauliBasisLabel":
        if self is PauliBasisLabel.SIGMA_MINUS:
            return PauliBasisLabel.SIGMA_PLUS
        if self is PauliBasisLabel.SIGMA_PLUS:
            return PauliBasisLabel.SIGMA_MINUS
        return self

    @property
    def is_conserved(self) -> bool:
        """Identity and σz commute with the dephasing Hamiltonian."""
        return self in (PauliBasisLabel.IDENTITY, PauliBasisLabel.SIGMA_Z)


def _hermitian_eigenvalues(a: float, d: float, b: complex) -> tuple:
    """Eigenvalues of [[a, b], [b*, d]] (a, d real)."""
    half_trace = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(b))
    return half_trace - radius, half_trace + radius


def trace_distance(a: DensityMatrix2, b: DensityMatrix2) -> float:
    """
    Trace distance ½ Σ|x_k| over the eigenvalues x_k of a - b.

    Args:
        a: First state
        b: Second state

    Returns:
        Distance in [0, 1]
    """
    low, high = _hermitian_eigenvalues(a.rho00 - b.rho00, a.rho11 - b.rho11, a.rho01 - b.rho01)
    return min(0.5 * (abs(low) + abs(high)), 1.0)


def dephase_evolve(rho0: DensityMatrix2, gamma: complex, omega_s: float, t: float) -> DensityMatrix2:
    """
    Apply the pure-dephasing map: populations fixed, rho01 -> rho01 · γ · e^{-iω_s t}.

    Args:
        rho0: Initial state
        gamma: Decoherence factor γ(t), |γ| ≤ 1
        omega_s: System frequency ω_s
        t: Time

    Raises:
        UnphysicalParameterError: If |γ| > 1 beyond tolerance
    """
    if abs(gamma) > 1.0 + settings.POSITIVITY_TOLERANCE:
        raise UnphysicalParameterError(f"|gamma| = {abs(gamma)!r} exceeds 1")
    coherence = rho0.rho01 * complex(gamma) * cmath.exp(-1j * omega_s * t)
    return DensityMatrix2(rho0.rho00, rho0.rho11, coherence)


def von_neumann_entropy(rho: DensityMatrix2) -> float:
    """Entropy -Σ p ln p in nats; 0 for pure states, ln 2 for the maximally mixed state."""
    low, high = rho.eigenvalues()
    probabilities = np.clip([low, high], 0.0, 1.0)
    return float(np.sum(entr(probabilities)))

"""
Configuration settings for the dephasing non-Markovianity toolkit.
Loads environment variables and provides centralized access to all numerical settings.
"""
import logging
import os
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables from .env file
load_dotenv()

# Application Settings
APP_TITLE: str = os.getenv("APP_TITLE", "Dephasing Non-Markovianity & Regression Toolkit")
APP_VERSION: str = "0.1.0"
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

# State validation
POSITIVITY_TOLERANCE: float = float(os.getenv("POSITIVITY_TOLERANCE", "1e-12"))

# Quadrature Configuration
QUAD_RELATIVE_TOLERANCE: float = float(os.getenv("QUAD_RELATIVE_TOLERANCE", "1e-8"))
QUAD_PANEL_ABS_TOLERANCE: float = float(os.getenv("QUAD_PANEL_ABS_TOLERANCE", "1e-10"))
QUAD_KNOT_COUNT: int = int(os.getenv("QUAD_KNOT_COUNT", "40"))
QUAD_MAX_KNOTS: int = int(os.getenv("QUAD_MAX_KNOTS", "400"))
QUAD_SUBDIVISION_LIMIT: int = int(os.getenv("QUAD_SUBDIVISION_LIMIT", "200"))
QUAD_GRID_SUBDIVISION_LIMIT: int = int(os.getenv("QUAD_GRID_SUBDIVISION_LIMIT", "20000"))

# Interval scan / root finding
SCAN_STEPS: int = int(os.getenv("SCAN_STEPS", "4000"))
DEFAULT_HORIZON: float = float(os.getenv("DEFAULT_HORIZON", "50"))
ROOT_TOLERANCE: float = float(os.getenv("ROOT_TOLERANCE", "1e-10"))
TAIL_NOISE_FRACTION: float = float(os.getenv("TAIL_NOISE_FRACTION", "1e-12"))

# ODE integration
ODE_RTOL: float = float(os.getenv("ODE_RTOL", "1e-10"))
ODE_ATOL: float = float(os.getenv("ODE_ATOL", "1e-12"))

# Finite differences and conditioning
FD_STEP: float = float(os.getenv("FD_STEP", "1e-5"))
CHOI_EPSILON: float = float(os.getenv("CHOI_EPSILON", "1e-5"))
ILL_CONDITIONED_THRESHOLD: float = float(os.getenv("ILL_CONDITIONED_THRESHOLD", "1e-14"))
GAMMA_ZERO_RADIUS: float = float(os.getenv("GAMMA_ZERO_RADIUS", "1e-8"))

# Oracle (discretized bath)
ORACLE_MODES: int = int(os.getenv("ORACLE_MODES", "4096"))
ORACLE_OMEGA_MAX_FACTOR: float = float(os.getenv("ORACLE_OMEGA_MAX_FACTOR", "40"))
ORACLE_TAIL_TOLERANCE: float = float(os.getenv("ORACLE_TAIL_TOLERANCE", "1e-12"))

# Photonic sweeps
PHOTONIC_BASE_WIDTH: float = float(os.getenv("PHOTONIC_BASE_WIDTH", "1.0"))

# Sweep execution and output
DEFAULT_THREADS: int = int(os.getenv("DEFAULT_THREADS", str(os.cpu_count() or 1)))
CSV_SIGNIFICANT_DIGITS: int = int(os.getenv("CSV_SIGNIFICANT_DIGITS", "17"))

# Check-suite thresholds
CHECK_THRESHOLDS = {
    "rate_forms_identity": 1e-12,
    "rate_log_derivative": 1e-5,
    "quadrature_gamma": 1e-6,
    "quadrature_rate": 1e-6,
    "dephasing_zeros": 1e-10,
    "closed_form_measures": 1e-8,
    "measure_zeros": 0.0,
    "oracle_gamma": 1e-6,
    "oracle_phi": 1e-6,
    "oracle_z": 1e-6,
    "oracle_finite_temperature": 1e-6,
    "time_translation": 1e-12,
    "master_equation_ohmic": 1e-8,
    "master_equation_photonic": 1e-8,
    "qrt_generator": 1e-5,
    "choi_vs_rhp_rate": 1e-3,
    "semigroup_qrt": 1e-12,
    "markovian_qrt_violation": 0.1,
}


def validate_config() -> bool:
    """Validate that all numerical settings are in a usable range."""
    ok = True
    positive = {
        "POSITIVITY_TOLERANCE": POSITIVITY_TOLERANCE,
        "QUAD_RELATIVE_TOLERANCE": QUAD_RELATIVE_TOLERANCE,
        "QUAD_PANEL_ABS_TOLERANCE": QUAD_PANEL_ABS_TOLERANCE,
        "DEFAULT_HORIZON": DEFAULT_HORIZON,
        "ROOT_TOLERANCE": ROOT_TOLERANCE,
        "ODE_RTOL": ODE_RTOL,
        "ODE_ATOL": ODE_ATOL,
        "FD_STEP": FD_STEP,
        "CHOI_EPSILON": CHOI_EPSILON,
        "ORACLE_OMEGA_MAX_FACTOR": ORACLE_OMEGA_MAX_FACTOR,
        "PHOTONIC_BASE_WIDTH": PHOTONIC_BASE_WIDTH,
    }
    for name, value in positive.items():
        if not value > 0:
            logger.warning("⚠ %s must be positive, got %r", name, value)
            ok = False
    if SCAN_STEPS < 2:
        logger.warning("⚠ SCAN_STEPS must be at least 2, got %d", SCAN_STEPS)
        ok = False
    if ORACLE_MODES < 2:
        logger.warning("⚠ ORACLE_MODES must be at least 2, got %d", ORACLE_MODES)
        ok = False
    if QUAD_KNOT_COUNT < 1 or QUAD_MAX_KNOTS < QUAD_KNOT_COUNT:
        logger.warning("⚠ QUAD_KNOT_COUNT/QUAD_MAX_KNOTS out of range")
        ok = False
    if DEFAULT_THREADS < 1:
        logger.warning("⚠ DEFAULT_THREADS must be at least 1, got %d", DEFAULT_THREADS)
        ok = False
    return ok

"""Sparse elevated-mean submatrix selection in Gaussian noise.

Instance generation, scan (maximum-sum) selectors with exact/heuristic/
brute-force routes, closed-form critical thresholds with a regime classifier,
a two-armed detection test with Monte Carlo calibration, and a seeded,
thread-count-independent Monte Carlo engine for the selection-risk phase
transition around the critical signal level.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    DomainError,
    SubscanError,
    ValidationError,
)
from .model import (
    Dims,
    Observation,
    SignalSpec,
    Support,
    canonical_support,
    generate,
    generate_null,
    make_support,
)
from .matrixio import load_matrix, save_matrix
from .thresholds import (
    RegimeLabel,
    Thresholds,
    classify,
    compute,
    critical_value,
    vector_critical_value,
    vector_critical_value_power_law,
)
from .selector import (
    SelectorResult,
    log_lr,
    scan_brute_force,
    scan_exact,
    scan_heuristic,
    vector_select,
)
from .detection import (
    DetectionCalibration,
    DetectionResult,
    calibrate,
    detect,
    linear_statistic,
    scan_statistic,
)
from .montecarlo import (
    RiskEstimate,
    SweepResult,
    estimate_risk,
    max_gauss_exceedance,
    sweep,
    vector_risk,
    wilson_interval,
)

__all__ = [
    "__version__",
    "SubscanError",
    "ValidationError",
    "DimensionMismatchError",
    "BudgetExceededError",
    "DomainError",
    "Dims",
    "Support",
    "SignalSpec",
    "Observation",
    "make_support",
    "canonical_support",
    "generate",
    "generate_null",
    "save_matrix",
    "load_matrix",
    "Thresholds",
    "RegimeLabel",
    "compute",
    "critical_value",
    "classify",
    "vector_critical_value",
    "vector_critical_value_power_law",
    "SelectorResult",
    "scan_exact",
    "scan_brute_force",
    "scan_heuristic",
    "vector_select",
    "log_lr",
    "DetectionCalibration",
    "DetectionResult",
    "linear_statistic",
    "scan_statistic",
    "calibrate",
    "detect",
    "RiskEstimate",
    "SweepResult",
    "estimate_risk",
    "sweep",
    "vector_risk",
    "max_gauss_exceedance",
    "wilson_interval",
]

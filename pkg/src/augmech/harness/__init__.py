from .checks import (
    FeasibilityReport,
    TruthReport,
    check_bid_independent,
    check_feasible,
    check_truthful,
    deviation_grid,
    realization_revenues,
)
from .instances import Instance, load_instance, save_instance
from .lowerbound import LowerBound, lower_bound_formulas, mc_verify_benchmark_mean
from .ratio import GeneratorConfig, RatioReport, TrialResult, estimate_ratio, rows_to_csv, run_trials, summarize

__all__ = [
    "FeasibilityReport",
    "TruthReport",
    "check_bid_independent",
    "check_feasible",
    "check_truthful",
    "deviation_grid",
    "realization_revenues",
    "Instance",
    "load_instance",
    "save_instance",
    "LowerBound",
    "lower_bound_formulas",
    "mc_verify_benchmark_mean",
    "GeneratorConfig",
    "RatioReport",
    "TrialResult",
    "estimate_ratio",
    "rows_to_csv",
    "run_trials",
    "summarize",
]

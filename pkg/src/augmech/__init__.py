"""Learning-augmented truthful auctions with exact step-rule payments."""
from .env import (
    Environment,
    PredictionProfile,
    ValueProfile,
    count_wrong,
    count_wrong_excluding,
    digital_good,
    is_feasible,
    limited_supply,
    linear_max,
    symmetric_cap,
)
from .benchmarks import brute_efo, ef_revenue, efo, efom, envelope, f2, f2l, maxv, opt
from .mechanism import Mechanism, MechanismOutcome, StepRule, expected_revenue, mix, outcome
from .baseline import limited_supply_blackbox, posted_price, rscs, top_l_reduce, vickrey_l, vickrey_mix
from .augmented import (
    digital_good_augmented,
    downward_closed_augmented,
    limited_efo_augmented,
    mech_dga1,
    mech_dga2,
    mech_insensitive,
    mech_lsa1,
    mech_lsa2,
    mech_rank2_1,
    mech_rank2_4,
)
from .online import ArrivalOrder, osap
from .errortol import ConfidenceParam, approx, errmod, error_rate, randomized_bounds, theorem_errmod_check

__version__ = "0.1.0"

__all__ = [
    "Environment",
    "PredictionProfile",
    "ValueProfile",
    "count_wrong",
    "count_wrong_excluding",
    "digital_good",
    "is_feasible",
    "limited_supply",
    "linear_max",
    "symmetric_cap",
    "brute_efo",
    "ef_revenue",
    "efo",
    "efom",
    "envelope",
    "f2",
    "f2l",
    "maxv",
    "opt",
    "Mechanism",
    "MechanismOutcome",
    "StepRule",
    "expected_revenue",
    "mix",
    "outcome",
    "limited_supply_blackbox",
    "posted_price",
    "rscs",
    "top_l_reduce",
    "vickrey_l",
    "vickrey_mix",
    "digital_good_augmented",
    "downward_closed_augmented",
    "limited_efo_augmented",
    "mech_dga1",
    "mech_dga2",
    "mech_insensitive",
    "mech_lsa1",
    "mech_lsa2",
    "mech_rank2_1",
    "mech_rank2_4",
    "ArrivalOrder",
    "osap",
    "ConfidenceParam",
    "approx",
    "errmod",
    "error_rate",
    "randomized_bounds",
    "theorem_errmod_check",
]

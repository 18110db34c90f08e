"""Exact finite-n payoffs and argmax scans."""

from stoprule.exact.evaluators import (
    bw_binary,
    bw_cost,
    bw_cost_telescoped,
    bw_perquisite,
    bw_perquisite_telescoped,
    bw_unbalanced,
    classic_binary,
    classic_cost,
    classic_cutoff_floor,
    classic_perquisite,
    evaluate,
    gilbert_mosteller_cutoff,
    one_threshold_profile,
    one_threshold_profile_exact,
    pd_binary,
    pd_cost,
    pd_perquisite,
    pd_perquisite_cutoff,
    pd_perquisite_cutoff_exact,
    point_value,
)
from stoprule.exact.search import ArgmaxResult, argmax, argmax_one, argmax_two, bw_argmax

__all__ = [
    "ArgmaxResult",
    "argmax",
    "argmax_one",
    "argmax_two",
    "bw_argmax",
    "bw_binary",
    "bw_cost",
    "bw_cost_telescoped",
    "bw_perquisite",
    "bw_perquisite_telescoped",
    "bw_unbalanced",
    "classic_binary",
    "classic_cost",
    "classic_cutoff_floor",
    "classic_perquisite",
    "evaluate",
    "gilbert_mosteller_cutoff",
    "one_threshold_profile",
    "one_threshold_profile_exact",
    "pd_binary",
    "pd_cost",
    "pd_perquisite",
    "pd_perquisite_cutoff",
    "pd_perquisite_cutoff_exact",
    "point_value",
]

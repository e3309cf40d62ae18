"""Flag analysis, structure classification and LCS-building strategies for
binary strings, with exact LCS oracles and code experiments."""

from .bitstring import BitString, OnesInterval, dyadic, drop, rev, substring_ones, zeros_in
from .flags import FlagColor, ParamSet, b_profile, b_values, count_flags, flag_color, flag_rate
from .matching import (Matching, blue_yellow_balanced, blue_yellow_match, green_best_shift,
                       green_match, identity_match, imbalanced_match, naive_match, stitch,
                       strategy_lcs_bound, validate)
from .oracle import lcs_exact, lcs_fast, lcs_naive
from .regularity import balance_scan, entropy, flag_distribution_interval, l1, pinsker_gap
from .statistics import find_collision, pipeline_lcs, statistics_table, tables_equal
from .structure import StringType, classify

__all__ = [
    "BitString", "OnesInterval", "dyadic", "drop", "rev", "substring_ones", "zeros_in",
    "FlagColor", "ParamSet", "b_profile", "b_values", "count_flags", "flag_color", "flag_rate",
    "Matching", "blue_yellow_balanced", "blue_yellow_match", "green_best_shift", "green_match",
    "identity_match", "imbalanced_match", "naive_match", "stitch", "strategy_lcs_bound",
    "validate", "lcs_exact", "lcs_fast", "lcs_naive", "balance_scan", "entropy",
    "flag_distribution_interval", "l1", "pinsker_gap", "find_collision", "pipeline_lcs",
    "statistics_table", "tables_equal", "StringType", "classify",
]

"""Mechanism laboratory for one-sided matching without money."""

from ._core import (
    Profile,
    __version__,
    approximation_ratio,
    break_ties,
    cubic_lottery,
    generate,
    hybrid_mechanism,
    is_quasicombinatorial,
    n3_sweep,
    optimal_matching,
    preference_order,
    random_profile,
    rp_exact,
    rp_montecarlo,
    serial_dictatorship,
    social_welfare,
    uniform_mechanism,
    unitsum_to_unitrange_embed,
    validate,
    zeroone_to_unitrange,
)

__all__ = [
    "Profile",
    "__version__",
    "approximation_ratio",
    "break_ties",
    "cubic_lottery",
    "generate",
    "hybrid_mechanism",
    "is_quasicombinatorial",
    "n3_sweep",
    "optimal_matching",
    "preference_order",
    "random_profile",
    "rp_exact",
    "rp_montecarlo",
    "serial_dictatorship",
    "social_welfare",
    "uniform_mechanism",
    "unitsum_to_unitrange_embed",
    "validate",
    "zeroone_to_unitrange",
]

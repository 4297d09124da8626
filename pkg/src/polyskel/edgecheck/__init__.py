"""Edge decisions: exact LP test, numeric cost search and the full pipeline."""
from .lp import (EdgeVerdict, NonEdgeCertificate, Status, exact_edge_test, is_edge,
                 separates)
from .numeric import (DEFAULT_EPS, DEFAULT_MAX_ITER, DEFAULT_TOL, NumericResult, cost_update,
                      numeric_search, verify_edge_numeric)
from .pipeline import (METHODS, PairResult, SkeletonConfig, SkeletonTiming, compute_skeleton,
                       exact_skeleton, lift_certificate, pair_seed, resolve_pair, verify_pair)

__all__ = [
    "EdgeVerdict", "NonEdgeCertificate", "Status", "exact_edge_test", "is_edge", "separates",
    "DEFAULT_EPS", "DEFAULT_MAX_ITER", "DEFAULT_TOL", "NumericResult", "cost_update",
    "numeric_search", "verify_edge_numeric", "METHODS", "PairResult", "SkeletonConfig",
    "SkeletonTiming", "compute_skeleton", "exact_skeleton", "lift_certificate", "pair_seed",
    "resolve_pair", "verify_pair",
]

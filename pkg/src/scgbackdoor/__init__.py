"""Identifiability by common backdoor in summary causal graphs of time series."""

from .accessibility import (COMBINED, AccessibilityProfile, compute_accessibility,
                            compute_accessibility_combined, fork_exists_free, is_nc_accessible)
from .agreement import CheckResult, oracle_check
from .cone import (CausalQuery, NCProfile, compute_t_nc, in_cd, in_nc,
                   intervention_release_times, validate_query)
from .decider import (AdjustmentSet, IBCVerdict, Witness, decide, directed_no_fork_test,
                      emit_formula, fork_test_consistent, fork_test_free, preprocess)
from .errors import (BudgetExceeded, DuplicateEdge, InvalidGraph, NotAncestor, NotIdentifiable,
                     OutOfWindow, OverlapError, ParseError, SCGError, UnknownVertex)
from .graph import FTCG, SCG, TV, PathF, TemporalVertex, parse_scg, serialize_scg
from .monovariate import cross_check_monovariate, monovariate_decide
from .oracle import EnumSpec, backdoor_criterion, d_separated, enumerate_candidates, witness_search

__version__ = "0.1.0"

__all__ = [
    "COMBINED", "AccessibilityProfile", "compute_accessibility", "compute_accessibility_combined",
    "fork_exists_free", "is_nc_accessible",
    "CheckResult", "oracle_check",
    "CausalQuery", "NCProfile", "compute_t_nc", "in_cd", "in_nc", "intervention_release_times",
    "validate_query",
    "AdjustmentSet", "IBCVerdict", "Witness", "decide", "directed_no_fork_test", "emit_formula",
    "fork_test_consistent", "fork_test_free", "preprocess",
    "BudgetExceeded", "DuplicateEdge", "InvalidGraph", "NotAncestor", "NotIdentifiable",
    "OutOfWindow", "OverlapError", "ParseError", "SCGError", "UnknownVertex",
    "FTCG", "SCG", "TV", "PathF", "TemporalVertex", "parse_scg", "serialize_scg",
    "cross_check_monovariate", "monovariate_decide",
    "EnumSpec", "backdoor_criterion", "d_separated", "enumerate_candidates", "witness_search",
]

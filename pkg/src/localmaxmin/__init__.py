"""Exact local approximation of bipartite max-min LPs and matching lower-bound instances."""

from .algorithm import (AlgoParams, RegionSizes, Subproblem, approx_ratio, approx_ratio_closed,
                        averaging_factor, build_subproblem, n_of, objectives_within, ratio_limit,
                        region_sizes, regularize_view, run_local, safe_baseline)
from .errors import (ConstructionError, DomainError, InfeasibleError, MaxMinError, ParseError,
                     ResourceBudgetError, RoleError, UnboundedError, UnsupportedInstanceError,
                     ValidationError)
from .io import decode_instance, encode_instance, load_instance, save_instance
from .lowerbound import (BipartiteGraph, LowerBoundParams, SLayout, appendix_solution, build_S, build_Sk,
                         girth, growth_bound, high_girth_biregular, lift, relative_growth,
                         shortest_cycles, utility_upper_bound)
from .lp import LinearProgram, Relation, Row, SolveResult, Status, simplex, solve_max_min
from .model import (Assignment, Edge, IdMode, MaxMinInstance, Role, ValidationReport, Violation,
                    build_instance, check_feasible, min_utility, objective_utility, utilities,
                    validate_instance)
from .unfolding import LocalView, ViewNode, canonical_code, consistency_check, local_view

__version__ = "0.1.0"

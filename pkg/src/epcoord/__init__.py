"""Non-iterative coordinated optimal dispatch via exact polyhedral projection.

A hierarchical system of affine subsystems is coordinated in a single
bottom-up/top-down round: each subsystem projects its technical-plus-economic
feasible region onto its boundary variables, the parent optimizes against the
projections, and commands are disaggregated back down. The coordinated
optimum provably equals the flat joint optimum, and everything is computed in
exact rational arithmetic so the equality can be asserted bit-for-bit.
"""

from .coordinator import DispatchResult, run_coordinated, stage1_project
from .errors import EpcoordError
from .linprog import Constraint, LinearProgram, LpOutcome, check_feasible, solve_lp
from .model import SystemTree, load_tree, parse_and_validate, serialize_tree
from .oracle import benchmark, compare, enumerate_vertices, solve_joint, verify_projection
from .polytope import Polytope, bounding_box, canonicalize, contains, fme_eliminate, project, remove_redundant
from .projection import EpModel, build_ofr, compute_ep, cost_upper_bound
from .rational import Scalar, format_scalar, parse_scalar

__all__ = [
    "Constraint",
    "DispatchResult",
    "EpModel",
    "EpcoordError",
    "LinearProgram",
    "LpOutcome",
    "Polytope",
    "Scalar",
    "SystemTree",
    "benchmark",
    "bounding_box",
    "build_ofr",
    "canonicalize",
    "check_feasible",
    "compare",
    "compute_ep",
    "contains",
    "cost_upper_bound",
    "enumerate_vertices",
    "fme_eliminate",
    "format_scalar",
    "load_tree",
    "parse_and_validate",
    "parse_scalar",
    "project",
    "remove_redundant",
    "run_coordinated",
    "serialize_tree",
    "solve_joint",
    "solve_lp",
    "stage1_project",
    "verify_projection",
]

__version__ = "0.1.0"

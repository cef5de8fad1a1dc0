"""Equivalent projection of subsystems.

Each non-root node's operation feasible region (its constraints, its cost
epigraph, and its children's already-projected models) is projected onto the
node's coordination variables plus its cost variable. The projected polytope
is the node's complete external equivalent: it is all a child ever exports.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleSubsystem, UnboundedCost
from .linprog import (
    EQ,
    GE,
    LE,
    MAXIMIZE,
    OPTIMAL,
    UNBOUNDED,
    Constraint,
    LinearProgram,
    check_feasible,
)
from .linprog import solve_lp
from .model import cost_expression, epigraph_rows, node_rows, pi_var, qname
from .polytope import Polytope, project
from .rational import ZERO, format_scalar, parse_scalar


@dataclass
class OfrPolytope:
    owner: str
    polytope: Polytope
    keep: list  # qualified coordination vars followed by the cost variable
    bound: Fraction


@dataclass
class EpModel:
    owner: str
    polytope: Polytope  # canonical and irredundant, over exactly `keep`
    bound_used: Fraction


def _le_rows(constraints):
    """Constraints as <= polytope rows; equalities become opposite pairs."""
    rows = []
    for c in constraints:
        if c.relation in (LE, EQ):
            rows.append((dict(c.coeffs), c.rhs))
        if c.relation in (GE, EQ):
            rows.append(({v: -a for v, a in c.coeffs.items()}, -c.rhs))
    return rows


def _base_parts(tree, node, child_eps):
    """Constraint rows and variables of the node's region, epigraph excluded."""
    children = tree.children(node.id)
    if sorted(ep.owner for ep in child_eps) != sorted(children):
        raise ValueError(f"child EP models do not cover the children of {node.id!r}")
    constraints = node_rows(node)
    variables = [qname(node.id, v) for v in node.coordination_vars]
    variables += [qname(node.id, v) for v in node.internal_vars]
    by_owner = {ep.owner: ep for ep in child_eps}
    for child in children:
        ep = by_owner[child]
        variables.extend(v for v in ep.polytope.variables if v not in variables)
        constraints.extend(Constraint(dict(coeffs), LE, rhs) for coeffs, rhs in ep.polytope.rows)
    return constraints, variables


def _epigraph_objective(tree, node):
    terms, constant = cost_expression(node)
    terms = dict(terms)
    for child in tree.children(node.id):
        terms[pi_var(child)] = terms.get(pi_var(child), ZERO) + 1
    return terms, constant


def cost_upper_bound(tree, node, child_eps) -> Fraction:
    """The cap for the node's cost variable.

    An explicit cost_bound wins; otherwise the exact supremum of the epigraph
    left side over the node's region. The supremum is a valid (weak) cap: the
    epigraph lower bound still binds at any optimum, so coordination results
    are unaffected.
    """
    if node.cost_bound is not None:
        return node.cost_bound
    constraints, variables = _base_parts(tree, node, child_eps)
    terms, constant = _epigraph_objective(tree, node)
    outcome = solve_lp(LinearProgram(variables, terms, constant, sense=MAXIMIZE, rows=constraints))
    if outcome.status == UNBOUNDED:
        raise UnboundedCost(
            f"node {node.id!r}: cost has no finite supremum; set an explicit cost_bound"
        )
    if outcome.status != OPTIMAL:
        raise InfeasibleSubsystem(node.id)
    return outcome.value


def build_ofr(tree, node, child_eps) -> OfrPolytope:
    """The node's operation feasible region over (x_r, pi_r, y_r, children's EP vars)."""
    bound = cost_upper_bound(tree, node, child_eps)
    constraints, base_vars = _base_parts(tree, node, child_eps)
    constraints = constraints + epigraph_rows(tree, node, bound)
    keep = [qname(node.id, v) for v in node.coordination_vars] + [pi_var(node.id)]
    variables = keep + [v for v in base_vars if v not in keep]
    rows = _le_rows(constraints)
    if check_feasible(constraints, variables) is None:
        raise InfeasibleSubsystem(node.id)
    return OfrPolytope(node.id, Polytope(variables, rows), keep, bound)


def compute_ep(ofr: OfrPolytope) -> EpModel:
    """Project the region onto (coordination vars, cost variable)."""
    projected = project(ofr.polytope, ofr.keep)
    if projected.empty:
        raise InfeasibleSubsystem(ofr.owner)
    return EpModel(ofr.owner, projected, ofr.bound)


def ep_constraints(ep: EpModel):
    return [Constraint(dict(coeffs), LE, rhs) for coeffs, rhs in ep.polytope.rows]


def ep_to_document(ep: EpModel) -> dict:
    """The wire/file schema of an exported EP model."""
    return {
        "owner": ep.owner,
        "variables": list(ep.polytope.variables),
        "bound_used": format_scalar(ep.bound_used),
        "rows": [
            {
                "terms": {v: format_scalar(a) for v, a in sorted(coeffs.items())},
                "relation": LE,
                "rhs": format_scalar(rhs),
            }
            for coeffs, rhs in ep.polytope.rows
        ],
    }


def ep_from_document(document) -> EpModel:
    rows = [
        ({v: parse_scalar(a) for v, a in raw["terms"].items()}, parse_scalar(raw["rhs"]))
        for raw in document["rows"]
    ]
    polytope = Polytope(list(document["variables"]), rows)
    return EpModel(document["owner"], polytope, parse_scalar(document["bound_used"]))

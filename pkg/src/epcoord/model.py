"""Declarative hierarchical dispatch models.

A system is a tree of subsystems. Each node owns coordination variables
(shared with its parent), internal variables, an affine cost, and affine
constraints. A parent's constraints may additionally reference a direct
child's coordination variables ("child.var") or its cost variable
("child.pi"). Globally, variables are qualified as "<node>.<var>" and each
non-root node carries an implicit cost variable "<node>.pi".
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CycleDetected,
    DuplicateVariable,
    InvalidModel,
    MultipleRoots,
    NonAffineTerm,
    UnknownReference,
)
from .linprog import EQ, GE, LE, Constraint, LinearProgram
from .rational import ZERO, format_scalar, parse_scalar

RELATIONS = (LE, EQ, GE)


def qname(node_id, var):
    return f"{node_id}.{var}"


def pi_var(node_id):
    return f"{node_id}.pi"


@dataclass
class SubsystemNode:
    id: str
    parent: str  # None for the root
    coordination_vars: list
    internal_vars: list
    cost_terms: dict  # own variable name -> Fraction
    cost_constant: Fraction = ZERO
    constraints: list = field(default_factory=list)  # Constraint with local/dotted names
    cost_bound: Fraction = None

    @property
    def own_vars(self):
        return list(self.coordination_vars) + list(self.internal_vars)


@dataclass
class SystemTree:
    nodes: dict  # id -> SubsystemNode, in document order
    root: str
    name: str = ""

    def children(self, node_id):
        return [n.id for n in self.nodes.values() if n.parent == node_id]

    def edges(self):
        """(child, parent) pairs in document order."""
        return [(n.id, n.parent) for n in self.nodes.values() if n.parent is not None]

    def postorder(self):
        order = []

        def visit(nid):
            for c in self.children(nid):
                visit(c)
            order.append(nid)

        visit(self.root)
        return order

    def preorder(self):
        order = []

        def visit(nid):
            order.append(nid)
            for c in self.children(nid):
                visit(c)

        visit(self.root)
        return order

    def references_pi(self):
        return any(
            key.endswith(".pi")
            for node in self.nodes.values()
            for c in node.constraints
            for key in c.terms_keys()
        )


# Constraint from linprog stores coeffs; give model-level rows a thin alias
# so parsing can keep local (unqualified / dotted) names.
@dataclass
class NodeConstraint:
    terms: dict
    relation: str
    rhs: Fraction

    def terms_keys(self):
        return self.terms.keys()


def _parse_terms(raw, where):
    if not isinstance(raw, dict):
        raise NonAffineTerm(f"{where}: terms must be a flat variable->number map")
    terms = {}
    for key, value in raw.items():
        if not isinstance(key, str):
            raise NonAffineTerm(f"{where}: term key {key!r} is not a variable name")
        if isinstance(value, (dict, list)):
            raise NonAffineTerm(f"{where}: coefficient of {key!r} is not a number")
        terms[key] = parse_scalar(value)
    return terms


def _validate_reference(tree, node, key, where):
    if "." in key:
        child_id, attr = key.split(".", 1)
        child = tree.nodes.get(child_id)
        if child is None or child.parent != node.id:
            raise UnknownReference(f"{where}: {key!r} does not name a direct child's variable")
        if attr != "pi" and attr not in child.coordination_vars:
            raise UnknownReference(
                f"{where}: {key!r} must reference the child's coordination variables or its pi"
            )
    elif key not in node.own_vars:
        raise UnknownReference(f"{where}: unknown variable {key!r}")


def parse_and_validate(document) -> SystemTree:
    """Parse a model document (already JSON-decoded) and check all invariants."""
    if not isinstance(document, dict) or not isinstance(document.get("nodes"), list):
        raise InvalidModel("document must be an object with a 'nodes' list")
    nodes = {}
    roots = []
    for raw in document["nodes"]:
        nid = raw.get("id")
        if not isinstance(nid, str) or not nid:
            raise InvalidModel("every node needs a non-empty string id")
        if "." in nid:
            raise InvalidModel(f"node id {nid!r} may not contain '.'")
        if nid in nodes:
            raise DuplicateVariable(f"duplicate node id {nid!r}")
        coord = list(raw.get("coordination_vars", []))
        internal = list(raw.get("internal_vars", []))
        seen = set()
        for v in coord + internal:
            if not isinstance(v, str) or not v or "." in v or v == "pi":
                raise InvalidModel(f"node {nid!r}: invalid variable name {v!r}")
            if v in seen:
                raise DuplicateVariable(f"node {nid!r}: duplicate variable {v!r}")
            seen.add(v)
        cost = raw.get("cost", {}) or {}
        if not isinstance(cost, dict):
            raise NonAffineTerm(f"node {nid!r}: cost must be a {{terms, constant}} object")
        cost_terms = _parse_terms(cost.get("terms", {}), f"node {nid!r} cost")
        cost_constant = parse_scalar(cost.get("constant", 0))
        constraints = []
        for k, rc in enumerate(raw.get("constraints", [])):
            where = f"node {nid!r} constraint {k}"
            relation = rc.get("relation")
            if relation not in RELATIONS:
                raise InvalidModel(f"{where}: relation must be one of {RELATIONS}")
            constraints.append(
                NodeConstraint(_parse_terms(rc.get("terms", {}), where), relation, parse_scalar(rc.get("rhs", 0)))
            )
        bound = raw.get("cost_bound")
        node = SubsystemNode(
            id=nid,
            parent=raw.get("parent"),
            coordination_vars=coord,
            internal_vars=internal,
            cost_terms=cost_terms,
            cost_constant=cost_constant,
            constraints=constraints,
            cost_bound=None if bound is None else parse_scalar(bound),
        )
        nodes[nid] = node
        if node.parent is None:
            roots.append(nid)
    if len(roots) != 1:
        raise MultipleRoots(f"expected exactly one root node, found {len(roots)}")
    tree = SystemTree(nodes=nodes, root=roots[0], name=document.get("name", ""))
    # structural checks
    for node in nodes.values():
        if node.parent is not None and node.parent not in nodes:
            raise UnknownReference(f"node {node.id!r}: unknown parent {node.parent!r}")
    for node in nodes.values():
        seen = {node.id}
        cur = node.parent
        while cur is not None:
            if cur in seen:
                raise CycleDetected(f"parent links of node {node.id!r} form a cycle")
            seen.add(cur)
            cur = nodes[cur].parent
    root = nodes[tree.root]
    if root.coordination_vars:
        raise InvalidModel("the root has nothing above it and may not declare coordination_vars")
    if root.cost_bound is not None:
        raise InvalidModel("the root may not declare a cost_bound")
    # reference checks
    for node in nodes.values():
        for key in node.cost_terms:
            if "." in key or key not in node.own_vars:
                raise UnknownReference(f"node {node.id!r} cost references {key!r}; costs use own variables only")
        for k, c in enumerate(node.constraints):
            for key in c.terms:
                _validate_reference(tree, node, key, f"node {node.id!r} constraint {k}")
    return tree


def load_tree(path) -> SystemTree:
    with open(path) as fh:
        document = json.load(fh, parse_float=Fraction)
    return parse_and_validate(document)


def serialize_tree(tree: SystemTree) -> dict:
    """Inverse of parse_and_validate; round-trips to an identical tree."""
    doc = {"name": tree.name, "nodes": []}
    for node in tree.nodes.values():
        raw = {
            "id": node.id,
            "parent": node.parent,
            "coordination_vars": list(node.coordination_vars),
            "internal_vars": list(node.internal_vars),
            "cost": {
                "terms": {k: format_scalar(v) for k, v in node.cost_terms.items()},
                "constant": format_scalar(node.cost_constant),
            },
            "constraints": [
                {
                    "terms": {k: format_scalar(v) for k, v in c.terms.items()},
                    "relation": c.relation,
                    "rhs": format_scalar(c.rhs),
                }
                for c in node.constraints
            ],
        }
        if node.cost_bound is not None:
            raw["cost_bound"] = format_scalar(node.cost_bound)
        doc["nodes"].append(raw)
    return doc


def _qualify_key(node, key):
    return key if "." in key else qname(node.id, key)


def node_rows(node: SubsystemNode):
    """The node's constraints over globally qualified variable names."""
    return [
        Constraint({_qualify_key(node, k): v for k, v in c.terms.items()}, c.relation, c.rhs)
        for c in node.constraints
    ]


def cost_expression(node: SubsystemNode):
    """(qualified terms, constant) of the node's own cost."""
    return {qname(node.id, k): v for k, v in node.cost_terms.items()}, node.cost_constant


def epigraph_rows(tree: SystemTree, node: SubsystemNode, bound):
    """Epigraph of the node's aggregate cost.

    For a node with children the bounded quantity telescopes: own cost plus
    the children's cost variables. Emits `cost - pi <= -constant` and, when a
    finite bound is given, `pi <= bound`.
    """
    terms, constant = cost_expression(node)
    terms = dict(terms)
    for child in tree.children(node.id):
        terms[pi_var(child)] = terms.get(pi_var(child), ZERO) + 1
    terms[pi_var(node.id)] = terms.get(pi_var(node.id), ZERO) - 1
    rows = [Constraint(terms, LE, -constant)]
    if bound is not None:
        rows.append(Constraint({pi_var(node.id): Fraction(1)}, LE, bound))
    return rows


def tree_variables(tree: SystemTree, with_pi=False):
    out = []
    for node in tree.nodes.values():
        out.extend(qname(node.id, v) for v in node.own_vars)
        if with_pi and node.parent is not None:
            out.append(pi_var(node.id))
    return out


def flat_rows(tree: SystemTree):
    rows = []
    for node in tree.nodes.values():
        rows.extend(node_rows(node))
    return rows


def assemble_epigraph_lp(tree: SystemTree, bounds=None) -> LinearProgram:
    """The flat LP in epigraph form: cost variables for every non-root node.

    `bounds` optionally maps node id -> cap for its cost variable; a node's
    own cost_bound is used when present, otherwise the cap row is omitted
    (it never binds at an optimum).
    """
    bounds = bounds or {}
    rows = flat_rows(tree)
    root = tree.nodes[tree.root]
    objective, constant = cost_expression(root)
    objective = dict(objective)
    for child in tree.children(tree.root):
        objective[pi_var(child)] = objective.get(pi_var(child), ZERO) + 1
    for node in tree.nodes.values():
        if node.parent is None:
            continue
        bound = bounds.get(node.id, node.cost_bound)
        rows.extend(epigraph_rows(tree, node, bound))
    return LinearProgram(tree_variables(tree, with_pi=True), objective, constant, rows=rows)


def assemble_jod(tree: SystemTree) -> LinearProgram:
    """The flat joint dispatch LP: minimize the sum of all node costs.

    If any constraint references a child's cost variable, the direct form
    cannot house it and the epigraph form is assembled instead (the two are
    equivalent in optimal value).
    """
    if tree.references_pi():
        return assemble_epigraph_lp(tree)
    objective = {}
    constant = ZERO
    for node in tree.nodes.values():
        terms, c = cost_expression(node)
        for k, v in terms.items():
            objective[k] = objective.get(k, ZERO) + v
        constant += c
    return LinearProgram(tree_variables(tree), objective, constant, rows=flat_rows(tree))


def constraint_satisfied(row: Constraint, assignment) -> bool:
    value = sum((a * assignment[v] for v, a in row.coeffs.items()), ZERO)
    if row.relation == LE:
        return value <= row.rhs
    if row.relation == GE:
        return value >= row.rhs
    return value == row.rhs


def evaluate_cost(node: SubsystemNode, assignment) -> Fraction:
    """The node's own cost at a globally qualified assignment."""
    terms, constant = cost_expression(node)
    return constant + sum((a * assignment[v] for v, a in terms.items()), ZERO)

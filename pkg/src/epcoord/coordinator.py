"""Single-round coordination over the subsystem tree.

Stage 1 walks the tree bottom-up, projecting each node onto its coordination
variables; stage 2 solves the root's problem against the children's projected
models; stage 3 walks top-down, each node disaggregating its received command
into internal decisions and commands for its own children. Exactly one
upward and one downward message crosses every edge; there is no iteration.
"""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalInconsistency, UpperInfeasible
from .linprog import EQ, LE, OPTIMAL, Constraint, LinearProgram, solve_lp
from .model import cost_expression, evaluate_cost, node_rows, pi_var, qname
from .projection import build_ofr, compute_ep, ep_constraints, ep_to_document
from .rational import ZERO

EP_UP = "EpUp"
COMMAND_DOWN = "CommandDown"


@dataclass
class Message:
    sender: str
    receiver: str
    kind: str
    payload_size: int
    payload: str = ""  # serialized content actually crossing the edge


@dataclass
class Stage1Result:
    eps: dict  # node id -> EpModel
    ofrs: dict  # node id -> OfrPolytope
    messages: list
    times: dict  # node id -> seconds


@dataclass
class NodeDispatch:
    node: str
    coordination: dict  # own (unqualified) coordination vars
    pi: Fraction  # None for the root
    internal: dict  # own (unqualified) internal vars
    own_cost: Fraction
    aggregate_cost: Fraction  # own cost plus children's commanded costs


@dataclass
class DispatchResult:
    nodes: dict  # node id -> NodeDispatch
    objective: Fraction
    messages: list = field(default_factory=list)
    stage_times: dict = field(default_factory=dict)
    scales: dict = field(default_factory=dict)  # problem sizes, vars * rows


def _command_payload(xhat, pihat):
    items = {v: str(a) for v, a in sorted(xhat.items())}
    items["pi"] = str(pihat)
    return json.dumps(items)


def stage1_project(tree) -> Stage1Result:
    """Bottom-up projection of every non-root node; one EpUp message per edge."""
    eps, ofrs, messages, times = {}, {}, [], {}
    for nid in tree.postorder():
        if nid == tree.root:
            continue
        node = tree.nodes[nid]
        started = time.perf_counter()
        ofr = build_ofr(tree, node, [eps[c] for c in tree.children(nid)])
        ep = compute_ep(ofr)
        times[nid] = time.perf_counter() - started
        eps[nid] = ep
        ofrs[nid] = ofr
        payload = json.dumps(ep_to_document(ep))
        messages.append(Message(nid, node.parent, EP_UP, len(ep.polytope.rows), payload))
    return Stage1Result(eps, ofrs, messages, times)


def _local_lp(tree, node, child_eps, command=None):
    """The node's local problem: own cost plus children's cost variables.

    With `command` = (xhat, pihat), the node's coordination variables are
    pinned and the aggregate cost is capped by the commanded value.
    """
    terms, constant = cost_expression(node)
    objective = dict(terms)
    variables = [qname(node.id, v) for v in node.own_vars]
    rows = node_rows(node)
    for ep in child_eps:
        objective[pi_var(ep.owner)] = objective.get(pi_var(ep.owner), ZERO) + 1
        variables.extend(v for v in ep.polytope.variables if v not in variables)
        rows.extend(ep_constraints(ep))
    if command is not None:
        xhat, pihat = command
        for v, value in xhat.items():
            rows.append(Constraint({v: Fraction(1)}, EQ, value))
        rows.append(Constraint(dict(objective), LE, pihat - constant))
    if not variables:
        variables = [qname(node.id, "_zero")]  # degenerate constraint-free root
    return LinearProgram(variables, objective, constant, rows=rows)


def _child_command(tree, child_id, assignment):
    child = tree.nodes[child_id]
    xhat = {qname(child_id, v): assignment[qname(child_id, v)] for v in child.coordination_vars}
    return xhat, assignment[pi_var(child_id)]


def stage2_solve_upper(tree, eps):
    """Solve the root problem against its children's EP models.

    Returns (outcome assignment, commands per root child, messages, lp size).
    """
    root = tree.nodes[tree.root]
    child_eps = [eps[c] for c in tree.children(tree.root)]
    lp = _local_lp(tree, root, child_eps)
    outcome = solve_lp(lp)
    if outcome.status != OPTIMAL:
        raise UpperInfeasible(f"root problem is {outcome.status}")
    commands, messages = {}, []
    for child_id in tree.children(tree.root):
        xhat, pihat = _child_command(tree, child_id, outcome.assignment)
        commands[child_id] = (xhat, pihat)
        payload = _command_payload(xhat, pihat)
        messages.append(Message(tree.root, child_id, COMMAND_DOWN, len(xhat) + 1, payload))
    scale = len(lp.variables) * len(lp.rows)
    return outcome, commands, messages, scale


def stage3_disaggregate(tree, eps, commands):
    """Top-down local dispatch; mid-level nodes re-coordinate their children.

    Returns (per-node outcomes, messages, per-node seconds, per-node lp sizes).
    """
    outcomes, messages, times, scales = {}, {}, {}, {}
    pending = dict(commands)
    for nid in tree.preorder():
        if nid == tree.root:
            continue
        node = tree.nodes[nid]
        command = pending[nid]
        child_eps = [eps[c] for c in tree.children(nid)]
        started = time.perf_counter()
        lp = _local_lp(tree, node, child_eps, command=command)
        outcome = solve_lp(lp)
        times[nid] = time.perf_counter() - started
        scales[nid] = len(lp.variables) * len(lp.rows)
        if outcome.status != OPTIMAL:
            raise InternalInconsistency(
                f"local problem of node {nid!r} is {outcome.status}; its command should be feasible"
            )
        outcomes[nid] = (command, outcome)
        for child_id in tree.children(nid):
            xhat, pihat = _child_command(tree, child_id, outcome.assignment)
            pending[child_id] = (xhat, pihat)
            payload = _command_payload(xhat, pihat)
            messages[nid] = messages.get(nid, [])
            messages[nid].append(Message(nid, child_id, COMMAND_DOWN, len(xhat) + 1, payload))
    flat_messages = [m for nid in tree.preorder() for m in messages.get(nid, [])]
    return outcomes, flat_messages, times, scales


def run_coordinated(tree) -> DispatchResult:
    """All three stages; the result carries the full message log."""
    t0 = time.perf_counter()
    stage1 = stage1_project(tree)
    stage1_total = time.perf_counter() - t0

    t0 = time.perf_counter()
    root_outcome, commands, down_messages, upper_scale = stage2_solve_upper(tree, stage1.eps)
    stage2_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    outcomes, mid_messages, stage3_times, stage3_scales = stage3_disaggregate(tree, stage1.eps, commands)
    stage3_total = time.perf_counter() - t0

    nodes = {}
    root = tree.nodes[tree.root]
    root_assignment = root_outcome.assignment
    nodes[tree.root] = NodeDispatch(
        node=tree.root,
        coordination={},
        pi=None,
        internal={v: root_assignment[qname(tree.root, v)] for v in root.internal_vars},
        own_cost=evaluate_cost(root, root_assignment),
        aggregate_cost=root_outcome.value,
    )
    for nid, (command, outcome) in outcomes.items():
        node = tree.nodes[nid]
        xhat, pihat = command
        nodes[nid] = NodeDispatch(
            node=nid,
            coordination={v: xhat[qname(nid, v)] for v in node.coordination_vars},
            pi=pihat,
            internal={v: outcome.assignment[qname(nid, v)] for v in node.internal_vars},
            own_cost=evaluate_cost(node, outcome.assignment),
            aggregate_cost=outcome.value,
        )
    result = DispatchResult(
        nodes=nodes,
        objective=root_outcome.value,
        messages=stage1.messages + down_messages + mid_messages,
        stage_times={
            "stage1": dict(stage1.times),
            "stage1_total": stage1_total,
            "stage2": stage2_time,
            "stage3": dict(stage3_times),
            "stage3_total": stage3_total,
        },
        scales={
            "upper": upper_scale,
            "stage1": {
                nid: len(ofr.polytope.variables) * len(ofr.polytope.rows)
                for nid, ofr in stage1.ofrs.items()
            },
            "stage3": stage3_scales,
        },
    )
    return result


def flat_assignment(tree, result: DispatchResult):
    """The coordinated result as one qualified-variable assignment."""
    out = {}
    for nid, nd in result.nodes.items():
        for v, value in nd.coordination.items():
            out[qname(nid, v)] = value
        for v, value in nd.internal.items():
            out[qname(nid, v)] = value
        if nd.pi is not None:
            out[pi_var(nid)] = nd.pi
    return out

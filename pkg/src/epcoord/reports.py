"""JSON and CSV rendering of results.

Rationals are serialized as exact "p/q" strings alongside a float
approximation, so reports are both machine-exact and human-readable.
"""

import csv
import json
from fractions import Fraction


def value_json(value):
    if value is None:
        return None
    return {"exact": str(value), "approx": float(value)}


def assignment_json(assignment):
    return {v: value_json(assignment[v]) for v in sorted(assignment)}


def messages_json(messages):
    return [
        {"from": m.sender, "to": m.receiver, "kind": m.kind, "payload_size": m.payload_size}
        for m in messages
    ]


def dispatch_json(result, include_times=True):
    out = {
        "objective": value_json(result.objective),
        "nodes": {
            nid: {
                "coordination": assignment_json(nd.coordination),
                "pi": value_json(nd.pi),
                "internal": assignment_json(nd.internal),
                "own_cost": value_json(nd.own_cost),
                "aggregate_cost": value_json(nd.aggregate_cost),
            }
            for nid, nd in sorted(result.nodes.items())
        },
        "messages": messages_json(result.messages),
    }
    if include_times:
        out["stage_times"] = result.stage_times
    return out


def outcome_json(outcome):
    out = {"status": outcome.status, "value": value_json(outcome.value)}
    if outcome.assignment is not None:
        out["assignment"] = assignment_json(outcome.assignment)
    return out


def comparison_json(report):
    return {
        "jod_status": report.jod_status,
        "coordinated_status": report.coordinated_status,
        "jod_value": value_json(report.jod_value),
        "coordinated_value": value_json(report.coordinated_value),
        "values_equal": report.values_equal,
        "consistent": report.consistent,
        "jod_assignment_feasible_for_tree": report.jod_assignment_feasible_for_tree,
        "coordinated_assignment_feasible_for_flat_lp": report.coordinated_assignment_feasible_for_flat_lp,
        "node_cost_deltas": {nid: value_json(d) for nid, d in sorted(report.node_cost_deltas.items())},
    }


def verification_json(report):
    return {
        "passed": report.passed,
        "samples_checked": report.samples_checked,
        "vertices_checked": report.vertices_checked,
        "counterexamples": [
            {
                "point": {v: str(x) for v, x in sorted(ce["point"].items())},
                "in_projection": ce["in_projection"],
                "region_feasible": ce["region_feasible"],
            }
            for ce in report.counterexamples
        ],
    }


def timing_json(report):
    return {
        "repetitions": report.repetitions,
        "stage1_times": dict(sorted(report.stage1_times.items())),
        "stage2_time": report.stage2_time,
        "stage3_times": dict(sorted(report.stage3_times.items())),
        "t_coor": report.t_coor,
        "t_jod": report.t_jod,
        "composition": "max(stage1_times) + stage2_time + max(stage3_times)",
        "upper_scale": report.upper_scale,
        "lower_scales": dict(sorted(report.lower_scales.items())),
    }


def write_json(document, path=None):
    text = json.dumps(document, indent=2) + "\n"
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text)
    return text


def write_dispatch_csv(result, path):
    """Per-node delimited summary of a coordinated dispatch."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "kind", "name", "exact", "approx"])
        for nid, nd in sorted(result.nodes.items()):
            for v in sorted(nd.coordination):
                writer.writerow([nid, "coordination", v, str(nd.coordination[v]), float(nd.coordination[v])])
            for v in sorted(nd.internal):
                writer.writerow([nid, "internal", v, str(nd.internal[v]), float(nd.internal[v])])
            if nd.pi is not None:
                writer.writerow([nid, "cost_command", "pi", str(nd.pi), float(nd.pi)])
            writer.writerow([nid, "cost", "own_cost", str(nd.own_cost), float(nd.own_cost)])

import copy
import json
from fractions import Fraction as F

import pytest

from epcoord.errors import (
    CycleDetected,
    DuplicateVariable,
    InvalidModel,
    MultipleRoots,
    NonAffineTerm,
    NumberParseError,
    UnknownReference,
)
from epcoord.linprog import solve_lp
from epcoord.model import (
    assemble_epigraph_lp,
    assemble_jod,
    epigraph_rows,
    parse_and_validate,
    pi_var,
    serialize_tree,
)
from epcoord.rational import parse_scalar

from conftest import single_node_document


def test_illustrative_tree_shape(illustrative_tree):
    tree = illustrative_tree
    assert tree.root == "upper"
    assert tree.children("upper") == ["low1", "low2"]
    assert len(tree.edges()) == 2
    # depth 2: all non-root nodes are leaves
    assert all(not tree.children(c) for c in tree.children("upper"))


def test_decimal_parses_exactly(illustrative_tree):
    upper = illustrative_tree.nodes["upper"]
    assert upper.constraints[0].rhs == F(9, 2)
    low2 = illustrative_tree.nodes["low2"]
    assert low2.cost_terms["x2"] == F(3, 2)


def test_parse_scalar_forms():
    assert parse_scalar("1.5") == F(3, 2)
    assert parse_scalar("7/3") == F(7, 3)
    assert parse_scalar(4) == F(4)
    with pytest.raises(NumberParseError):
        parse_scalar("3/0")
    with pytest.raises(NumberParseError):
        parse_scalar(0.5)


def _two_node_document():
    return {
        "name": "t",
        "nodes": [
            {"id": "r", "parent": None, "coordination_vars": [], "internal_vars": [],
             "cost": {"terms": {}, "constant": 0},
             "constraints": [{"terms": {"c.x": 1}, "relation": "<=", "rhs": 1}]},
            {"id": "c", "parent": "r", "coordination_vars": ["x"], "internal_vars": ["y"],
             "cost": {"terms": {"x": 1}, "constant": 0},
             "constraints": [{"terms": {"x": 1, "y": 1}, "relation": "<=", "rhs": 2}]},
        ],
    }


def test_grandchild_reference_rejected():
    doc = _two_node_document()
    doc["nodes"].append({
        "id": "g", "parent": "c", "coordination_vars": ["z"], "internal_vars": [],
        "cost": {"terms": {}, "constant": 0}, "constraints": [],
    })
    doc["nodes"][0]["constraints"].append({"terms": {"g.z": 1}, "relation": "<=", "rhs": 0})
    with pytest.raises(UnknownReference):
        parse_and_validate(doc)


def test_child_internal_reference_rejected():
    doc = _two_node_document()
    doc["nodes"][0]["constraints"].append({"terms": {"c.y": 1}, "relation": "<=", "rhs": 0})
    with pytest.raises(UnknownReference):
        parse_and_validate(doc)


def test_cycle_detected():
    doc = _two_node_document()
    doc["nodes"].append({"id": "a", "parent": "b", "coordination_vars": ["u"], "internal_vars": [],
                         "cost": {"terms": {}, "constant": 0}, "constraints": []})
    doc["nodes"].append({"id": "b", "parent": "a", "coordination_vars": ["v"], "internal_vars": [],
                         "cost": {"terms": {}, "constant": 0}, "constraints": []})
    with pytest.raises(CycleDetected):
        parse_and_validate(doc)


def test_multiple_roots_rejected():
    doc = _two_node_document()
    doc["nodes"][1]["parent"] = None
    with pytest.raises(MultipleRoots):
        parse_and_validate(doc)


def test_duplicate_variable_rejected():
    doc = _two_node_document()
    doc["nodes"][1]["internal_vars"] = ["x"]
    with pytest.raises(DuplicateVariable):
        parse_and_validate(doc)


def test_non_affine_cost_rejected():
    doc = _two_node_document()
    doc["nodes"][1]["cost"] = {"terms": {"x": {"quadratic": 1}}, "constant": 0}
    with pytest.raises(NonAffineTerm):
        parse_and_validate(doc)


def test_root_with_coordination_vars_rejected():
    doc = _two_node_document()
    doc["nodes"][0]["coordination_vars"] = ["t"]
    with pytest.raises(InvalidModel):
        parse_and_validate(doc)


def test_serialize_round_trip(illustrative_tree):
    doc = serialize_tree(illustrative_tree)
    # through JSON text and back
    reparsed = parse_and_validate(json.loads(json.dumps(doc)))
    assert serialize_tree(reparsed) == doc
    assert reparsed.nodes["low2"].cost_terms == illustrative_tree.nodes["low2"].cost_terms


def test_epigraph_rows_leaf_one(illustrative_tree):
    node = illustrative_tree.nodes["low1"]
    rows = epigraph_rows(illustrative_tree, node, F(7))
    assert len(rows) == 2
    assert rows[0].coeffs == {"low1.x1": F(1), "low1.y1": F(1), "low1.pi": F(-1)}
    assert rows[0].rhs == 0
    assert rows[1].coeffs == {"low1.pi": F(1)} and rows[1].rhs == 7


def test_epigraph_rows_zero_cost_forces_zero():
    doc = single_node_document()
    doc["nodes"][0]["cost"] = {"terms": {}, "constant": 0}
    tree = parse_and_validate(doc)
    rows = epigraph_rows(tree, tree.nodes["only"], F(0))
    assert rows[0].coeffs == {pi_var("only"): F(-1)} and rows[0].rhs == 0
    assert rows[1].coeffs == {pi_var("only"): F(1)} and rows[1].rhs == 0


def test_assemble_jod_single_node():
    tree = parse_and_validate(single_node_document())
    out = solve_lp(assemble_jod(tree))
    assert out.status == "optimal"
    assert out.value == 1  # 2*y + 1 at y = 0


def test_assemble_jod_infeasible_leaf_propagates():
    doc = _two_node_document()
    doc["nodes"][1]["constraints"] = [
        {"terms": {"x": 1}, "relation": "<=", "rhs": 0},
        {"terms": {"x": 1}, "relation": ">=", "rhs": 1},
    ]
    tree = parse_and_validate(doc)
    assert solve_lp(assemble_jod(tree)).status == "infeasible"


def test_epigraph_reformulation_matches_direct_form(illustrative_tree):
    direct = solve_lp(assemble_jod(illustrative_tree))
    reformed = solve_lp(assemble_epigraph_lp(illustrative_tree))
    assert direct.value == reformed.value == F(17, 2)
    # the epigraph binds at the optimum for each non-root node
    a = reformed.assignment
    assert a[pi_var("low1")] == a["low1.x1"] + a["low1.y1"]
    assert a[pi_var("low2")] == F(3, 2) * (a["low2.x2"] + a["low2.y2"])

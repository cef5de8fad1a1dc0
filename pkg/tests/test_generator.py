import json
from fractions import Fraction

from epcoord.generator import generate_document, generate_tree
from epcoord.linprog import check_feasible
from epcoord.model import assemble_jod, flat_rows, parse_and_validate
from epcoord.oracle import solve_joint

import pytest


def test_documents_are_deterministic_per_seed():
    a = generate_document(seed=42, levels=2, leaves=4)
    b = generate_document(seed=42, levels=2, leaves=4)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = generate_document(seed=43, levels=2, leaves=4)
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)


def test_two_level_shape():
    tree = generate_tree(seed=0, levels=2, leaves=5)
    assert tree.root == "root"
    assert len(tree.children("root")) == 5
    assert all(not tree.children(c) for c in tree.children("root"))


def test_three_level_shape():
    tree = generate_tree(seed=0, levels=3, mids=2, leaves_per_mid=3)
    mids = tree.children("root")
    assert len(mids) == 2
    for mid in mids:
        assert len(tree.children(mid)) == 3


def test_levels_guard():
    with pytest.raises(ValueError):
        generate_document(levels=4)


def test_documents_serialize_through_json_and_validate():
    doc = generate_document(seed=9, levels=3)
    reparsed = json.loads(json.dumps(doc), parse_float=Fraction)
    parse_and_validate(reparsed)


def test_generated_instances_are_feasible():
    for seed in range(12):
        tree = generate_tree(seed=seed, levels=2, leaves=3)
        lp = assemble_jod(tree)
        assert check_feasible(lp.rows, lp.variables) is not None, f"seed {seed}"


def test_generated_instances_are_bounded():
    for seed in range(8):
        tree = generate_tree(seed=seed, levels=2, leaves=3)
        assert solve_joint(tree).status == "optimal", f"seed {seed}"


def test_leaf_row_counts_stay_small():
    for seed in range(6):
        doc = generate_document(seed=seed, levels=2, leaves=4)
        for node in doc["nodes"]:
            if node["parent"] is not None:
                assert len(node["constraints"]) <= 10


def test_flat_rows_reference_only_declared_variables():
    tree = generate_tree(seed=5, levels=3)
    declared = set(assemble_jod(tree).variables)
    for row in flat_rows(tree):
        assert set(row.coeffs) <= declared

import json
import os
from fractions import Fraction

import pytest

from epcoord.model import parse_and_validate

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
ILLUSTRATIVE_PATH = os.path.join(REPO_ROOT, "examples", "illustrative.json")


def load_document(path):
    with open(path) as fh:
        return json.load(fh, parse_float=Fraction)


@pytest.fixture(scope="session")
def illustrative_path():
    return ILLUSTRATIVE_PATH


@pytest.fixture(scope="session")
def illustrative_document():
    return load_document(ILLUSTRATIVE_PATH)


@pytest.fixture()
def illustrative_tree(illustrative_document):
    return parse_and_validate(illustrative_document)


def row_set(polytope):
    """Order-independent canonical row fingerprint for exact comparisons."""
    return {
        tuple(sorted(coeffs.items())) + (("__rhs__", rhs),)
        for coeffs, rhs in polytope.rows
    }


def single_node_document():
    return {
        "name": "single",
        "nodes": [
            {
                "id": "only",
                "parent": None,
                "coordination_vars": [],
                "internal_vars": ["y"],
                "cost": {"terms": {"y": 2}, "constant": 1},
                "constraints": [
                    {"terms": {"y": 1}, "relation": ">=", "rhs": 0},
                    {"terms": {"y": 1}, "relation": "<=", "rhs": 5},
                ],
            }
        ],
    }

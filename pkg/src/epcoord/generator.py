"""Random feasible instance generator.

Feasibility is guaranteed by construction: every variable gets an anchor
value, every variable is boxed around its anchor, and every extra or coupling
row is satisfied at the anchors. Boxes also keep all costs bounded, so no
generated instance ever needs an explicit cost_bound.
"""

import random
from fractions import Fraction

from .model import parse_and_validate
from .rational import format_scalar


def _anchor(rng):
    return Fraction(rng.randint(-8, 12), 2)


def _box_rows(anchors):
    rows = []
    for v, a in anchors.items():
        hi = a.__ceil__() + 1
        lo = a.__floor__() - 1
        rows.append({"terms": {v: 1}, "relation": "<=", "rhs": hi})
        rows.append({"terms": {v: 1}, "relation": ">=", "rhs": lo})
    return rows


def _extra_rows(rng, anchors, count):
    rows = []
    for _ in range(count):
        terms = {v: rng.randint(-3, 3) for v in anchors}
        terms = {v: c for v, c in terms.items() if c}
        if not terms:
            continue
        at_anchor = sum(Fraction(c) * anchors[v] for v, c in terms.items())
        rows.append({
            "terms": terms,
            "relation": "<=",
            "rhs": format_scalar(at_anchor + rng.randint(0, 3)),
        })
    return rows


def _cost(rng, variables):
    terms = {v: rng.randint(-3, 3) for v in variables}
    if variables and all(c == 0 for c in terms.values()):
        terms[variables[0]] = 1
    return {"terms": {v: c for v, c in terms.items() if c}, "constant": rng.randint(-2, 2)}


def _leaf(rng, nid, parent):
    nx = rng.randint(1, 2)
    ny = rng.randint(1, 4 - nx)  # 2 box rows per var plus <= 2 extras stays within 10 rows
    coord = [f"x{i + 1}" for i in range(nx)]
    internal = [f"y{i + 1}" for i in range(ny)]
    anchors = {v: _anchor(rng) for v in coord + internal}
    rows = _box_rows(anchors) + _extra_rows(rng, anchors, rng.randint(0, 2))
    node = {
        "id": nid,
        "parent": parent,
        "coordination_vars": coord,
        "internal_vars": internal,
        "cost": _cost(rng, coord + internal),
        "constraints": rows,
    }
    coord_anchors = {f"{nid}.{v}": anchors[v] for v in coord}
    return node, coord_anchors


def _coupling_rows(rng, own_anchors, child_anchors, count):
    """Rows over own vars and children's coordination vars, anchored feasible."""
    rows = []
    pool = {**own_anchors, **child_anchors}
    for k in range(count):
        terms = {v: rng.randint(-2, 2) for v in pool}
        terms = {v: c for v, c in terms.items() if c}
        if not terms:
            terms = {next(iter(pool)): 1}
        at_anchor = sum(Fraction(c) * pool[v] for v, c in terms.items())
        if k == 0 and rng.random() < 0.5:
            rows.append({"terms": terms, "relation": "=", "rhs": format_scalar(at_anchor)})
        else:
            rows.append({
                "terms": terms,
                "relation": "<=",
                "rhs": format_scalar(at_anchor + rng.randint(0, 2)),
            })
    return rows


def _inner(rng, nid, parent, children_anchors):
    """A root or mid-level node coupling its children."""
    is_root = parent is None
    coord = [] if is_root else [f"x{i + 1}" for i in range(rng.randint(1, 2))]
    internal = [f"y{i + 1}" for i in range(rng.randint(0 if coord else 1, 1))]
    anchors = {v: _anchor(rng) for v in coord + internal}
    child_pool = {}
    for m in children_anchors:
        child_pool.update(m)
    rows = _box_rows(anchors) + _coupling_rows(rng, anchors, child_pool, rng.randint(1, 2))
    node = {
        "id": nid,
        "parent": parent,
        "coordination_vars": coord,
        "internal_vars": internal,
        "cost": _cost(rng, coord + internal),
        "constraints": rows,
    }
    coord_anchors = {f"{nid}.{v}": anchors[v] for v in coord}
    return node, coord_anchors


def generate_document(seed=0, levels=2, leaves=3, mids=2, leaves_per_mid=2, name=None):
    """A random feasible tree document; 2 levels (root + leaves) or 3 (root + mids + leaves)."""
    if levels not in (2, 3):
        raise ValueError("levels must be 2 or 3")
    rng = random.Random(seed)
    nodes = []
    if levels == 2:
        leaf_anchors = []
        for i in range(leaves):
            node, anchors = _leaf(rng, f"l{i + 1}", "root")
            nodes.append(node)
            leaf_anchors.append(anchors)
        root, _ = _inner(rng, "root", None, leaf_anchors)
    else:
        mid_anchors = []
        for j in range(mids):
            mid_id = f"m{j + 1}"
            leaf_anchors = []
            for i in range(leaves_per_mid):
                node, anchors = _leaf(rng, f"{mid_id}l{i + 1}", mid_id)
                nodes.append(node)
                leaf_anchors.append(anchors)
            mid, anchors = _inner(rng, mid_id, "root", leaf_anchors)
            nodes.append(mid)
            mid_anchors.append(anchors)
        root, _ = _inner(rng, "root", None, mid_anchors)
    nodes.insert(0, root)
    return {"name": name or f"generated-seed{seed}", "nodes": nodes}


def generate_tree(seed=0, **kwargs):
    return parse_and_validate(generate_document(seed=seed, **kwargs))

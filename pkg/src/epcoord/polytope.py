"""H-representation polytopes over exact rationals.

A polytope is a conjunction of rows `sum(a[v] * v) <= rhs`. Equalities are
stored as paired opposite rows at this layer; the projection engine detects
such pairs and eliminates their variables by exact substitution before
falling back to Fourier-Motzkin elimination.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .errors import EmptyPolytope, MissingCoordinate, UnknownVariable
from .linprog import (
    LE,
    MAXIMIZE,
    MINIMIZE,
    OPTIMAL,
    Constraint,
    LinearProgram,
    check_feasible,
    solve_lp,
)
from .rational import ZERO


@dataclass
class Polytope:
    variables: list
    rows: list = field(default_factory=list)  # list of (coeffs: dict, rhs: Fraction)
    empty: bool = False


def _row_key(polytope, row):
    coeffs, rhs = row
    return tuple(coeffs.get(v, ZERO) for v in polytope.variables) + (rhs,)


def _as_constraints(rows):
    return [Constraint(coeffs, LE, rhs) for coeffs, rhs in rows]


def canonicalize(p: Polytope) -> Polytope:
    """Scale rows (positive scale) so coefficients and rhs are coprime integers;
    sort lexicographically and drop exact duplicates.

    Trivially true all-zero rows are dropped; an all-zero row with negative
    rhs makes the result Empty.
    """
    if p.empty:
        return Polytope(list(p.variables), [], empty=True)
    rows = []
    for coeffs, rhs in p.rows:
        nz = {v: a for v, a in coeffs.items() if a != 0}
        if not nz:
            if rhs < 0:
                return Polytope(list(p.variables), [], empty=True)
            continue
        entries = list(nz.values()) + [rhs]
        denoms = lcm(*(a.denominator for a in entries))
        g = gcd(*(abs(a.numerator) * (denoms // a.denominator) for a in entries))
        scale = Fraction(denoms, g or 1)
        rows.append(({v: a * scale for v, a in nz.items()}, rhs * scale))
    out = Polytope(list(p.variables), rows)
    out.rows.sort(key=lambda row: _row_key(out, row))
    deduped = []
    last = None
    for row in out.rows:
        key = _row_key(out, row)
        if key != last:
            deduped.append(row)
            last = key
    out.rows = deduped
    return out


def fme_eliminate(p: Polytope, var) -> Polytope:
    """Project along one variable by Fourier-Motzkin elimination.

    Output may contain redundant rows; callers prune with remove_redundant.
    """
    if var not in p.variables:
        raise UnknownVariable(f"variable {var!r} is not declared in this polytope")
    remaining = [v for v in p.variables if v != var]
    if p.empty:
        return Polytope(remaining, [], empty=True)
    zero, pos, neg = [], [], []
    for coeffs, rhs in p.rows:
        a = coeffs.get(var, ZERO)
        if a == 0:
            zero.append(({v: c for v, c in coeffs.items() if v != var}, rhs))
        elif a > 0:
            pos.append((coeffs, rhs, a))
        else:
            neg.append((coeffs, rhs, a))
    rows = list(zero)
    for pc, pr, pa in pos:
        for nc, nr, na in neg:
            # (-na) * positive row + pa * negative row cancels var exactly
            coeffs = {}
            for v in set(pc) | set(nc):
                if v == var:
                    continue
                c = -na * pc.get(v, ZERO) + pa * nc.get(v, ZERO)
                if c != 0:
                    coeffs[v] = c
            rows.append((coeffs, -na * pr + pa * nr))
    return Polytope(remaining, rows)


def remove_redundant(p: Polytope) -> Polytope:
    """Drop every implied row; the result has the same solution set.

    Each surviving row is irredundant: maximizing its left side subject to the
    other survivors (capped at rhs + 1 to sidestep unboundedness) strictly
    exceeds its rhs. Ties between mutually dominating rows are broken by row
    index: the earlier row survives.
    """
    if p.empty:
        return Polytope(list(p.variables), [], empty=True)
    if check_feasible(_as_constraints(p.rows), p.variables) is None:
        return Polytope(list(p.variables), [], empty=True)
    kept = list(range(len(p.rows)))
    for idx in range(len(p.rows)):
        coeffs, rhs = p.rows[idx]
        if not any(a != 0 for a in coeffs.values()):
            kept.remove(idx)  # 0 <= rhs with rhs >= 0 (feasibility already held)
            continue
        others = _as_constraints(p.rows[i] for i in kept if i != idx)
        others.append(Constraint(coeffs, LE, rhs + 1))
        outcome = solve_lp(LinearProgram(list(p.variables), dict(coeffs), sense=MAXIMIZE, rows=others))
        if outcome.status == OPTIMAL and outcome.value <= rhs:
            kept.remove(idx)
    return Polytope(list(p.variables), [p.rows[i] for i in kept])


def contains(p: Polytope, point) -> bool:
    """Exact membership test."""
    for v in p.variables:
        if v not in point:
            raise MissingCoordinate(f"point lacks coordinate {v!r}")
    if p.empty:
        return False
    for coeffs, rhs in p.rows:
        if sum((a * point[v] for v, a in coeffs.items()), ZERO) > rhs:
            return False
    return True


def bounding_box(p: Polytope):
    """Per-variable exact (min, max); None marks an unbounded direction."""
    if p.empty:
        raise EmptyPolytope("cannot bound an empty polytope")
    rows = _as_constraints(p.rows)
    box = {}
    for v in p.variables:
        bounds = []
        for sense in (MINIMIZE, MAXIMIZE):
            outcome = solve_lp(LinearProgram(list(p.variables), {v: Fraction(1)}, sense=sense, rows=rows))
            if outcome.status == "infeasible":
                raise EmptyPolytope("polytope is empty")
            bounds.append(outcome.value if outcome.status == OPTIMAL else None)
        box[v] = (bounds[0], bounds[1])
    return box


def substitute_point(p: Polytope, partial) -> Polytope:
    """Fix a subset of coordinates; returns a polytope over the remaining ones."""
    remaining = [v for v in p.variables if v not in partial]
    if p.empty:
        return Polytope(remaining, [], empty=True)
    rows = []
    for coeffs, rhs in p.rows:
        fixed = sum((a * partial[v] for v, a in coeffs.items() if v in partial), ZERO)
        rows.append(({v: a for v, a in coeffs.items() if v not in partial}, rhs - fixed))
    return Polytope(remaining, rows)


def _find_equality(p: Polytope, candidates):
    """Find (var, equality row) where var is eliminable via a paired-row equality.

    Rows must be canonical; a pair (a, b) and (-a, -b) encodes a*z = b.
    """
    keys = {_row_key(p, row): i for i, row in enumerate(p.rows)}
    candidate_set = set(candidates)
    for i, (coeffs, rhs) in enumerate(p.rows):
        neg_key = _row_key(p, ({v: -a for v, a in coeffs.items()}, -rhs))
        j = keys.get(neg_key)
        if j is None or j <= i:
            continue
        for v in p.variables:
            if v in candidate_set and coeffs.get(v, ZERO) != 0:
                return v, (coeffs, rhs)
    return None, None


def _substitute_equality(p: Polytope, var, equality) -> Polytope:
    """Gaussian step: solve the equality for var and substitute everywhere."""
    ecoeffs, erhs = equality
    a = ecoeffs[var]
    remaining = [v for v in p.variables if v != var]
    rows = []
    for coeffs, rhs in p.rows:
        f = coeffs.get(var, ZERO)
        if f == 0:
            rows.append(({v: c for v, c in coeffs.items() if v != var}, rhs))
            continue
        new_coeffs = {}
        for v in set(coeffs) | set(ecoeffs):
            if v == var:
                continue
            c = coeffs.get(v, ZERO) - f * ecoeffs.get(v, ZERO) / a
            if c != 0:
                new_coeffs[v] = c
        rows.append((new_coeffs, rhs - f * erhs / a))
    return Polytope(remaining, rows)


def _fme_score(p: Polytope, var):
    pos = sum(1 for coeffs, _ in p.rows if coeffs.get(var, ZERO) > 0)
    neg = sum(1 for coeffs, _ in p.rows if coeffs.get(var, ZERO) < 0)
    return pos * neg


def project(p: Polytope, keep) -> Polytope:
    """Exact projection onto the `keep` variables.

    Equality-paired variables are substituted out first; the rest go through
    FME, greedily picking the variable minimizing (#positive x #negative)
    rows. Redundancy removal is interleaved after every elimination to hold
    intermediate growth down. The result is canonical and irredundant.
    """
    keep = list(keep)
    for v in keep:
        if v not in p.variables:
            raise UnknownVariable(f"variable {v!r} is not declared in this polytope")
    work = remove_redundant(canonicalize(p))
    keep_set = set(keep)
    eliminate = [v for v in work.variables if v not in keep_set]
    while eliminate and not work.empty:
        var, equality = _find_equality(work, eliminate)
        if var is not None:
            work = _substitute_equality(work, var, equality)
        else:
            var = min(eliminate, key=lambda v: (_fme_score(work, v), work.variables.index(v)))
            work = fme_eliminate(work, var)
        work = remove_redundant(canonicalize(work))
        eliminate.remove(var)
    if work.empty:
        return Polytope(keep, [], empty=True)
    return canonicalize(Polytope(keep, work.rows))

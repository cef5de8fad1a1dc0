"""Self-contained exact linear programming.

A two-phase primal simplex over `fractions.Fraction`. Bland's smallest-index
pivot rule is used throughout, so cycling is impossible and termination is
guaranteed. There is no floating-point mode: every optimum is exact.

Free variables are split into a difference of nonnegatives; equalities are
handled natively (callers never pre-split them).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MalformedProgram
from .rational import ZERO

LE = "<="
EQ = "="
GE = ">="
RELATIONS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


@dataclass
class Constraint:
    """A single affine relation: sum(coeffs[v] * v) <relation> rhs."""
    coeffs: dict
    relation: str
    rhs: Fraction


@dataclass
class LinearProgram:
    variables: list
    objective: dict
    constant: Fraction = ZERO
    sense: str = MINIMIZE
    rows: list = field(default_factory=list)


@dataclass
class LpOutcome:
    status: str
    value: Fraction = None
    assignment: dict = None


def _validate(variables, objective, rows, sense=MINIMIZE):
    if not variables:
        raise MalformedProgram("a linear program needs at least one variable")
    declared = set(variables)
    if len(declared) != len(variables):
        raise MalformedProgram("duplicate variable names")
    if sense not in (MINIMIZE, MAXIMIZE):
        raise MalformedProgram(f"unknown sense {sense!r}")
    for name in objective:
        if name not in declared:
            raise MalformedProgram(f"objective references undeclared variable {name!r}")
    for k, row in enumerate(rows):
        if row.relation not in RELATIONS:
            raise MalformedProgram(f"row {k}: unknown relation {row.relation!r}")
        for name in row.coeffs:
            if name not in declared:
                raise MalformedProgram(f"row {k} references undeclared variable {name!r}")


def _build_tableau(variables, rows):
    """Standard form: split free vars, add slacks for inequalities, make rhs >= 0.

    Returns (tableau, rhs, ncols) where ncols counts split + slack columns;
    artificial columns are appended by the caller.
    """
    index = {v: i for i, v in enumerate(variables)}
    nsplit = 2 * len(variables)
    n_ineq = sum(1 for r in rows if r.relation != EQ)
    ncols = nsplit + n_ineq
    tableau, rhs = [], []
    slack = nsplit
    for row in rows:
        dense = [ZERO] * ncols
        for name, a in row.coeffs.items():
            i = index[name]
            dense[2 * i] += a
            dense[2 * i + 1] -= a
        b = row.rhs
        if row.relation == GE:
            dense = [-x for x in dense]
            b = -b
        if row.relation != EQ:
            dense[slack] = Fraction(1)
            slack += 1
        if b < 0:
            dense = [-x for x in dense]
            b = -b
        tableau.append(dense)
        rhs.append(b)
    return tableau, rhs, ncols


def _pivot(tableau, rhs, basis, obj, value, r, e):
    """Pivot on (row r, column e); returns the updated objective value."""
    piv = tableau[r][e]
    if piv != 1:
        tableau[r] = [x / piv for x in tableau[r]]
        rhs[r] = rhs[r] / piv
    prow, prhs = tableau[r], rhs[r]
    for i, other in enumerate(tableau):
        if i == r:
            continue
        f = other[e]
        if f:
            tableau[i] = [x - f * y for x, y in zip(other, prow)]
            rhs[i] -= f * prhs
    if obj is not None:
        f = obj[e]
        if f:
            for j, y in enumerate(prow):
                if y:
                    obj[j] -= f * y
            value += f * prhs
    basis[r] = e
    return value


def _simplex(tableau, rhs, basis, obj, value, allowed):
    """Bland-rule simplex loop; `allowed` is the range of columns that may enter."""
    m = len(tableau)
    while True:
        enter = -1
        for j in allowed:
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, value
        leave = -1
        best = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED, value
        value = _pivot(tableau, rhs, basis, obj, value, leave, enter)


def _phase_one(variables, rows):
    """Run phase one. Returns (tableau, rhs, basis, ncols) on feasibility, None otherwise."""
    tableau, rhs, ncols = _build_tableau(variables, rows)
    m = len(tableau)
    # a slack column with +1 coefficient is a natural basic variable;
    # only rows without one get an artificial
    basis = []
    nsplit = 2 * len(variables)
    art_rows = []
    for i, dense in enumerate(tableau):
        slack = next((j for j in range(nsplit, ncols) if dense[j] == 1), None)
        if slack is not None and all(k == i or tableau[k][slack] == 0 for k in range(m)):
            basis.append(slack)
        else:
            art_rows.append(i)
            basis.append(None)
    for k, i in enumerate(art_rows):
        basis[i] = ncols + k
    nart = len(art_rows)
    for i, dense in enumerate(tableau):
        dense.extend(ZERO for _ in range(nart))
    for k, i in enumerate(art_rows):
        tableau[i][ncols + k] = Fraction(1)
    if art_rows:
        obj = [-sum(tableau[i][j] for i in art_rows) for j in range(ncols)]
        obj.extend(ZERO for _ in range(nart))
        value = sum((rhs[i] for i in art_rows), ZERO)
        status, value = _simplex(tableau, rhs, basis, obj, value, range(ncols))
        assert status == OPTIMAL  # phase one is always bounded below by 0
        if value != 0:
            return None
    # drive leftover artificials out of the basis, drop redundant rows
    drop = []
    for i in range(m):
        if basis[i] >= ncols:
            enter = next((j for j in range(ncols) if tableau[i][j] != 0), None)
            if enter is None:
                drop.append(i)
            else:
                _pivot(tableau, rhs, basis, None, ZERO, i, enter)
    if drop:
        keep = [i for i in range(m) if i not in set(drop)]
        tableau = [tableau[i] for i in keep]
        rhs = [rhs[i] for i in keep]
        basis = [basis[i] for i in keep]
    tableau = [row[:ncols] for row in tableau]
    return tableau, rhs, basis, ncols


def _extract(variables, basis, rhs, ncols):
    values = [ZERO] * ncols
    for i, b in enumerate(basis):
        values[b] = rhs[i]
    return {v: values[2 * i] - values[2 * i + 1] for i, v in enumerate(variables)}


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; any optimal vertex is an acceptable assignment."""
    _validate(lp.variables, lp.objective, lp.rows, lp.sense)
    feasible = _phase_one(lp.variables, lp.rows)
    if feasible is None:
        return LpOutcome(INFEASIBLE)
    tableau, rhs, basis, ncols = feasible
    cost = [ZERO] * ncols
    sign = 1 if lp.sense == MINIMIZE else -1
    index = {v: i for i, v in enumerate(lp.variables)}
    for name, c in lp.objective.items():
        i = index[name]
        cost[2 * i] += sign * c
        cost[2 * i + 1] -= sign * c
    m = len(tableau)
    obj = [cost[j] - sum(cost[basis[i]] * tableau[i][j] for i in range(m)) for j in range(ncols)]
    value = sum((cost[basis[i]] * rhs[i] for i in range(m)), ZERO)
    status, _ = _simplex(tableau, rhs, basis, obj, value, range(ncols))
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)
    assignment = _extract(lp.variables, basis, rhs, ncols)
    total = lp.constant + sum((c * assignment[v] for v, c in lp.objective.items()), ZERO)
    return LpOutcome(OPTIMAL, value=total, assignment=assignment)


def check_feasible(rows, variables):
    """Phase-one feasibility test; returns a witness assignment or None."""
    _validate(variables, {}, rows)
    feasible = _phase_one(variables, rows)
    if feasible is None:
        return None
    _tableau, rhs, basis, ncols = feasible
    return _extract(variables, basis, rhs, ncols)

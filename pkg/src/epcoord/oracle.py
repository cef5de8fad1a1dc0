"""Independent ground-truth machinery.

Everything here deliberately avoids the code paths it checks: the flat joint
solve bypasses projection and coordination; vertex enumeration is brute-force
active-set search; projection verification samples points and asks the
phase-one feasibility question directly.
"""

import random
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import DimensionTooLarge, InfeasibilityError
from .linprog import INFEASIBLE, OPTIMAL, LpOutcome, check_feasible, solve_lp
from .model import assemble_jod, constraint_satisfied, evaluate_cost, flat_rows, node_rows
from .coordinator import flat_assignment, run_coordinated
from .polytope import Polytope, bounding_box, contains, substitute_point, _as_constraints
from .rational import ZERO

MAX_ENUM_DIM = 6


def solve_joint(tree) -> LpOutcome:
    """Ground truth: solve the flat joint dispatch LP directly."""
    return solve_lp(assemble_jod(tree))


def _solve_square(rows, dim):
    """Exact Gaussian elimination on a dim x dim system; None if singular."""
    mat = [list(vec) + [rhs] for vec, rhs in rows]
    for col in range(dim):
        pivot = next((r for r in range(col, dim) if mat[r][col] != 0), None)
        if pivot is None:
            return None
        mat[col], mat[pivot] = mat[pivot], mat[col]
        inv = mat[col][col]
        mat[col] = [x / inv for x in mat[col]]
        for r in range(dim):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    return [mat[r][dim] for r in range(dim)]


def enumerate_vertices(p: Polytope):
    """All basic feasible points, by trying every dim-subset of rows.

    Oracle-scale only; guarded to six dimensions.
    """
    dim = len(p.variables)
    if dim > MAX_ENUM_DIM:
        raise DimensionTooLarge(f"vertex enumeration is capped at {MAX_ENUM_DIM} dimensions")
    if p.empty:
        return []
    dense = [
        ([coeffs.get(v, ZERO) for v in p.variables], rhs) for coeffs, rhs in p.rows
    ]
    seen = set()
    points = []
    for subset in combinations(range(len(dense)), dim):
        point = _solve_square([dense[i] for i in subset], dim)
        if point is None:
            continue
        if any(sum(a * x for a, x in zip(vec, point)) > rhs for vec, rhs in dense):
            continue
        key = tuple(point)
        if key not in seen:
            seen.add(key)
            points.append({v: x for v, x in zip(p.variables, point)})
    return points


def vertex_minimum(p: Polytope, objective):
    """min over enumerated vertices of an affine objective; None if no vertex."""
    best = None
    for point in enumerate_vertices(p):
        value = sum((a * point[v] for v, a in objective.items()), ZERO)
        if best is None or value < best:
            best = value
    return best


@dataclass
class VerificationReport:
    passed: bool
    samples_checked: int
    vertices_checked: int
    counterexamples: list = field(default_factory=list)


def _sample_coordinate(rng, low, high):
    """A rational in [low, high] on a grid with denominator <= 64."""
    denom = 2 ** rng.randint(0, 6)
    lo_n = (low * denom).__ceil__()
    hi_n = (high * denom).__floor__()
    if lo_n > hi_n:
        return low
    return Fraction(rng.randint(lo_n, hi_n), denom)


def verify_projection(ofr, ep, samples=200, seed=0) -> VerificationReport:
    """Check both directions of the projection on sampled points.

    A point is in the projected polytope iff the region with the kept
    coordinates pinned to it is feasible. Samples come from the projection's
    bounding box inflated by 10%; additionally every enumerable region vertex
    must project into the polytope.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    ep_polytope = ep.polytope if hasattr(ep, "polytope") else ep
    region = ofr.polytope if hasattr(ofr, "polytope") else ofr
    box = bounding_box(ep_polytope)
    ranges = {}
    for v, (lo, hi) in box.items():
        lo = lo if lo is not None else Fraction(-100)
        hi = hi if hi is not None else Fraction(100)
        width = hi - lo
        margin = width / 10 if width > 0 else Fraction(1)
        ranges[v] = (lo - margin, hi + margin)
    counterexamples = []
    for _ in range(samples):
        point = {v: _sample_coordinate(rng, lo, hi) for v, (lo, hi) in ranges.items()}
        in_ep = contains(ep_polytope, point)
        fixed = substitute_point(region, point)
        witness = check_feasible(_as_constraints(fixed.rows), fixed.variables) if fixed.variables else (
            {} if all(rhs >= 0 for _, rhs in fixed.rows) else None
        )
        if in_ep != (witness is not None):
            counterexamples.append({"point": point, "in_projection": in_ep, "region_feasible": witness is not None})
    vertices_checked = 0
    if len(region.variables) <= MAX_ENUM_DIM:
        for vertex in enumerate_vertices(region):
            restricted = {v: vertex[v] for v in ep_polytope.variables}
            vertices_checked += 1
            if not contains(ep_polytope, restricted):
                counterexamples.append({"point": restricted, "in_projection": False, "region_feasible": True})
    return VerificationReport(not counterexamples, samples, vertices_checked, counterexamples)


@dataclass
class ComparisonReport:
    jod_status: str
    coordinated_status: str
    jod_value: Fraction = None
    coordinated_value: Fraction = None
    values_equal: bool = False
    consistent: bool = False
    jod_assignment_feasible_for_tree: bool = None
    coordinated_assignment_feasible_for_flat_lp: bool = None
    node_cost_deltas: dict = field(default_factory=dict)


def compare(tree) -> ComparisonReport:
    """Run the joint solve and the coordinated scheme, then cross-check."""
    jod = solve_joint(tree)
    try:
        coordinated = run_coordinated(tree)
        coordinated_status = OPTIMAL
    except InfeasibilityError:
        coordinated = None
        coordinated_status = INFEASIBLE
    report = ComparisonReport(jod_status=jod.status, coordinated_status=coordinated_status)
    if jod.status == INFEASIBLE and coordinated is None:
        report.consistent = True
        return report
    if jod.status != OPTIMAL or coordinated is None:
        return report
    report.jod_value = jod.value
    report.coordinated_value = coordinated.objective
    report.values_equal = jod.value == coordinated.objective
    report.consistent = report.values_equal
    rows = flat_rows(tree)
    report.jod_assignment_feasible_for_tree = all(
        constraint_satisfied(row, jod.assignment)
        for node in tree.nodes.values()
        for row in node_rows(node)
        if all(v in jod.assignment for v in row.coeffs)
    )
    coordinated_point = flat_assignment(tree, coordinated)
    report.coordinated_assignment_feasible_for_flat_lp = all(
        constraint_satisfied(row, coordinated_point)
        for row in rows
        if all(v in coordinated_point for v in row.coeffs)
    )
    for nid, node in tree.nodes.items():
        try:
            jod_cost = evaluate_cost(node, jod.assignment)
        except KeyError:
            continue
        report.node_cost_deltas[nid] = jod_cost - coordinated.nodes[nid].own_cost
    return report


@dataclass
class TimingReport:
    repetitions: int
    stage1_times: dict  # node id -> median seconds
    stage2_time: float
    stage3_times: dict
    t_coor: float
    t_jod: float
    upper_scale: int
    lower_scales: dict  # node id -> vars * rows of the local region

    def composition(self):
        """The declared composition of t_coor from its measured components."""
        s1 = max(self.stage1_times.values(), default=0.0)
        s3 = max(self.stage3_times.values(), default=0.0)
        return s1 + self.stage2_time + s3


def benchmark(tree, repetitions=5) -> TimingReport:
    """Wall-clock the three stages and the flat solve; medians over repetitions.

    The coordinated total is composed as max-over-subsystems projection time
    plus the upper solve plus max-over-subsystems local dispatch time, since
    subsystems at the same stage run in parallel.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    stage1_runs, stage2_runs, stage3_runs = [], [], []
    scales = None
    for _ in range(repetitions):
        result = run_coordinated(tree)
        stage1_runs.append(result.stage_times["stage1"])
        stage2_runs.append(result.stage_times["stage2"])
        stage3_runs.append(result.stage_times["stage3"])
        scales = result.scales
    jod_times = []
    for _ in range(repetitions):
        started = time.perf_counter()
        solve_joint(tree)
        jod_times.append(time.perf_counter() - started)
    non_root = [nid for nid in tree.nodes if nid != tree.root]
    stage1_times = {nid: statistics.median(run[nid] for run in stage1_runs) for nid in non_root}
    stage3_times = {nid: statistics.median(run[nid] for run in stage3_runs) for nid in non_root}
    stage2_time = statistics.median(stage2_runs)
    report = TimingReport(
        repetitions=repetitions,
        stage1_times=stage1_times,
        stage2_time=stage2_time,
        stage3_times=stage3_times,
        t_coor=0.0,
        t_jod=statistics.median(jod_times),
        upper_scale=scales["upper"],
        lower_scales=dict(scales["stage1"]),
    )
    report.t_coor = report.composition()
    return report

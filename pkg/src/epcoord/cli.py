"""Command-line interface.

Exit codes: 0 success; 1 infeasible model or joint/coordinated inequality;
2 malformed input; 3 internal inconsistency.
"""

import argparse
import json
import os
import sys

from .coordinator import run_coordinated, stage1_project
from .errors import InfeasibilityError, InputError, InternalError
from .generator import generate_document
from .model import load_tree
from .oracle import OPTIMAL, benchmark, compare, solve_joint, verify_projection
from .projection import ep_to_document
from .reports import (
    comparison_json,
    dispatch_json,
    outcome_json,
    timing_json,
    verification_json,
    write_dispatch_csv,
    write_json,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _emit(document, output):
    text = write_json(document, output)
    if output is None:
        sys.stdout.write(text)


def _figures_dir(output):
    if output is None:
        return "figures"
    stem = os.path.splitext(os.path.basename(output))[0]
    return os.path.join(os.path.dirname(output) or ".", f"{stem}_figures")


def cmd_validate(args):
    tree = load_tree(args.input)
    _emit(
        {
            "valid": True,
            "name": tree.name,
            "root": tree.root,
            "nodes": len(tree.nodes),
            "edges": len(tree.edges()),
        },
        args.output,
    )
    return EXIT_OK


def cmd_project(args):
    tree = load_tree(args.input)
    stage1 = stage1_project(tree)
    eps = [stage1.eps[nid] for nid in tree.nodes if nid in stage1.eps]
    document = {"eps": [ep_to_document(ep) for ep in eps]}
    if args.plot:
        document["figures"] = render_figures(eps, args.output)
    _emit(document, args.output)
    return EXIT_OK


def render_figures(eps, output):
    from .plots import render_ep_figures

    return render_ep_figures(eps, _figures_dir(output))


def cmd_solve(args):
    tree = load_tree(args.input)
    if args.mode == "joint":
        outcome = solve_joint(tree)
        _emit(outcome_json(outcome), args.output)
        return EXIT_OK if outcome.status == OPTIMAL else EXIT_INFEASIBLE
    if args.mode == "coordinated":
        result = run_coordinated(tree)
        document = dispatch_json(result)
        if args.emit_eps or args.plot:
            stage1 = stage1_project(tree)
            eps = [stage1.eps[nid] for nid in tree.nodes if nid in stage1.eps]
            if args.emit_eps:
                document["eps"] = [ep_to_document(ep) for ep in eps]
            if args.plot:
                document["figures"] = render_figures(eps, args.output)
        _emit(document, args.output)
        if args.csv:
            write_dispatch_csv(result, args.csv)
        return EXIT_OK
    # compare
    report = compare(tree)
    document = comparison_json(report)
    if args.verify:
        stage1 = stage1_project(tree)
        document["projection_checks"] = {
            nid: verification_json(
                verify_projection(stage1.ofrs[nid], stage1.eps[nid], samples=args.samples, seed=args.seed)
            )
            for nid in sorted(stage1.eps)
        }
    _emit(document, args.output)
    if report.jod_status != OPTIMAL or report.coordinated_status != OPTIMAL:
        return EXIT_INFEASIBLE
    if not report.values_equal:
        return EXIT_INFEASIBLE
    if args.verify and not all(c["passed"] for c in document["projection_checks"].values()):
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_bench(args):
    tree = load_tree(args.input)
    report = benchmark(tree, repetitions=args.reps)
    _emit(timing_json(report), args.output)
    return EXIT_OK


def cmd_gen(args):
    document = generate_document(seed=args.seed, levels=args.levels, leaves=args.leaves,
                                 mids=args.mids, leaves_per_mid=args.leaves_per_mid)
    _emit(document, args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="epcoord",
                                     description="Non-iterative coordinated dispatch via exact projection")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="model file (JSON)")
        p.add_argument("--output", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("validate", help="parse a model file and check its invariants")
    add_io(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("project", help="compute every non-root node's projected model")
    add_io(p)
    p.add_argument("--plot", action="store_true", help="render 2D projections as PNG files")
    p.set_defaults(handler=cmd_project)

    p = sub.add_parser("solve", help="solve the model jointly, coordinated, or both")
    add_io(p)
    p.add_argument("--mode", choices=("joint", "coordinated", "compare"), default="compare")
    p.add_argument("--emit-eps", action="store_true", help="include projected models in the report")
    p.add_argument("--plot", action="store_true", help="render 2D projections as PNG files")
    p.add_argument("--csv", default=None, help="also write a per-node CSV summary (coordinated mode)")
    p.add_argument("--verify", action="store_true",
                   help="compare mode: also sample-check every projection")
    p.add_argument("--samples", type=int, default=200, help="projection check sample count")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("bench", help="time the coordinated stages against the flat solve")
    add_io(p)
    p.add_argument("--reps", type=int, default=5, help="repetitions; medians are reported")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("gen", help="generate a random feasible model")
    add_io(p, needs_input=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=int, choices=(2, 3), default=2)
    p.add_argument("--leaves", type=int, default=3, help="leaf count (2-level trees)")
    p.add_argument("--mids", type=int, default=2, help="mid-level count (3-level trees)")
    p.add_argument("--leaves-per-mid", type=int, default=2)
    p.set_defaults(handler=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InternalError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

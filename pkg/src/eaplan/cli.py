"""Command line entry point: ``ea-plan``.

Exit codes: 0 solved / ok, 1 unsolvable or invalid, 2 timeout or other
search limit, 3 bad input.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .baseline import model_space_search
from .bench import BenchConfig, run_bench, summarize
from .compile import CompileConfig, EASolution, compile_ea, size_bounds, verify_solution
from .grounding import GroundingLimitError, ground, ground_pair, read_plan
from .oracle import OracleCapExceeded, exact_delta, mce, min_solution_cost
from .pddl import PDDLError, parse_domain, parse_problem, serialize_task
from .perturb import InsufficientSlotsError, perturb_model
from .planner import Limits, Status
from .solve import SolveConfig, SolveMode, delta_lower_bound, solve_ea
from .updates import (InconsistentUpdateError, UnsupportedDifferenceError,
                      VocabularyMismatchError, diff_models)
from .usar import run_usar_demo

log = logging.getLogger("eaplan")

EXIT_OK, EXIT_UNSOLVABLE, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2, 3

INPUT_ERRORS = (PDDLError, OSError, VocabularyMismatchError, UnsupportedDifferenceError,
                InconsistentUpdateError, InsufficientSlotsError, GroundingLimitError,
                json.JSONDecodeError, KeyError)


class InputError(Exception):
    pass


def _status_code(status: Status) -> int:
    if status is Status.SOLVED:
        return EXIT_OK
    if status in (Status.UNSOLVABLE, Status.APPROXIMATION_FAILURE):
        return EXIT_UNSOLVABLE
    return EXIT_TIMEOUT


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _read_pair(files):
    dom_file, prob_file = files
    dom = parse_domain(Path(dom_file).read_text())
    return dom, parse_problem(Path(prob_file).read_text(), dom)


def _models(args):
    robot = _read_pair(args.robot)
    if args.human is None:
        raise InputError("--human is required")
    return ground_pair(robot, _read_pair(args.human))


def _compile_cfg(args) -> CompileConfig:
    return CompileConfig(explanation_cost=args.expl_cost, ordering=args.ordering,
                         stage=args.stage, inference=not args.no_inference)


def _write_json(path, data) -> None:
    text = json.dumps(data, indent=2)
    if path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _print_solution(sol: EASolution, res) -> None:
    print(f"status: {res.status.value}")
    print(f"cost: {res.cost}  (task {sol.task_cost}, explanation {sol.explanation_cost})")
    print("explanation:")
    for u in sorted(sol.explanation):
        print(f"  {u.describe()}")
    print("plan:")
    for a in sol.augmented_plan or sol.plan:
        if not a.startswith("ea__"):
            print(f"  {a}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_compile(args) -> int:
    robot, human = _models(args)
    aug = compile_ea(robot, human, _compile_cfg(args))
    sizes = size_bounds(aug)
    print(json.dumps(sizes, indent=2))
    if args.diff:
        _write_json(args.diff, json.loads(aug.diff.to_json()))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        d, p = serialize_task(aug)
        (out / "domain.pddl").write_text(d)
        (out / "problem.pddl").write_text(p)
        print(f"wrote {out / 'domain.pddl'} and {out / 'problem.pddl'}")
    return EXIT_OK


def cmd_solve(args) -> int:
    robot, human = _models(args)
    mode = SolveMode.penalty(args.penalty) if args.mode == "penalty" else SolveMode(args.mode)
    cfg = SolveConfig(_compile_cfg(args), args.heuristic, Limits(args.time_limit))
    sol, res = solve_ea(robot, human, mode, cfg)
    if sol is None:
        print(f"status: {res.status.value}")
        return _status_code(res.status)
    _print_solution(sol, res)
    if args.json:
        _write_json(args.json, {"status": res.status.value, "objective": str(res.cost),
                                "expanded": res.expanded, **sol.to_dict()})
    return EXIT_OK


def cmd_baseline(args) -> int:
    robot, human = _models(args)
    sol, res = model_space_search(robot, human, _compile_cfg(args),
                                  Limits(args.time_limit), args.heuristic)
    if sol is None:
        print(f"status: {res.status.value}")
        return _status_code(res.status)
    _print_solution(sol, res)
    if args.json:
        _write_json(args.json, {"status": res.status.value, **sol.to_dict()})
    return EXIT_OK


def cmd_verify(args) -> int:
    robot, human = _models(args)
    sol = EASolution.from_dict(json.loads(Path(args.solution).read_text()))
    rep = verify_solution(robot, human, sol, optimality=args.optimal,
                          limits=Limits(args.time_limit))
    print(json.dumps(rep.to_dict(), indent=2))
    return EXIT_OK if rep.valid else EXIT_UNSOLVABLE


def cmd_perturb(args) -> int:
    robot = ground(*_read_pair(args.robot))
    human = perturb_model(robot, args.n, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for tag, task in (("robot", robot), ("human", human)):
        d, p = serialize_task(task, name=f"{task.name}-{tag}")
        (out / f"{tag}-domain.pddl").write_text(d)
        (out / f"{tag}-problem.pddl").write_text(p)
    (out / "diff.json").write_text(diff_models(robot, human).to_json() + "\n")
    print(f"wrote {args.n} changes (seed {args.seed}) to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(updates_per_variant=args.updates, variants_per_domain=args.variants,
                      time_limit=args.time_limit, expl_cost_factor=args.expl_factor,
                      ordering=args.ordering, heuristic=args.heuristic, seed=args.seed,
                      workers=args.workers)
    if args.domains:
        cfg.domains = []
        for item in args.domains:
            if ":" not in item:
                raise InputError(f"expected domain:problem, got {item!r}")
            cfg.domains.append(tuple(item.split(":", 1)))
    rows = run_bench(cfg, args.csv)
    summary = summarize(rows)
    for dom, methods in summary["by_domain"].items():
        for m, s in methods.items():
            print(f"{dom:12s} {m:12s} coverage {s['solved']}/{s['instances']}  "
                  f"mean runtime {s['mean_runtime']:.3f}s")
    print(f"co-solved: {summary['co_solved']}  "
          f"dominance violations: {len(summary['dominance_violations'])}")
    if args.csv:
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_demo(args) -> int:
    runs = run_usar_demo(time_limit=args.time_limit)
    return EXIT_OK if all(r.solution is not None for r in runs) else EXIT_UNSOLVABLE


def cmd_oracle(args) -> int:
    robot, human = _models(args)
    cc = _compile_cfg(args)
    if args.what == "min-cost":
        best = min_solution_cost(robot, human, cc)
        if best is None:
            print("no solution")
            return EXIT_UNSOLVABLE
        print(f"min cost {best[0]} with {[u.describe() for u in sorted(best[1])]}")
    elif args.what == "mce":
        if not args.plan:
            raise InputError("--plan is required for mce")
        plan = read_plan(Path(args.plan).read_text())
        E = mce(robot, human, plan, cc)
        if E is None:
            print("no explanation makes the plan optimal")
            return EXIT_UNSOLVABLE
        print("\n".join(u.describe() for u in sorted(E)) or "(empty)")
    else:
        res = exact_delta(robot, args.cost_cap)
        if res is None:
            print("no plan within the cap")
            return EXIT_UNSOLVABLE
        bound = delta_lower_bound(robot)
        print(f"optimum {res.optimum}  delta {res.value}"
              f"{' (censored)' if res.censored else ''}  lower bound {bound.value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _load_config(path: str) -> dict:
    """key = value lines, '#' comments; keys use the long option names."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string("[ea-plan]\n" + Path(path).read_text())
    return {k.replace("-", "_"): v for k, v in cp["ea-plan"].items()}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ea-plan",
                                description="Expectation-aware planning with explanations.")
    p.add_argument("--config", help="key=value file with option defaults")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def models(sp, human=True):
        sp.add_argument("--robot", nargs=2, metavar=("DOMAIN", "PROBLEM"), required=True)
        if human:
            sp.add_argument("--human", nargs=2, metavar=("DOMAIN", "PROBLEM"))

    def compile_opts(sp):
        sp.add_argument("--expl-cost", type=_fraction, default=Fraction(1))
        sp.add_argument("--ordering", choices=["free", "before-first-use", "prefix"],
                        default="before-first-use",
                        help="where explanations may appear (free is not always sound)")
        sp.add_argument("--stage", choices=["propose", "execute"], default="propose")
        sp.add_argument("--no-inference", action="store_true",
                        help="no belief inference from fired conditional effects")

    def search_opts(sp):
        sp.add_argument("--heuristic", choices=["blind", "hmax", "hadd"], default="hmax")
        sp.add_argument("--time-limit", type=float, default=None)

    sp = sub.add_parser("compile", help="build the augmented task")
    models(sp)
    compile_opts(sp)
    sp.add_argument("--out-dir", help="write the compiled task as PDDL here")
    sp.add_argument("--diff", help="write the model diff as JSON ('-' for stdout)")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("solve", help="find a self-explaining plan")
    models(sp)
    compile_opts(sp)
    search_opts(sp)
    sp.add_argument("--mode", choices=["valid", "optimal", "penalty"], default="optimal")
    sp.add_argument("--penalty", type=_fraction, default=None,
                    help="penalty weight (default: twice the largest action cost)")
    sp.add_argument("--json", help="write the solution as JSON ('-' for stdout)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("baseline", help="model-space search baseline")
    models(sp)
    compile_opts(sp)
    search_opts(sp)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("verify", help="check a solution JSON against both models")
    models(sp)
    sp.add_argument("--solution", required=True)
    sp.add_argument("--optimal", action="store_true",
                    help="also require optimality in the updated human model")
    sp.add_argument("--time-limit", type=float, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("perturb", help="derive a random mental model")
    models(sp, human=False)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_perturb)

    sp = sub.add_parser("bench", help="run the mini benchmark suite")
    sp.add_argument("--domains", nargs="*", help="domain:problem names (default: all)")
    sp.add_argument("--updates", type=int, default=10)
    sp.add_argument("--variants", type=int, default=3)
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--expl-factor", type=_fraction, default=Fraction(2))
    sp.add_argument("--ordering", choices=["free", "before-first-use", "prefix"],
                    default="prefix")
    sp.add_argument("--heuristic", choices=["blind", "hmax"], default="hmax")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--csv", help="write per-run rows here")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("demo-usar", help="the search-and-rescue walkthrough")
    sp.add_argument("--time-limit", type=float, default=10.0)
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("oracle", help=argparse.SUPPRESS)
    models(sp)
    compile_opts(sp)
    sp.add_argument("--what", choices=["min-cost", "mce", "delta"], default="min-cost")
    sp.add_argument("--plan", help="plan file, one action per line (for mce)")
    sp.add_argument("--cost-cap", type=_fraction, default=Fraction(100))
    sp.set_defaults(func=cmd_oracle)
    return p


def _apply_config(parser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config:
        values = _load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for k, v in values.items():
            if k not in known:
                raise InputError(f"unknown config key {k!r}")
            act = known[k]
            if act.nargs in (0,):   # store_true flags
                defaults[k] = v.strip().lower() in ("1", "true", "yes", "on")
            elif act.nargs is not None and act.nargs not in ("?",):
                defaults[k] = [act.type(x) if act.type else x for x in v.split()]
            else:
                defaults[k] = act.type(v) if act.type else v
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    seed = os.environ.get("EA_PLAN_SEED")
    if seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(seed)
        except ValueError:
            raise InputError(f"EA_PLAN_SEED must be an integer, got {seed!r}")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (InputError, OSError, configparser.Error) as exc:
        print(f"ea-plan: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, OracleCapExceeded, *INPUT_ERRORS) as exc:
        print(f"ea-plan: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance checks, one per criterion.

Each check returns (ok, detail).  Under pytest every check is a test and
its pass/fail line is printed in the terminal summary; run this file as a
script to print the lines directly.  The benchmark and the toy suite are
built once and shared.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from functools import cache
from pathlib import Path

import pytest

from eaplan.bench import BenchConfig, data_path, load_bundled, load_pair, run_bench, \
    summarize, toy_suite, write_csv
from eaplan.baseline import model_space_search
from eaplan.compile import CompileConfig, compile_ea, extract_solution, size_bounds, \
    verify_solution
from eaplan.grounding import applicable, ground_pair, mask, successor
from eaplan.oracle import h_star_table, mce, min_solution_cost, optimal_cost_oracle, \
    robot_optimal_plans
from eaplan.perturb import perturb_model
from eaplan.planner import Status, astar, hmax
from eaplan.solve import SolveConfig, SolveMode, agent_optimal_costs, delta_lower_bound, \
    solve_ea
from eaplan.updates import diff_models
from eaplan.usar import load_usar, usar_runs

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:          # run as a script
    ACCEPTANCE_LINES = []

RESULTS_DIR = Path(__file__).resolve().parent.parent / "results"
TOY_COUNT = 30
FUZZ_PLANS = 500
ADMISSIBILITY_SAMPLES = 1000

ROUTE = ["move_p1_p2", "move_p2_p3", "move_p3_p4", "move_p4_p11", "move_p11_p13",
         "move_p13_p14", "move_p14_p18", "move_p18_p17"]
DOOR = ["move_p1_p7", "move_p7_p8", "opendoor_p8_d1", "movethroughdoor_p8_p9_d1",
        "move_p9_p10", "move_p10_p13", "move_p13_p14", "move_p14_p18", "move_p18_p17"]
GOLDEN = {
    "explanation cost 1": ["explain_mup_init__clear_p2_p3",
                           "explain_mum_init__clear_p16_p17"] + ROUTE,
    "explanation cost 100": ["explain_mum_init__clear_p16_p17"] + DOOR,
    "explanation cost 100, optimality as penalty": DOOR,
}


def _record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@cache
def _toys():
    return toy_suite(TOY_COUNT, seed=0)


@cache
def _bench():
    rows = run_bench(BenchConfig(time_limit=60.0))
    RESULTS_DIR.mkdir(exist_ok=True)
    write_csv(rows, RESULTS_DIR / "bench.csv")
    write_csv([r for r in rows if r.domain == "elevator"], RESULTS_DIR / "elevator.csv")
    return rows


# ---------------------------------------------------------------------------

def check_usar_golden():
    t0 = time.perf_counter()
    runs = usar_runs(time_limit=10.0)
    total = time.perf_counter() - t0
    bad = []
    for run in runs:
        got = [] if run.solution is None else \
            [a for a in run.solution.augmented_plan if not a.startswith("ea__")]
        if got != GOLDEN[run.label] or run.result.wall_time >= 10:
            bad.append(run.label)
    return not bad and total < 10, \
        f"{len(runs) - len(bad)}/3 exact sequences, {total:.2f}s for all three"


def _fuzz_instances():
    robot, human = load_usar()
    out = [("usar", robot, human, CompileConfig()),
           ("usar-exec", robot, human, CompileConfig(stage="execute", ordering="prefix"))]
    for i, (d, p) in enumerate([("blocksworld", "p01"), ("gripper", "p01"),
                                ("elevator", "p01"), ("driverlog", "p02"),
                                ("satellite", "p01")]):
        r = load_bundled(d, p)
        # free interleaving is left out: explaining an action after it ran
        # can yield unsound plans (see test_compile.test_free_ordering_counterexample)
        ordering = ["before-first-use", "prefix"][i % 2]
        stage = "execute" if i % 3 else "propose"
        out.append((f"{d}-{p}", r, perturb_model(r, 4, 100 + i),
                    CompileConfig(ordering=ordering, stage=stage)))
    return out


def check_soundness_fuzz():
    rng = random.Random(0)
    instances = [(n, r, h, compile_ea(r, h, c)) for n, r, h, c in _fuzz_instances()]
    failures, checked, attempts = 0, 0, 0
    used = set()
    while checked < FUZZ_PLANS and attempts < 20 * FUZZ_PLANS:
        attempts += 1
        name, robot, human, aug = instances[attempts % len(instances)]
        task = aug.task
        state, prefix = task.init_state, []
        for _ in range(rng.randint(1, 12)):
            moves = [a for a in task.actions if applicable(state, a)]
            if not moves:
                break
            a = rng.choice(moves)
            state = successor(state, a)
            prefix.append(a.name)
        res = astar(task, "hmax", start=state)
        if not res.solved:
            continue
        plan = prefix + res.plan
        checked += 1
        used.add(name)
        sol = extract_solution(aug, plan)
        if not verify_solution(robot, human, sol, diff=aug.diff).valid:
            failures += 1
    ok = checked >= FUZZ_PLANS and failures == 0 and len(used) >= 5
    return ok, f"{checked} plans over {len(used)} instances, {failures} failures " \
        f"(before-first-use and prefix orderings)"


def check_completeness():
    toys = _toys()
    bad = []
    for inst in toys:
        cc = CompileConfig()
        sol, res = solve_ea(inst.robot, inst.human, SolveMode.valid(), SolveConfig(cc))
        best = min_solution_cost(inst.robot, inst.human, cc)
        got = None if sol is None else sol.cost
        want = None if best is None else best[0]
        if got != want:
            bad.append((inst.name, got, want))
    return not bad and len(toys) >= 30, f"{len(toys) - len(bad)}/{len(toys)} match the oracle" \
        + (f"; mismatches {bad[:3]}" if bad else "")


def check_agent_optimal():
    toys = _toys()
    violations = []
    for inst in toys:
        r, h = inst.robot, inst.human
        diff = diff_models(r, h)
        table = agent_optimal_costs(diff, delta_lower_bound(r))
        cc = CompileConfig(cost_table=table)
        sol, _ = solve_ea(r, h, SolveMode.optimal(), SolveConfig(cc), diff)
        if sol is None:
            violations.append((inst.name, "unsolved"))
            continue
        if sol.task_cost != optimal_cost_oracle(r):
            violations.append((inst.name, "a"))
        E = mce(r, h, sol.plan, cc)
        e_cost = None if E is None else sum((cc.cost_of(u) for u in E), Fraction(0))
        if e_cost != sol.explanation_cost:
            violations.append((inst.name, "b"))
        for p in robot_optimal_plans(r):
            E2 = mce(r, h, p, cc)
            if E2 is not None and sum((cc.cost_of(u) for u in E2), Fraction(0)) \
                    < sol.explanation_cost:
                violations.append((inst.name, "c"))
                break
    return not violations, f"{len(toys)} instances, {len(violations)} violations" \
        + (f" {violations[:3]}" if violations else "")


def check_admissibility():
    tasks = []
    for inst in _toys():
        tasks += [inst.robot, inst.human]
    tasks = list({id(t): t for t in tasks}.values())
    mismatched = sum(astar(t, "hmax").cost != astar(t, "blind").cost for t in tasks)
    rng = random.Random(0)
    tables = [(t, list(h_star_table(t).items())) for t in tasks]
    tables = [x for x in tables if x[1]]
    over = 0
    for _ in range(ADMISSIBILITY_SAMPLES):
        t, table = rng.choice(tables)
        s, hstar = rng.choice(table)
        if hmax(t, mask(s)) > hstar:
            over += 1
    return mismatched == 0 and over == 0, \
        f"{len(tasks)} tasks, {mismatched} cost mismatches; " \
        f"{ADMISSIBILITY_SAMPLES} states, {over} with h_max > h*"


def _witness():
    w = lambda f: data_path("witness", f)
    return ground_pair(load_pair(w("robot-domain.pddl"), w("problem.pddl")),
                       load_pair(w("human-domain.pddl"), w("problem.pddl")))


def check_dominance():
    s = summarize(_bench())
    robot, human = _witness()
    (u,) = diff_models(robot, human).updates
    cc = CompileConfig(cost_table={u: None})
    b, bres = model_space_search(robot, human, cc)
    c, cres = solve_ea(robot, human, SolveMode.optimal(), SolveConfig(cc))
    witness = b is None and bres.status is Status.APPROXIMATION_FAILURE and c is not None
    ok = not s["dominance_violations"] and s["co_solved"] > 0 and witness
    return ok, f"{s['co_solved']} co-solved, {len(s['dominance_violations'])} violations; " \
        f"witness baseline={bres.status.value}, compilation={cres.status.value}"


def check_elevator_trend():
    s = summarize(_bench())["by_domain"]["elevator"]
    c, b = s["compilation"], s["baseline"]
    ok = c["solved"] >= b["solved"] and c["mean_runtime"] < b["mean_runtime"] \
        and (RESULTS_DIR / "elevator.csv").exists()
    return ok, f"coverage {c['solved']}/{c['instances']} vs {b['solved']}/{b['instances']}, " \
        f"mean runtime {c['mean_runtime']:.3f}s vs {b['mean_runtime']:.3f}s, " \
        f"CSV in results/"


def check_size_bounds():
    pairs = [(r, h) for _, r, h, _ in _fuzz_instances()]
    pairs += [(i.robot, i.human) for i in _toys()]
    pairs.append(_witness())
    n, bad = 0, 0
    for r, h in pairs:
        for ordering in ("free", "before-first-use", "prefix"):
            for stage in ("propose", "execute"):
                s = size_bounds(compile_ea(r, h, CompileConfig(ordering=ordering, stage=stage)))
                n += 1
                bad += s["fluents"] > s["fluent_bound"] or s["actions"] > s["action_bound"]
    return bad == 0, f"{n} compiles, {bad} over a bound"


CHECKS = [
    (1, "USAR golden plans", check_usar_golden),
    (2, "soundness (fuzzed augmented plans)", check_soundness_fuzz),
    (3, "completeness against the oracle", check_completeness),
    (4, "agent-optimal explanations", check_agent_optimal),
    (5, "admissibility of h_max", check_admissibility),
    (6, "baseline dominance and incompleteness witness", check_dominance),
    (7, "elevator trend", check_elevator_trend),
    (8, "compilation size", check_size_bounds),
]


@pytest.mark.parametrize("n,title,check", CHECKS, ids=[f"c{n}" for n, _, _ in CHECKS])
def test_criterion(n, title, check):
    ok, detail = check()
    _record(n, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, title, check in CHECKS:
        ok, detail = check()
        _record(n, title, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)

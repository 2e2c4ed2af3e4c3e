"""Benchmark harness and bundled instance suites.

``run_bench`` perturbs each bundled robot model into a few mental models,
then runs the compilation approach (optimal mode) and the model-space
search baseline on every (domain, variant, problem) triple.  Runtimes of
unsolved runs count at the time limit when averaging.
"""

from __future__ import annotations

import csv
import io
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .baseline import model_space_search
from .compile import CompileConfig
from .grounding import PlanningTask, ground, ground_pair
from .oracle import OracleCapExceeded, mce, reachable_states, robot_optimal_plans
from .pddl import LiftedDomain, LiftedProblem, parse_domain, parse_problem
from .perturb import perturb_model
from .planner import HeuristicKind, Limits, Status
from .solve import SolveConfig, solve_ea
from .updates import diff_models

__all__ = [
    "CSV_COLUMNS", "MINI_SUITE", "TOY_PROBLEMS", "BenchConfig", "BenchRow",
    "ToyInstance", "data_path", "load_bundled", "load_pair", "toy_suite",
    "run_instance", "run_bench", "summarize", "write_csv",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("domain", "variant", "problem", "method", "status", "cost",
               "expl_cost", "task_cost", "runtime_s", "expanded")

MINI_SUITE = {
    "blocksworld": ["p01", "p02"],
    "gripper": ["p01", "p02"],
    "driverlog": ["p01", "p02"],
    "elevator": ["p01", "p02", "p03", "p04", "p05"],
    "satellite": ["p01", "p02"],
}

#: fewer updates where the domains have few perturbable slots
UPDATES_OVERRIDE = {"gripper": 5, "driverlog": 5}

TOY_PROBLEMS = [("blocksworld", "p01"), ("gripper", "p01"), ("elevator", "p01"),
                ("elevator", "p03"), ("driverlog", "p02"), ("satellite", "p01")]


def data_path(*parts: str) -> Path:
    return Path(__file__).parent.joinpath("data", *parts)


def load_pair(domain_file, problem_file) -> tuple[LiftedDomain, LiftedProblem]:
    dom = parse_domain(Path(domain_file).read_text())
    return dom, parse_problem(Path(problem_file).read_text(), dom)


def load_bundled(domain: str, problem: str) -> PlanningTask:
    dom, prob = load_pair(data_path(domain, "domain.pddl"),
                          data_path(domain, f"{problem}.pddl"))
    return ground(dom, prob)


@dataclass
class ToyInstance:
    name: str
    robot: PlanningTask
    human: PlanningTask


def toy_suite(count: int = 30, seed: int = 0, max_diff: int = 6,
              state_cap: int = 10_000) -> list[ToyInstance]:
    """Small perturbed instances where the robot's optimal plan needs explaining.

    Problems are cycled; a candidate is kept when the first robot-optimal
    plan has a non-empty minimal explanation, so the suite is not dominated
    by mental models that already agree with the robot on what to do.
    """
    robots = {p: load_bundled(*p) for p in TOY_PROBLEMS}
    for (d, p), t in robots.items():
        if len(reachable_states(t, state_cap)) > state_cap:
            raise OracleCapExceeded(f"{d}/{p} is too large for the toy suite")
    first_plan = {p: robot_optimal_plans(t)[0] for p, t in robots.items()}
    rng = random.Random(seed)
    out: list[ToyInstance] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not build the toy suite")
        key = TOY_PROBLEMS[len(out) % len(TOY_PROBLEMS)]
        n = rng.randint(1, max_diff)
        s = rng.randrange(2**31)
        human = perturb_model(robots[key], n, s)
        if not mce(robots[key], human, first_plan[key]):
            continue
        out.append(ToyInstance(f"{key[0]}-{key[1]}-n{n}-s{s}", robots[key], human))
    return out


@dataclass
class BenchConfig:
    domains: list[tuple[str, str]] = field(
        default_factory=lambda: [(d, p) for d, ps in MINI_SUITE.items() for p in ps])
    updates_per_variant: int = 10
    variants_per_domain: int = 3
    time_limit: float = 60.0
    expl_cost_factor: Fraction = Fraction(2)
    ordering: str = "prefix"
    heuristic: str = "hmax"
    seed: int = 0
    workers: int = 1
    methods: tuple[str, ...] = ("compilation", "baseline")


@dataclass
class BenchRow:
    domain: str
    variant: int
    problem: str
    method: str
    status: str
    cost: Fraction | None
    expl_cost: Fraction | None
    task_cost: Fraction | None
    runtime_s: float
    expanded: int

    def as_csv(self) -> list:
        def f(x):
            return "" if x is None else str(x)
        return [self.domain, self.variant, self.problem, self.method, self.status,
                f(self.cost), f(self.expl_cost), f(self.task_cost),
                f"{self.runtime_s:.4f}", self.expanded]


def _variant_seed(cfg_seed: int, domain: str, variant: int, problem: str) -> int:
    return random.Random(f"{cfg_seed}:{domain}:{variant}:{problem}").randrange(2**31)


def run_instance(domain_file, problem_file, domain: str, problem: str, variant: int,
                 cfg: BenchConfig) -> list[BenchRow]:
    """Both methods on one perturbed instance; failures become rows, never exceptions."""
    rows = []
    try:
        robot = ground(*load_pair(domain_file, problem_file))
        n = UPDATES_OVERRIDE.get(domain, cfg.updates_per_variant)
        human = perturb_model(robot, n, _variant_seed(cfg.seed, domain, variant, problem))
        diff = diff_models(robot, human)
        unit = cfg.expl_cost_factor * max(Fraction(a.cost) for a in robot.actions)
        cc = CompileConfig(explanation_cost=unit, ordering=cfg.ordering)
    except Exception as exc:   # bad input: record and move on
        log.error("%s/%s variant %d: %s", domain, problem, variant, exc)
        return [BenchRow(domain, variant, problem, m, "error", None, None, None,
                         cfg.time_limit, 0) for m in cfg.methods]
    for method in cfg.methods:
        t0 = time.perf_counter()
        try:
            if method == "compilation":
                sol, res = solve_ea(robot, human, "optimal",
                                    SolveConfig(cc, cfg.heuristic, Limits(cfg.time_limit)),
                                    diff)
            else:
                sol, res = model_space_search(robot, human, cc, Limits(cfg.time_limit),
                                              cfg.heuristic, diff)
            status = res.status.value
            expanded = res.expanded
        except Exception as exc:
            log.error("%s on %s/%s variant %d failed: %s", method, domain, problem,
                      variant, exc)
            sol, status, expanded = None, "error", 0
        rt = time.perf_counter() - t0
        if sol is None:
            rows.append(BenchRow(domain, variant, problem, method, status, None, None,
                                 None, max(rt, cfg.time_limit), expanded))
        else:
            rows.append(BenchRow(domain, variant, problem, method, status, sol.cost,
                                 sol.explanation_cost, sol.task_cost, rt, expanded))
    return rows


def run_bench(cfg: BenchConfig, out_csv: str | Path | None = None) -> list[BenchRow]:
    jobs = []
    for domain, problem in cfg.domains:
        if Path(domain).suffix == ".pddl":
            dfile, pfile = Path(domain), Path(problem)
            dname, pname = dfile.parent.name or dfile.stem, pfile.stem
        else:
            dfile, pfile = data_path(domain, "domain.pddl"), data_path(domain, f"{problem}.pddl")
            dname, pname = domain, problem
        for v in range(cfg.variants_per_domain):
            jobs.append((str(dfile), str(pfile), dname, pname, v, cfg))
    rows: list[BenchRow] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            for part in ex.map(run_instance, *zip(*jobs)):
                rows.extend(part)
    else:
        for job in jobs:
            rows.extend(run_instance(*job))
    if out_csv is not None:
        write_csv(rows, out_csv)
    return rows


def write_csv(rows: list[BenchRow], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.as_csv())
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def summarize(rows: list[BenchRow]) -> dict:
    """Coverage and mean runtime per (domain, method), plus the dominance check."""
    out: dict = {"by_domain": {}, "dominance_violations": []}
    for r in rows:
        s = out["by_domain"].setdefault(r.domain, {}).setdefault(
            r.method, {"instances": 0, "solved": 0, "runtime": 0.0})
        s["instances"] += 1
        s["solved"] += r.status == Status.SOLVED.value
        s["runtime"] += r.runtime_s
    for d in out["by_domain"].values():
        for s in d.values():
            s["mean_runtime"] = s.pop("runtime") / s["instances"]
    pairs: dict = {}
    for r in rows:
        pairs.setdefault((r.domain, r.variant, r.problem), {})[r.method] = r
    for key, m in sorted(pairs.items()):
        a, b = m.get("compilation"), m.get("baseline")
        if a and b and a.cost is not None and b.cost is not None and a.cost > b.cost:
            out["dominance_violations"].append(key)
    out["co_solved"] = sum(1 for m in pairs.values()
                           if all(x.cost is not None for x in m.values()) and len(m) > 1)
    return out

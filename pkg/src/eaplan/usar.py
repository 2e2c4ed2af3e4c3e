"""The urban search-and-rescue walkthrough.

A robot at P1 must reach P17.  Its map and the commander's map disagree in
three places: the commander thinks P2-P3 is blocked, believes P16-P17 is
open and thinks the door at P8 is locked.  The demo solves the same pair
under three settings and prints the augmented plans.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

from .bench import data_path, load_pair
from .compile import CompileConfig, EASolution
from .grounding import PlanningTask, ground_pair
from .planner import Limits, SearchResult
from .solve import SolveConfig, SolveMode, solve_ea

__all__ = ["DemoRun", "load_usar", "usar_runs", "run_usar_demo"]


@dataclass
class DemoRun:
    label: str
    mode: SolveMode
    explanation_cost: Fraction
    solution: EASolution | None
    result: SearchResult

    @property
    def explanatory_steps(self) -> list[str]:
        if self.solution is None:
            return []
        return [a for a in self.solution.augmented_plan if a.startswith("explain_")]


def load_usar() -> tuple[PlanningTask, PlanningTask]:
    dom_file = data_path("usar", "domain.pddl")
    robot = load_pair(dom_file, data_path("usar", "robot.pddl"))
    human = load_pair(dom_file, data_path("usar", "human.pddl"))
    return ground_pair(robot, human)


def usar_runs(time_limit: float | None = 10.0) -> list[DemoRun]:
    robot, human = load_usar()
    settings = [
        ("explanation cost 1", SolveMode.optimal(), Fraction(1)),
        ("explanation cost 100", SolveMode.optimal(), Fraction(100)),
        ("explanation cost 100, optimality as penalty", SolveMode.penalty(), Fraction(100)),
    ]
    runs = []
    for label, mode, cost in settings:
        cfg = SolveConfig(CompileConfig(explanation_cost=cost, ordering="prefix",
                                        stage="execute"),
                          limits=Limits(time_limit))
        sol, res = solve_ea(robot, human, mode, cfg)
        runs.append(DemoRun(label, mode, cost, sol, res))
    return runs


def run_usar_demo(out: TextIO | None = None, time_limit: float | None = 10.0) -> list[DemoRun]:
    """Print the three USAR outcomes and return them."""
    out = out or sys.stdout
    runs = usar_runs(time_limit)
    for run in runs:
        print(f"== {run.label} ({run.mode})", file=out)
        if run.solution is None:
            print(f"   no plan: {run.result.status.value}", file=out)
            continue
        sol = run.solution
        print(f"   objective {run.result.cost}  task cost {sol.task_cost}  "
              f"explanation cost {sol.explanation_cost}  "
              f"time {run.result.wall_time:.3f}s", file=out)
        print("   explanation: " + (", ".join(u.describe() for u in sorted(sol.explanation))
                                    or "none"), file=out)
        steps = [a for a in sol.augmented_plan if not a.startswith("ea__")]
        print("   plan: " + " -> ".join(steps), file=out)
    return runs

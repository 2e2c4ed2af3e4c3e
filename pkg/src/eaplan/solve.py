"""Solving compiled expectation-aware tasks.

Three regimes:

* ``valid``: the cheapest augmented plan; its task-level part is valid in
  the robot model and in the updated human model.
* ``optimal``: the goal test additionally requires the task-level part to
  be optimal in the updated human model.  The inner optimality check is
  memoized by the explanation, since it only depends on it.
* ``penalty``: a goal whose task-level part is not optimal for the human is
  still accepted, at an extra cost ``weight``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping

from .compile import (AugmentedTask, CompileConfig, EASolution, compile_ea,
                      extract_solution)
from .grounding import PlanningTask, validate_plan
from .planner import (HeuristicKind, Limits, SearchLimitReached, SearchResult,
                      Status, astar, optimal_cost)
from .updates import ModelDiff, ModelUpdate, apply_updates

__all__ = [
    "SolveMode", "SolveConfig", "OptimalityOracle", "DeltaBound", "solve_ea",
    "solve_augmented", "optimality_test", "delta_lower_bound", "agent_optimal_costs",
]

log = logging.getLogger(__name__)

MODES = ("valid", "optimal", "penalty")


@dataclass(frozen=True)
class SolveMode:
    kind: str = "valid"
    weight: Fraction | None = None

    def __post_init__(self):
        if self.kind not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.weight is not None and Fraction(self.weight) <= 0:
            raise ValueError("penalty weight must be positive")

    @classmethod
    def valid(cls) -> "SolveMode":
        return cls("valid")

    @classmethod
    def optimal(cls) -> "SolveMode":
        return cls("optimal")

    @classmethod
    def penalty(cls, weight=None) -> "SolveMode":
        return cls("penalty", None if weight is None else Fraction(weight))

    def __str__(self) -> str:
        return self.kind if self.weight is None else f"{self.kind}({self.weight})"


@dataclass
class SolveConfig:
    compile: CompileConfig = field(default_factory=CompileConfig)
    heuristic: HeuristicKind | str = HeuristicKind.HMAX
    limits: Limits = field(default_factory=Limits)
    inner_share: float = 0.25      # share of the time limit for each optimality test
    memoize: bool = True
    prune: bool = True             # bound task cost once the explanation is final
    inner_heuristic: HeuristicKind | str = HeuristicKind.HMAX
    floor: bool = True             # robot optimum as estimate before the first task step


class OptimalityOracle:
    """Answers "is this plan optimal in M_H + E?" with a memo keyed on E."""

    def __init__(self, human: PlanningTask, limits: Limits | None = None,
                 memoize: bool = True,
                 heuristic: HeuristicKind | str = HeuristicKind.HMAX):
        self.human = human
        self.heuristic = heuristic
        self.limits = limits or Limits()
        self.memoize = memoize
        self.memo: dict[frozenset, Fraction | None] = {}
        self.searches = 0
        self.indeterminate = 0

    def optimum(self, E: frozenset[ModelUpdate]) -> Fraction | None:
        """Optimal cost of M_H + E; None if unsolvable or the search gave up."""
        if self.memoize and E in self.memo:
            return self.memo[E]
        self.searches += 1
        try:
            opt = optimal_cost(apply_updates(self.human, E), self.limits, self.heuristic)
        except SearchLimitReached as exc:
            log.warning("optimality test for %d updates inconclusive (%s); "
                        "treated as failure", len(E), exc.status.value)
            self.indeterminate += 1
            opt = None
        if self.memoize:
            self.memo[E] = opt
        return opt

    def test(self, E: frozenset[ModelUpdate], plan) -> bool:
        rep = validate_plan(apply_updates(self.human, E), plan)
        if not rep.valid:
            return False
        opt = self.optimum(frozenset(E))
        return opt is not None and rep.total_cost == opt


def optimality_test(human: PlanningTask, E, plan, limits: Limits | None = None) -> bool:
    """True iff ``plan`` is an optimal plan of the human model updated with E."""
    return OptimalityOracle(human, limits).test(frozenset(E), plan)


def solve_augmented(aug: AugmentedTask, mode: SolveMode | str = "valid",
                    cfg: SolveConfig | None = None
                    ) -> tuple[EASolution | None, SearchResult]:
    cfg = cfg or SolveConfig()
    mode = SolveMode(mode) if isinstance(mode, str) else mode
    task = aug.task
    floor = _pre_start_floor(aug, cfg.limits) if cfg.floor else None
    if mode.kind == "valid":
        res = astar(task, cfg.heuristic, cfg.limits, floor=floor)
        return (extract_solution(aug, res.plan) if res.solved else None), res

    inner = cfg.limits.fraction(cfg.inner_share)
    oracle = OptimalityOracle(aug.human, Limits(inner.time), cfg.memoize,
                              cfg.inner_heuristic)
    weight = mode.weight
    if mode.kind == "penalty" and weight is None:
        weight = 2 * max(Fraction(a.cost) for a in aug.robot.actions)
    roles = {a.name: a.role for a in task.actions}
    by_name = task.action_index

    def accept(state, path, g, aux):
        E = aug.explained(state)
        D = [by_name[n].name for n in path if roles[n] == "task"]
        if oracle.test(E, D):
            return Fraction(0)
        return weight if mode.kind == "penalty" else None

    prune = _final_explanation_prune(aug, oracle) \
        if cfg.prune and mode.kind == "optimal" else None
    res = astar(task, cfg.heuristic, cfg.limits, accept=accept, prune=prune,
                floor=floor, aux_cost=lambda a: a.cost if a.role == "explanatory" else 0)
    res.info.update(optimality_searches=oracle.searches,
                    indeterminate=oracle.indeterminate)
    if not res.solved:
        return None, res
    sol = extract_solution(aug, res.plan)
    res.info["penalized"] = res.cost != sol.cost
    return sol, res


def _pre_start_floor(aug: AugmentedTask, limits: Limits):
    """Before any task action has run, the rest of the plan still has to
    contain a robot plan from the robot's initial state, so its cost is at
    least the robot's optimum."""
    if not aug.robot.actions:
        return None
    try:
        robot_opt = optimal_cost(aug.robot, limits.fraction(0.1))
    except SearchLimitReached:
        return None
    if robot_opt is None:
        return None

    def floor(state):
        return 0 if aug.started(state) else robot_opt

    return floor


def _final_explanation_prune(aug: AugmentedTask, oracle: OptimalityOracle):
    """Prune rule for prefix ordering in the proposal stage.

    There the explanation is fixed as soon as the first task action runs, so
    a node can only lead to an accepted goal if its task cost so far plus
    the (admissible) estimate stays within the optimum of M_H + E, and that
    optimum is not below the robot's own.  Returns None when the rule does
    not apply.
    """
    if aug.cfg.ordering != "prefix" or aug.stage != "propose":
        return None
    if any(a.cost != aug.human.action_index[a.name].cost for a in aug.robot.actions):
        return None
    try:
        robot_opt = optimal_cost(aug.robot, oracle.limits)
    except SearchLimitReached:
        return None
    if robot_opt is None:
        return None

    def prune(state, g, aux, h):
        if not aug.started(state):
            return False
        opt = oracle.optimum(aug.explained(state))
        return opt is None or opt < robot_opt or g - aux + h > opt

    return prune


def solve_ea(robot: PlanningTask, human: PlanningTask,
             mode: SolveMode | str = "valid", cfg: SolveConfig | None = None,
             diff: ModelDiff | None = None
             ) -> tuple[EASolution | None, SearchResult]:
    """Compile the pair and solve it under ``mode``."""
    cfg = cfg or SolveConfig()
    aug = compile_ea(robot, human, cfg.compile, diff)
    return solve_augmented(aug, mode, cfg)


@dataclass(frozen=True)
class DeltaBound:
    value: Fraction
    exact: bool = False


def delta_lower_bound(task: PlanningTask) -> DeltaBound:
    """Certified lower bound on the gap between distinct plan costs.

    Every plan cost is an integer combination of action costs, so any two
    distinct plan costs differ by at least the gcd of the action costs.
    """
    costs = [Fraction(a.cost) for a in task.actions if a.cost > 0]
    if not costs:
        if not task.actions:
            raise ValueError("task has no actions")
        return DeltaBound(Fraction(0))
    den = 1
    for c in costs:
        den = den * c.denominator // gcd(den, c.denominator)
    g = 0
    for c in costs:
        g = gcd(g, int(c * den))
    return DeltaBound(Fraction(g, den))


def agent_optimal_costs(diff: ModelDiff, bound: DeltaBound
                        ) -> Mapping[ModelUpdate, Fraction]:
    """Uniform explanation costs whose total over the whole diff stays below the bound."""
    if not len(diff):
        return {}
    c = Fraction(bound.value) / (len(diff) + 1)
    return {u: c for u in diff.updates}

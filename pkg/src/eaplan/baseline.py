"""Model-space search baseline.

Best-first search over subsets of model updates, cheapest explanation
first.  Each node plans once, optimally, in the updated human model and the
search stops at the first node whose plan costs as much as the robot's
optimum and is executable in the robot model.  Because only one optimal
plan is looked at per node, the search can miss solutions; exhausting the
subsets without success is reported as an approximation failure.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction

from .compile import CompileConfig, EASolution
from .grounding import PlanningTask, validate_plan
from .planner import (HeuristicKind, Limits, SearchResult, Status, astar,
                      optimal_cost, SearchLimitReached)
from .updates import ModelDiff, ModelUpdate, apply_updates, diff_models

__all__ = ["MssNode", "model_space_search"]


@dataclass
class MssNode:
    updates: frozenset[ModelUpdate]
    candidate_plan: list[str] | None = None
    cost: Fraction = Fraction(0)


def model_space_search(robot: PlanningTask, human: PlanningTask,
                       costs: CompileConfig | None = None,
                       limits: Limits | None = None,
                       heuristic: HeuristicKind | str = HeuristicKind.HMAX,
                       diff: ModelDiff | None = None
                       ) -> tuple[EASolution | None, SearchResult]:
    costs = costs or CompileConfig()
    limits = limits or Limits()
    diff = diff_models(robot, human) if diff is None else diff
    t0 = time.perf_counter()
    deadline = None if limits.time is None else t0 + limits.time
    result = SearchResult(None, None)

    def remaining() -> Limits:
        left = None if deadline is None else max(deadline - time.perf_counter(), 0.0)
        return Limits(left, limits.nodes, limits.memory)

    def done(status: Status, sol: EASolution | None = None):
        result.status = status
        result.wall_time = time.perf_counter() - t0
        if sol is not None:
            result.plan = list(sol.plan)
            result.cost = sol.cost
        return sol, result

    try:
        target = optimal_cost(robot, remaining(), heuristic)
    except SearchLimitReached as exc:
        return done(exc.status)
    if target is None:
        return done(Status.UNSOLVABLE)
    ups = [u for u in diff.updates if costs.cost_of(u) is not None]
    ups.sort(key=str)
    price = [costs.cost_of(u) for u in ups]
    names = [str(u) for u in ups]
    # (explanation cost, canonical strings, last index, subset indices)
    frontier = [(Fraction(0), (), -1, ())]
    while frontier:
        c, _, last, idx = heapq.heappop(frontier)
        if deadline is not None and time.perf_counter() > deadline:
            return done(Status.TIMEOUT)
        E = frozenset(ups[i] for i in idx)
        updated = apply_updates(human, E)
        res = astar(updated, heuristic, remaining())
        result.expanded += res.expanded
        result.generated += res.generated
        if res.status in (Status.TIMEOUT, Status.RESOURCE_LIMIT):
            return done(res.status)
        if res.solved and res.cost == target:
            rep = validate_plan(robot, res.plan)
            if rep.valid:
                result.info["nodes"] = result.info.get("nodes", 0) + 1
                return done(Status.SOLVED,
                            EASolution(E, tuple(res.plan), c, rep.total_cost))
        result.info["nodes"] = result.info.get("nodes", 0) + 1
        for j in range(last + 1, len(ups)):
            child = idx + (j,)
            heapq.heappush(frontier, (c + price[j],
                                      tuple(sorted(names[i] for i in child)),
                                      j, child))
    return done(Status.APPROXIMATION_FAILURE)

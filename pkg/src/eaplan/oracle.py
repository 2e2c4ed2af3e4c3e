"""Brute-force ground truth for toy instances.

Nothing here uses the compiler or the A* planner.  States are frozensets of
fluent ids and successors are recomputed from the action definitions, so
the oracle stays independent of the bitmask machinery it is used to check.
Every routine has explicit caps and raises OracleCapExceeded rather than
silently returning a partial answer.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .compile import CompileConfig, EASolution
from .grounding import GroundAction, PlanningTask
from .updates import ModelDiff, ModelUpdate, apply_updates, diff_models

__all__ = [
    "OracleCapExceeded", "DeltaResult", "step", "reachable_states", "h_star_table",
    "optimal_cost_oracle", "robot_optimal_plans", "explicable_min_cost",
    "min_solution_cost", "enumerate_ea_solutions", "mce", "exact_delta", "subsets_by_cost",
]

State = frozenset


class OracleCapExceeded(RuntimeError):
    pass


def step(s: State, a: GroundAction) -> State | None:
    """Successor of s under a, or None when a is not applicable."""
    if not a.pre <= s or a.neg & s:
        return None
    if any(g in s and c not in s for g, c in a.impl):
        return None
    add, dele = set(), set()
    for e in a.effects:
        if e.condition <= s:
            add |= e.add
            dele |= e.delete
    return State((s - dele) | add)


def _goal(t: PlanningTask, s: State) -> bool:
    return t.goal <= s


def reachable_states(task: PlanningTask, cap: int = 10_000) -> set[State]:
    start = State(task.init)
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for a in task.actions:
            s2 = step(s, a)
            if s2 is not None and s2 not in seen:
                seen.add(s2)
                if len(seen) > cap:
                    raise OracleCapExceeded(f"more than {cap} reachable states")
                todo.append(s2)
    return seen


def h_star_table(task: PlanningTask, cap: int = 10_000) -> dict[State, Fraction]:
    """Perfect goal distance of every reachable state (dead ends are absent)."""
    states = reachable_states(task, cap)
    back: dict[State, list[tuple[State, Fraction]]] = {s: [] for s in states}
    for s in states:
        for a in task.actions:
            s2 = step(s, a)
            if s2 is not None:
                back[s2].append((s, Fraction(a.cost)))
    dist: dict[State, Fraction] = {}
    heap = [(Fraction(0), i, s) for i, s in enumerate(s for s in states if _goal(task, s))]
    heapq.heapify(heap)
    n = len(heap)
    while heap:
        d, _, s = heapq.heappop(heap)
        if s in dist:
            continue
        dist[s] = d
        for p, c in back[s]:
            if p not in dist:
                n += 1
                heapq.heappush(heap, (d + c, n, p))
    return dist


def _dijkstra(tasks: list[PlanningTask], cap: int) -> Fraction | None:
    """Cheapest plan valid in every task at once (product state space)."""
    names = [a.name for a in tasks[0].actions]
    acts = [[t.action_index[n] for t in tasks] for n in names]
    start = tuple(State(t.init) for t in tasks)
    best = {start: Fraction(0)}
    heap = [(Fraction(0), 0, start)]
    n = 0
    while heap:
        d, _, s = heapq.heappop(heap)
        if d > best[s]:
            continue
        if all(_goal(t, x) for t, x in zip(tasks, s)):
            return d
        for row in acts:
            nxt = []
            for a, x in zip(row, s):
                y = step(x, a)
                if y is None:
                    break
                nxt.append(y)
            else:
                s2 = tuple(nxt)
                d2 = d + Fraction(row[0].cost)
                if d2 < best.get(s2, d2 + 1):
                    best[s2] = d2
                    if len(best) > cap:
                        raise OracleCapExceeded(f"more than {cap} product states")
                    n += 1
                    heapq.heappush(heap, (d2, n, s2))
    return None


def optimal_cost_oracle(task: PlanningTask, cap: int = 10_000) -> Fraction | None:
    return _dijkstra([task], cap)


def explicable_min_cost(robot: PlanningTask, human: PlanningTask,
                        cap: int = 100_000) -> Fraction | None:
    """Cheapest plan valid in both models (robot costs)."""
    return _dijkstra([robot, human], cap)


def subsets_by_cost(updates: Iterable[ModelUpdate], costs: CompileConfig,
                    max_size: int = 20) -> list[tuple[Fraction, frozenset[ModelUpdate]]]:
    """All communicable subsets, cheapest first, ties by canonical strings."""
    ups = sorted((u for u in updates if costs.cost_of(u) is not None), key=str)
    if len(ups) > max_size:
        raise OracleCapExceeded(f"{len(ups)} updates is too many to enumerate")
    out = []
    for k in range(len(ups) + 1):
        for combo in combinations(ups, k):
            c = sum((costs.cost_of(u) for u in combo), Fraction(0))
            out.append((c, tuple(sorted(map(str, combo))), frozenset(combo)))
    out.sort(key=lambda t: (t[0], t[1]))
    return [(c, e) for c, _, e in out]


def min_solution_cost(robot: PlanningTask, human: PlanningTask,
                      costs: CompileConfig | None = None, cap: int = 100_000,
                      diff: ModelDiff | None = None
                      ) -> tuple[Fraction, frozenset[ModelUpdate]] | None:
    """Minimum of C_E(E) + C(pi) over all valid solutions <E, pi>."""
    costs = costs or CompileConfig()
    diff = diff_models(robot, human) if diff is None else diff
    best = None
    for c, E in subsets_by_cost(diff.updates, costs):
        if best is not None and c >= best[0]:
            break
        m = explicable_min_cost(robot, apply_updates(human, E), cap)
        if m is not None and (best is None or c + m < best[0]):
            best = (c + m, E)
    return best


def enumerate_ea_solutions(robot: PlanningTask, human: PlanningTask,
                           cost_cap, plan_len_cap: int,
                           costs: CompileConfig | None = None,
                           node_cap: int = 1_000_000) -> set[EASolution]:
    """Every <E, pi> within the caps with pi valid in the robot and the updated human model."""
    costs = costs or CompileConfig()
    cost_cap = Fraction(cost_cap)
    diff = diff_models(robot, human)
    out: set[EASolution] = set()
    visited = 0
    names = [a.name for a in robot.actions]
    for ce, E in subsets_by_cost(diff.updates, costs):
        if ce > cost_cap:
            break
        upd = apply_updates(human, E)
        pairs = [(robot.action_index[n], upd.action_index[n]) for n in names]

        def dfs(sr, sh, plan, g):
            nonlocal visited
            visited += 1
            if visited > node_cap:
                raise OracleCapExceeded(f"more than {node_cap} search nodes")
            if _goal(robot, sr) and _goal(upd, sh):
                out.add(EASolution(E, tuple(plan), ce, g))
            if len(plan) == plan_len_cap:
                return
            for ar, ah in pairs:
                g2 = g + Fraction(ar.cost)
                if ce + g2 > cost_cap:
                    continue
                r2 = step(sr, ar)
                if r2 is None:
                    continue
                h2 = step(sh, ah)
                if h2 is None:
                    continue
                plan.append(ar.name)
                dfs(r2, h2, plan, g2)
                plan.pop()

        dfs(State(robot.init), State(upd.init), [], Fraction(0))
    return out


def _plan_cost(task: PlanningTask, plan) -> Fraction | None:
    s = State(task.init)
    c = Fraction(0)
    for n in plan:
        a = task.action_index.get(n)
        s = None if a is None else step(s, a)
        if s is None:
            return None
        c += Fraction(a.cost)
    return c if _goal(task, s) else None


def mce(robot: PlanningTask, human: PlanningTask, plan,
        costs: CompileConfig | None = None, cap: int = 10_000
        ) -> frozenset[ModelUpdate] | None:
    """Cheapest update set making ``plan`` optimal in the updated human model.

    Returns None when no communicable subset works.
    """
    costs = costs or CompileConfig()
    for _, E in subsets_by_cost(diff_models(robot, human).updates, costs):
        upd = apply_updates(human, E)
        c = _plan_cost(upd, plan)
        if c is not None and c == optimal_cost_oracle(upd, cap):
            return E
    return None


def robot_optimal_plans(task: PlanningTask, cap: int = 10_000,
                        max_plans: int = 10_000) -> list[tuple[str, ...]]:
    """All optimal plans (every prefix of an optimal plan is itself cheapest)."""
    hs = h_star_table(task, cap)
    s0 = State(task.init)
    if s0 not in hs:
        return []
    opt = hs[s0]
    plans: list[tuple[str, ...]] = []

    def dfs(s, g, plan):
        if _goal(task, s) and g == opt:
            plans.append(tuple(plan))
            if len(plans) > max_plans:
                raise OracleCapExceeded(f"more than {max_plans} optimal plans")
        for a in task.actions:
            s2 = step(s, a)
            if s2 is None or s2 not in hs:
                continue
            g2 = g + Fraction(a.cost)
            if g2 + hs[s2] == opt and (a.cost > 0 or len(plan) < 64):
                plan.append(a.name)
                dfs(s2, g2, plan)
                plan.pop()

    dfs(s0, Fraction(0), [])
    return sorted(set(plans))


@dataclass(frozen=True)
class DeltaResult:
    value: Fraction
    optimum: Fraction
    censored: bool = False


def exact_delta(task: PlanningTask, cost_cap, node_cap: int = 200_000) -> DeltaResult | None:
    """Gap between the optimal cost and the next plan cost above it.

    Explores (state, cost so far) pairs up to ``cost_cap``.  When no
    costlier plan exists within the cap the gap is only known to exceed
    ``cost_cap - optimum`` and the result is flagged as censored.
    """
    cost_cap = Fraction(cost_cap)
    start = (State(task.init), Fraction(0))
    seen = {start}
    heap = [(Fraction(0), 0, start[0])]
    n = 0
    levels: list[Fraction] = []
    while heap:
        g, _, s = heapq.heappop(heap)
        if _goal(task, s) and (not levels or levels[-1] != g):
            levels.append(g)
            if len(levels) == 2:
                return DeltaResult(levels[1] - levels[0], levels[0])
        for a in task.actions:
            s2 = step(s, a)
            if s2 is None:
                continue
            g2 = g + Fraction(a.cost)
            if g2 > cost_cap or (s2, g2) in seen:
                continue
            seen.add((s2, g2))
            if len(seen) > node_cap:
                raise OracleCapExceeded(f"more than {node_cap} (state, cost) nodes")
            n += 1
            heapq.heappush(heap, (g2, n, s2))
    if not levels:
        return None
    return DeltaResult(cost_cap - levels[0], levels[0], censored=True)

"""Forward state-space search over grounded tasks.

A* with blind, h_max and h_add heuristics.  Costs are rationals; the search
runs on integers obtained by scaling every cost by the common denominator.

The heuristics use the delete relaxation, extended with "not f" literals so
that negative and implication preconditions are kept in relaxed form (see
Relaxation).  Conditional adds are treated as unconditional.

Ties between open nodes are broken by lower h, then by generation order
(FIFO).  Successors are generated in task action order, which the grounder
and the compiler keep sorted by name.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
import weakref
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from .grounding import GroundAction, PlanningTask, applicable, successor

__all__ = [
    "Status", "HeuristicKind", "Limits", "SearchResult", "SearchLimitReached",
    "UNREACHABLE", "astar", "hmax", "hadd", "optimal_cost", "Relaxation",
]

log = logging.getLogger(__name__)

#: heuristic value of a state from which the goal is relaxed-unreachable
UNREACHABLE = math.inf


class Status(str, Enum):
    SOLVED = "solved"
    UNSOLVABLE = "proven-unsolvable"
    TIMEOUT = "timeout"
    RESOURCE_LIMIT = "resource-limit"
    APPROXIMATION_FAILURE = "approximation-failure"


class HeuristicKind(str, Enum):
    BLIND = "blind"
    HMAX = "hmax"
    HADD = "hadd"

    @property
    def admissible(self) -> bool:
        return self is not HeuristicKind.HADD


@dataclass
class Limits:
    time: float | None = None       # seconds
    nodes: int | None = None        # expansions
    memory: int | None = None       # stored search nodes

    def fraction(self, share: float) -> "Limits":
        return Limits(None if self.time is None else self.time * share,
                      self.nodes, self.memory)


class SearchLimitReached(Exception):
    def __init__(self, status: Status):
        super().__init__(status.value)
        self.status = status


@dataclass
class SearchResult:
    plan: list[str] | None
    cost: Fraction | None
    expanded: int = 0
    generated: int = 0
    wall_time: float = 0.0
    status: Status = Status.SOLVED
    info: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


def _scale(actions: Sequence[GroundAction]) -> int:
    return lcm(1, *(Fraction(a.cost).denominator for a in actions))


class Relaxation:
    """Delete relaxation of a task, evaluated with a Dijkstra-style fixpoint.

    Fluents that occur negatively (in a negative precondition or as the
    guard of an implication) get a companion literal "not f", true when f
    is false in the evaluated state and added by every action that deletes
    f.  A negative precondition becomes that literal and an implication
    g -> c becomes the disjunction (c or not g).  Conditional effects are
    treated as unconditional.  All of this only adds ways to reach the
    goal, so h_max stays admissible.
    """

    def __init__(self, task: PlanningTask, scale: int | None = None):
        self.task = task
        self.scale = scale or _scale(task.actions)
        n = self.n = len(task.fluents)
        negated = sorted({f for a in task.actions for f in a.neg} |
                         {g for a in task.actions for g, _ in a.impl})
        self.neg_lit = {f: n + j for j, f in enumerate(negated)}
        nlit = n + len(negated)
        self.cost = [int(a.cost * self.scale) for a in task.actions]
        self.adds: list[tuple[int, ...]] = []
        self.ngroups: list[int] = []
        self.by_lit: list[list[tuple[int, int]]] = [[] for _ in range(nlit)]
        gid = 0
        for k, a in enumerate(task.actions):
            groups = [(f,) for f in a.pre]
            groups += [(self.neg_lit[f],) for f in a.neg]
            groups += [(c, self.neg_lit[g]) for g, c in a.impl]
            for grp in groups:
                for lit in grp:
                    self.by_lit[lit].append((k, gid))
                gid += 1
            self.ngroups.append(len(groups))
            dels = set()
            for e in a.effects:
                dels |= e.delete
            self.adds.append(tuple(a.relaxed_adds) +
                             tuple(self.neg_lit[f] for f in dels if f in self.neg_lit))
        self.total_groups = gid
        self.free = [k for k, m in enumerate(self.ngroups) if m == 0]
        self.goal = tuple(task.goal)

    def value(self, state: int, combine: str = "max") -> float:
        """Scaled h_max (combine="max") or h_add (combine="sum")."""
        goal = self.goal
        if not goal:
            return 0
        use_max = combine == "max"
        remaining = list(self.ngroups)
        acc = [0] * len(remaining)
        gdone = bytearray(self.total_groups)
        done: set[int] = set()
        heap: list[tuple[int, int]] = []
        s = state
        while s:
            low = s & -s
            heap.append((0, low.bit_length() - 1))
            s ^= low
        for f, lit in self.neg_lit.items():
            if not (state >> f) & 1:
                heap.append((0, lit))
        for k in self.free:
            for f in self.adds[k]:
                heap.append((self.cost[k], f))
        heapq.heapify(heap)
        goals_left = len(goal)
        goal_set = set(goal)
        hval = 0
        by_lit, adds, cost = self.by_lit, self.adds, self.cost
        while heap:
            v, f = heapq.heappop(heap)
            if f in done:
                continue
            done.add(f)
            if f in goal_set:
                hval = max(hval, v) if use_max else hval + v
                goals_left -= 1
                if goals_left == 0:
                    return hval
            for k, g in by_lit[f]:
                if gdone[g]:
                    continue
                gdone[g] = 1
                remaining[k] -= 1
                acc[k] = max(acc[k], v) if use_max else acc[k] + v
                if remaining[k] == 0:
                    c = acc[k] + cost[k]
                    for x in adds[k]:
                        if x not in done:
                            heapq.heappush(heap, (c, x))
        return UNREACHABLE


_relaxations: "weakref.WeakKeyDictionary[PlanningTask, Relaxation]" = \
    weakref.WeakKeyDictionary()


def _relaxation(task: PlanningTask) -> Relaxation:
    r = _relaxations.get(task)
    if r is None:
        r = _relaxations[task] = Relaxation(task)
    return r


def _unscale(v, scale: int):
    return UNREACHABLE if v == UNREACHABLE else Fraction(v, scale)


def hmax(task: PlanningTask, state: int | None = None):
    r = _relaxation(task)
    return _unscale(r.value(task.init_state if state is None else state, "max"), r.scale)


def hadd(task: PlanningTask, state: int | None = None):
    r = _relaxation(task)
    return _unscale(r.value(task.init_state if state is None else state, "sum"), r.scale)


#: accept(state, plan_names, g, aux) -> None to reject the goal node,
#: otherwise the extra cost charged for accepting it (0 for a clean accept)
AcceptFn = Callable[[int, list[str], Fraction, Fraction], "Fraction | None"]
#: prune(state, g, aux, h) -> True to drop a freshly generated node
PruneFn = Callable[[int, Fraction, Fraction, Fraction], bool]


def astar(task: PlanningTask, heuristic: HeuristicKind | str = HeuristicKind.HMAX,
          limits: Limits | None = None, *, accept: AcceptFn | None = None,
          aux_cost: Callable[[GroundAction], Fraction] | None = None,
          prune: PruneFn | None = None,
          floor: Callable[[int], Fraction] | None = None,
          start: int | None = None) -> SearchResult:
    """A* search; optimal whenever the heuristic is admissible.

    ``accept`` turns the goal test into a filter: rejected goal nodes are
    closed without expansion, accepted ones with a positive extra cost are
    re-queued as terminal nodes at ``g + extra``.  With ``aux_cost`` each
    node also tracks an auxiliary cost component and duplicate detection
    keys on (state, aux), so paths that split cost differently between the
    auxiliary and the remaining actions are kept apart.  ``prune`` is asked
    about every newly generated node and drops it when it returns True.
    ``floor`` is an extra admissible estimate combined with h by max.
    """
    heuristic = HeuristicKind(heuristic)
    limits = limits or Limits()
    t0 = time.perf_counter()
    deadline = None if limits.time is None else t0 + limits.time
    actions = task.actions
    scale = _scale(actions)
    costs = [int(Fraction(a.cost) * scale) for a in actions]
    aux = [int(Fraction(aux_cost(a)) * scale) for a in actions] if aux_cost else None
    relax = Relaxation(task, scale) if heuristic is not HeuristicKind.BLIND else None
    combine = "max" if heuristic is HeuristicKind.HMAX else "sum"
    hcache: dict[int, float] = {}

    def h(s: int) -> float:
        v = hcache.get(s)
        if v is None:
            v = 0 if relax is None else relax.value(s, combine)
            if floor is not None and v != UNREACHABLE:
                v = max(v, int(Fraction(floor(s)) * scale))
            hcache[s] = v
        return v

    goal_mask = task.goal_mask
    s0 = task.init_state if start is None else start
    k0 = (s0, 0) if aux else s0
    g: dict = {k0: 0}
    parent: dict = {k0: None}
    closed: set = set()
    counter = 0
    h0 = h(s0)
    expanded = generated = 0
    result = SearchResult(None, None)
    if h0 == UNREACHABLE:
        result.status = Status.UNSOLVABLE
        result.wall_time = time.perf_counter() - t0
        return result
    heap: list = [(h0, h0, 0, k0, False)]

    def path(key) -> list[str]:
        out = []
        while parent[key] is not None:
            key, k = parent[key]
            out.append(actions[k].name)
        out.reverse()
        return out

    def finish(status: Status, key=None, total=None) -> SearchResult:
        result.status = status
        result.expanded, result.generated = expanded, generated
        if key is not None:
            result.plan = path(key)
            result.cost = Fraction(total, scale)
        result.wall_time = time.perf_counter() - t0
        return result

    while heap:
        f, hv, _, key, terminal = heapq.heappop(heap)
        if terminal:
            return finish(Status.SOLVED, key, f)
        if key in closed:
            continue
        gk = g[key]
        if f - hv != gk:
            continue  # stale entry
        closed.add(key)
        state = key[0] if aux else key
        if state & goal_mask == goal_mask:
            if accept is None:
                return finish(Status.SOLVED, key, gk)
            a_val = key[1] if aux else 0
            extra = accept(state, path(key), Fraction(gk, scale), Fraction(a_val, scale))
            if extra is None:
                continue
            extra = int(Fraction(extra) * scale)
            if extra == 0:
                return finish(Status.SOLVED, key, gk)
            counter += 1
            heapq.heappush(heap, (gk + extra, 0, counter, key, True))
            continue
        expanded += 1
        if expanded & 255 == 1 and deadline is not None and time.perf_counter() > deadline:
            return finish(Status.TIMEOUT)
        if limits.nodes is not None and expanded > limits.nodes:
            return finish(Status.RESOURCE_LIMIT)
        if limits.memory is not None and len(g) > limits.memory:
            return finish(Status.RESOURCE_LIMIT)
        for k, a in enumerate(actions):
            if not applicable(state, a):
                continue
            s2 = successor(state, a)
            k2 = (s2, key[1] + aux[k]) if aux else s2
            if k2 in closed:
                continue
            g2 = gk + costs[k]
            old = g.get(k2)
            if old is not None and old <= g2:
                continue
            h2 = h(s2)
            if h2 == UNREACHABLE:
                continue
            if prune is not None and prune(s2, Fraction(g2, scale),
                                           Fraction(k2[1] if aux else 0, scale),
                                           Fraction(h2, scale)):
                continue
            generated += 1
            g[k2] = g2
            parent[k2] = (key, k)
            counter += 1
            heapq.heappush(heap, (g2 + h2, h2, counter, k2, False))
    return finish(Status.UNSOLVABLE)


def optimal_cost(task: PlanningTask, limits: Limits | None = None,
                 heuristic: HeuristicKind | str = HeuristicKind.HMAX) -> Fraction | None:
    """Cost of an optimal plan, or None when the task is unsolvable.

    Raises SearchLimitReached when the search hits a limit.
    """
    heuristic = HeuristicKind(heuristic)
    if not heuristic.admissible:
        raise ValueError(f"{heuristic.value} is not admissible")
    res = astar(task, heuristic, limits)
    if res.status is Status.SOLVED:
        return res.cost
    if res.status is Status.UNSOLVABLE:
        return None
    raise SearchLimitReached(res.status)

"""Grounded STRIPS tasks, transition semantics and plan validation.

States are Python ints used as bitsets over fluent ids.  A ground action
carries a conjunctive precondition, optional negative preconditions,
implication preconditions ``guard -> consequent`` (only produced by the
compiler) and a tuple of conditional effects.  All effects of an action are
evaluated against the predecessor state; deletes are applied before adds,
so an add and a delete of the same fluent resolve to the add.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .pddl import Atom, LiftedDomain, LiftedProblem, PDDLError

__all__ = [
    "Fluent", "Effect", "GroundAction", "PlanningTask", "ValidityReport",
    "InapplicableActionError", "GroundingLimitError", "mask", "bits",
    "applicable", "first_violation", "apply", "validate_plan", "ground",
    "ground_pair", "read_plan", "format_plan", "same_model", "FALSE_FLUENT",
]

FALSE_FLUENT = "ea__false"


class InapplicableActionError(Exception):
    def __init__(self, action: str, violated: str):
        super().__init__(f"{action} is not applicable: {violated}")
        self.action = action
        self.violated = violated


class GroundingLimitError(Exception):
    """Grounding produced more actions than the configured cap."""


def mask(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


@dataclass(frozen=True)
class Fluent:
    id: int
    name: str
    role: str = "task"


@dataclass(frozen=True)
class Effect:
    condition: frozenset[int] = frozenset()
    add: frozenset[int] = frozenset()
    delete: frozenset[int] = frozenset()


@dataclass(frozen=True, eq=False)
class GroundAction:
    name: str
    pre: frozenset[int] = frozenset()
    effects: tuple[Effect, ...] = ()
    cost: Fraction = Fraction(1)
    impl: tuple[tuple[int, int], ...] = ()
    neg: frozenset[int] = frozenset()
    role: str = "task"

    @cached_property
    def pre_mask(self) -> int:
        return mask(self.pre)

    @cached_property
    def neg_mask(self) -> int:
        return mask(self.neg)

    @cached_property
    def effect_masks(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((mask(e.condition), mask(e.add), mask(e.delete))
                     for e in self.effects)

    @cached_property
    def unconditional(self) -> tuple[frozenset[int], frozenset[int]]:
        """(adds, dels) of the effects without a condition."""
        adds: set[int] = set()
        dels: set[int] = set()
        for e in self.effects:
            if not e.condition:
                adds |= e.add
                dels |= e.delete
        return frozenset(adds), frozenset(dels)

    @cached_property
    def conditional(self) -> tuple[Effect, ...]:
        return tuple(e for e in self.effects if e.condition)

    @cached_property
    def relaxed_adds(self) -> frozenset[int]:
        out: set[int] = set()
        for e in self.effects:
            out |= e.add
        return frozenset(out)


@dataclass(frozen=True, eq=False)
class PlanningTask:
    fluents: tuple[Fluent, ...]
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal: frozenset[int]
    name: str = "task"
    stats: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.fluents)
        for i, f in enumerate(self.fluents):
            if f.id != i:
                raise ValueError("fluent ids must be dense and ordered")
        if any(not 0 <= i < n for i in self.init | self.goal):
            raise ValueError("init/goal reference unknown fluents")

    @cached_property
    def index(self) -> dict[str, int]:
        idx = {f.name: f.id for f in self.fluents}
        if len(idx) != len(self.fluents):
            raise ValueError("duplicate fluent names")
        return idx

    @cached_property
    def action_index(self) -> dict[str, GroundAction]:
        return {a.name: a for a in self.actions}

    @cached_property
    def init_state(self) -> int:
        return mask(self.init)

    @cached_property
    def goal_mask(self) -> int:
        return mask(self.goal)

    def state(self, names: Iterable[str]) -> int:
        return mask(self.index[n] for n in names)

    def names(self, state: int) -> set[str]:
        return {self.fluents[i].name for i in bits(state)}

    def fluent_names(self, ids: Iterable[int]) -> set[str]:
        return {self.fluents[i].name for i in ids}

    def is_goal(self, state: int) -> bool:
        return state & self.goal_mask == self.goal_mask

    def lookup(self, name: str) -> GroundAction:
        a = self.action_index.get(name)
        if a is None:
            a = self.action_index.get(_lisp_to_name(name))
        if a is None:
            raise KeyError(f"unknown action {name!r} in task {self.name}")
        return a


def applicable(state: int, action: GroundAction) -> bool:
    if state & action.pre_mask != action.pre_mask or state & action.neg_mask:
        return False
    for g, c in action.impl:
        if (state >> g) & 1 and not (state >> c) & 1:
            return False
    return True


def first_violation(task: PlanningTask, state: int, action: GroundAction) -> str | None:
    for i in sorted(action.pre):
        if not (state >> i) & 1:
            return task.fluents[i].name
    for i in sorted(action.neg):
        if (state >> i) & 1:
            return f"(not {task.fluents[i].name})"
    for g, c in action.impl:
        if (state >> g) & 1 and not (state >> c) & 1:
            return f"({task.fluents[g].name} -> {task.fluents[c].name})"
    return None


def successor(state: int, action: GroundAction) -> int:
    adds = dels = 0
    for cond, add, delete in action.effect_masks:
        if state & cond == cond:
            adds |= add
            dels |= delete
    return (state & ~dels) | adds


def apply(state: int, action: GroundAction, task: PlanningTask | None = None) -> int:
    if not applicable(state, action):
        violated = first_violation(task, state, action) if task else "precondition"
        raise InapplicableActionError(action.name, violated or "precondition")
    return successor(state, action)


@dataclass
class ValidityReport:
    executable: bool
    goal_reached: bool
    total_cost: Fraction
    failed_step: int | None = None
    failed_action: str | None = None
    violated: str | None = None
    missing_goals: tuple[str, ...] = ()
    final_state: int | None = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.executable and self.goal_reached

    def to_dict(self) -> dict:
        return {
            "valid": self.valid, "executable": self.executable,
            "goal_reached": self.goal_reached,
            "total_cost": str(self.total_cost), "failed_step": self.failed_step,
            "failed_action": self.failed_action, "violated": self.violated,
            "missing_goals": list(self.missing_goals),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def validate_plan(task: PlanningTask, plan: Sequence[str | GroundAction],
                  start: int | None = None) -> ValidityReport:
    actions = [a if isinstance(a, GroundAction) else task.lookup(a) for a in plan]
    total = sum((a.cost for a in actions), Fraction(0))
    state = task.init_state if start is None else start
    for step, a in enumerate(actions):
        if not applicable(state, a):
            return ValidityReport(False, False, total, step, a.name,
                                  first_violation(task, state, a), final_state=state)
        state = successor(state, a)
    missing = tuple(sorted(task.fluents[i].name for i in task.goal
                           if not (state >> i) & 1))
    return ValidityReport(True, not missing, total, missing_goals=missing,
                          final_state=state)


# ---------------------------------------------------------------------------
# plan files

_LISP = re.compile(r"^\(\s*([^()\s]+)((?:\s+[^()\s]+)*)\s*\)$")


def _lisp_to_name(text: str) -> str:
    m = _LISP.match(text.strip())
    if not m:
        return text.strip()
    return "_".join([m.group(1)] + m.group(2).split()).lower()


def read_plan(text: str) -> list[str]:
    plan = []
    for line in text.splitlines():
        line = line.split(";", 1)[0].strip()
        if line:
            plan.append(_lisp_to_name(line))
    return plan


def format_plan(plan: Sequence[str]) -> str:
    return "".join(f"({name})\n" for name in plan)


# ---------------------------------------------------------------------------
# grounding

@dataclass
class _GroundDef:
    pre: frozenset[str]
    effects: list[tuple[frozenset[str], frozenset[str], frozenset[str]]]
    cost: Fraction


def _objects_by_type(dom: LiftedDomain, objects: Sequence[tuple[str, str]]) -> dict[str, list[str]]:
    table: dict[str, set[str]] = {}
    for obj, t in objects:
        for sup in dom.supertypes(t):
            table.setdefault(sup, set()).add(obj)
    return {t: sorted(objs) for t, objs in table.items()}


def _static_predicates(domains: Sequence[LiftedDomain]) -> set[str]:
    preds = {p.name for d in domains for p in d.predicates}
    for d in domains:
        for a in d.actions:
            for e in a.effects:
                preds.discard(e.atom.predicate)
    return preds


def _instantiate(dom: LiftedDomain, objects: Sequence[tuple[str, str]],
                 static_preds: set[str], static_true: set[str],
                 cost_table: dict[str, Fraction], cap: int,
                 pred_of: dict[str, str]) -> dict[str, _GroundDef]:
    by_type = _objects_by_type(dom, objects)
    out: dict[str, _GroundDef] = {}
    for schema in dom.actions:
        params = [v for v, _ in schema.parameters]
        domains = [by_type.get(t, []) for _, t in schema.parameters]
        # order static preconditions by the position of their last variable
        checks: list[list[Atom]] = [[] for _ in params]
        static_pre = [a for a in schema.precondition if a.predicate in static_preds]
        pos = {v: i for i, v in enumerate(params)}
        ground_static: list[Atom] = []
        for atom in static_pre:
            idx = [pos[t] for t in atom.args if t in pos]
            (checks[max(idx)] if idx else ground_static).append(atom)
        ineq_at: list[list[tuple[str, str]]] = [[] for _ in params]
        for x, y in schema.inequalities:
            idx = [pos[t] for t in (x, y) if t in pos]
            if idx:
                ineq_at[max(idx)].append((x, y))

        def gname(atom: Atom, binding: dict[str, str]) -> str:
            n = "_".join([atom.predicate] + [binding.get(t, t) for t in atom.args])
            pred_of[n] = atom.predicate
            return n

        if any(gname(a, {}) not in static_true for a in ground_static):
            continue
        binding: dict[str, str] = {}

        def extend(k: int):
            if k == len(params):
                yield dict(binding)
                return
            for obj in domains[k]:
                binding[params[k]] = obj
                if all(binding.get(x, x) != binding.get(y, y) for x, y in ineq_at[k]) \
                        and all(gname(a, binding) in static_true for a in checks[k]):
                    yield from extend(k + 1)
            binding.pop(params[k], None)

        for b in extend(0):
            name = "_".join([schema.name] + [b[v] for v in params])
            pre = frozenset(gname(a, b) for a in schema.precondition)
            groups: dict[frozenset[str], tuple[set[str], set[str]]] = {}
            for e in schema.effects:
                cond = frozenset(gname(c, b) for c in e.condition)
                adds, dels = groups.setdefault(cond, (set(), set()))
                (dels if e.negated else adds).add(gname(e.atom, b))
            effects = [(c, frozenset(a), frozenset(d))
                       for c, (a, d) in sorted(groups.items(), key=lambda kv: sorted(kv[0]))]
            cost = cost_table.get(name, cost_table.get(schema.name, schema.cost))
            out[name] = _GroundDef(pre, effects, Fraction(cost))
            if len(out) > cap:
                raise GroundingLimitError(
                    f"grounding {dom.name} exceeded {cap} actions")
    return out


def _relaxed_reachable(defs: Sequence[dict[str, _GroundDef]], init: set[str]) -> set[str]:
    reached = set(init)
    alive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for d in defs:
            for name, g in d.items():
                if g.pre <= reached:
                    if name not in alive:
                        alive.add(name)
                        changed = True
                    for cond, adds, _ in g.effects:
                        if cond <= reached and not adds <= reached:
                            reached |= adds
                            changed = True
    return alive


def _ground_models(models: Sequence[tuple[LiftedDomain, LiftedProblem]],
                   prune: bool = True, cap: int = 200_000) -> list[PlanningTask]:
    domains = [d for d, _ in models]
    static_preds = _static_predicates(domains)
    objects: dict[str, str] = {}
    for d, p in models:
        for o, t in list(d.constants) + list(p.objects):
            objects.setdefault(o, t)
    obj_list = sorted(objects.items())
    inits = [{a.ground_name() for a in p.init} for _, p in models]
    goals = [{a.ground_name() for a in p.goal} for _, p in models]
    static_true = set().union(*inits)
    pred_of: dict[str, str] = {}
    for _, p in models:
        for a in p.init | p.goal:
            pred_of[a.ground_name()] = a.predicate
    defs = [_instantiate(d, obj_list, static_preds, static_true,
                         dict(p.cost_table), cap, pred_of) for d, p in models]
    unpruned = len(set().union(*[set(d) for d in defs]))
    if prune:
        keep = _relaxed_reachable(defs, set().union(*inits))
    else:
        keep = set().union(*[set(d) for d in defs])

    # static atoms true in every model carry no information
    def is_static(atom: str) -> bool:
        return pred_of.get(atom) in static_preds

    static_atoms = {a for a in static_true if is_static(a)}
    common_static = set.intersection(*[i & static_atoms for i in inits]) \
        if inits else set()

    placeholder = any(name not in d for name in keep for d in defs)
    names: set[str] = set()
    for d in defs:
        for n in keep & set(d):
            g = d[n]
            names |= g.pre
            for c, a, dl in g.effects:
                names |= c | a | dl
    for s in inits + goals:
        names |= s
    names -= common_static
    if placeholder:
        names.add(FALSE_FLUENT)
    fluents = tuple(Fluent(i, n) for i, n in enumerate(sorted(names)))
    idx = {f.name: f.id for f in fluents}

    def ids(atoms: Iterable[str]) -> frozenset[int]:
        return frozenset(idx[a] for a in atoms if a not in common_static)

    tasks = []
    for k, ((dom, prob), d) in enumerate(zip(models, defs)):
        actions = []
        for n in sorted(keep):
            g = d.get(n)
            if g is None:
                # action only known to another model: unsatisfiable here
                other = next(dd[n] for dd in defs if n in dd)
                g = _GroundDef(other.pre | {FALSE_FLUENT}, other.effects, other.cost)
            effects = []
            for c, a, dl in g.effects:
                if any(is_static(x) and x not in static_true for x in c):
                    continue  # condition on a static atom that never holds
                effects.append(Effect(ids(c), ids(a), ids(dl)))
            actions.append(GroundAction(n, ids(g.pre), tuple(effects), g.cost))
        task = PlanningTask(fluents, tuple(actions), ids(inits[k]), ids(goals[k]),
                            name=prob.name,
                            stats={"ground_actions_unpruned": len(d),
                                   "ground_actions": len(actions),
                                   "pruned": len(d) - len(keep & set(d))
                                   if prune else 0,
                                   "union_unpruned": unpruned})
        tasks.append(task)
    return tasks


def ground(dom: LiftedDomain, prob: LiftedProblem, prune: bool = True,
           cap: int = 200_000) -> PlanningTask:
    if prob.domain_name and prob.domain_name != dom.name:
        raise PDDLError(f"problem is for domain {prob.domain_name}, not {dom.name}")
    return _ground_models([(dom, prob)], prune, cap)[0]


def ground_pair(robot: tuple[LiftedDomain, LiftedProblem],
                human: tuple[LiftedDomain, LiftedProblem],
                prune: bool = True, cap: int = 200_000) -> tuple[PlanningTask, PlanningTask]:
    """Ground two models over one shared fluent and action vocabulary.

    An action that exists in only one model gets an unsatisfiable
    precondition in the other one.
    """
    r, h = _ground_models([robot, human], prune, cap)
    return r, h


def same_model(a: PlanningTask, b: PlanningTask) -> bool:
    """Structural equality of two grounded models, up to ordering."""
    if [f.name for f in a.fluents] != [f.name for f in b.fluents]:
        return False
    if a.init != b.init or a.goal != b.goal:
        return False
    if set(a.action_index) != set(b.action_index):
        return False
    for name, x in a.action_index.items():
        y = b.action_index[name]
        if x.pre != y.pre or x.neg != y.neg or set(x.impl) != set(y.impl) \
                or x.cost != y.cost:
            return False
        if x.unconditional != y.unconditional or \
                set(x.conditional) != set(y.conditional):
            return False
    return True

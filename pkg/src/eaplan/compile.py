"""Compilation of an expectation-aware planning problem into one classical task.

Given a robot model and a human mental model over the same grounded
vocabulary, :func:`compile_ea` builds an augmented task whose fluents are

* the task fluents ``p`` (the real state),
* one belief fluent ``bel__p`` per task fluent (what the human believes),
* one meta fluent per model update (``mup_*`` set once the human has been
  told the robot's version, ``mum_*`` set while a human misconception
  stands),
* the sentinels ``ea__init`` / ``ea__goal``, and
* ``ea__started``, only in the corner case described in ``_Builder``.

Task actions are executable only when the robot can execute them *and* the
human believes they can; differing preconditions are guarded by the
matching meta fluent.  ``ea__a0`` sets up the real state, the human's
believed state and all misconception fluents; ``ea__ainf`` checks both
goals.  Explanatory actions flip one meta fluent each.

Every action other than ``ea__a0`` is blocked before it and after
``ea__ainf``, so a plan is exactly a0, a mix of explanations and task
steps, and ainf.  ``ea__init`` stays true after a0 until the first task
action deletes it; a0 itself is blocked by a fluent of the robot's initial
state (or sets nothing), so no extra fluent is needed to tell "not started
yet" apart.
Initial-state explanations also flip the belief of the explained fluent
and are only allowed before the first task action; otherwise an
explanation would rewrite a past the human already used.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .grounding import (Effect, Fluent, GroundAction, PlanningTask, ValidityReport,
                        applicable, successor, validate_plan)
from .planner import Limits, SearchLimitReached, optimal_cost
from .updates import ModelDiff, ModelUpdate, apply_updates, diff_models

__all__ = [
    "CompileConfig", "AugmentedTask", "EASolution", "SolutionReport",
    "InvalidAugmentedPlanError", "compile_ea", "annotate_side_effects",
    "extract_solution", "verify_solution", "size_bounds",
    "A0", "AINF", "INIT", "GOAL", "STARTED",
]

A0, AINF = "ea__a0", "ea__ainf"
INIT, GOAL, STARTED = "ea__init", "ea__goal", "ea__started"
ORDERINGS = ("free", "before-first-use", "prefix")
STAGES = ("propose", "execute")


class InvalidAugmentedPlanError(ValueError):
    pass


@dataclass(frozen=True)
class CompileConfig:
    """How the augmented task is built.

    ``explanation_cost`` is the uniform cost of an explanatory action;
    ``cost_table`` overrides it per update, where ``None`` marks an update
    that cannot be communicated explicitly.  ``ordering="free"`` lets an
    explanation about an action follow uses of that action, which can make
    the extracted solution invalid; the other two orderings are sound.
    """
    explanation_cost: Fraction | int = 1
    cost_table: Mapping[ModelUpdate, Fraction | int | None] = field(default_factory=dict)
    ordering: str = "before-first-use"
    stage: str = "propose"
    inference: bool = True
    restrict_unused: bool = True

    def __post_init__(self):
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}")
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")

    def cost_of(self, u: ModelUpdate) -> Fraction | None:
        c = self.cost_table[u] if u in self.cost_table else self.explanation_cost
        return None if c is None or c == float("inf") else Fraction(c)


@dataclass(frozen=True, eq=False)
class AugmentedTask:
    task: PlanningTask
    robot: PlanningTask
    human: PlanningTask
    diff: ModelDiff
    cfg: CompileConfig
    meta: Mapping[ModelUpdate, int]
    back_pointers: Mapping[int, ModelUpdate]
    stage: str = "propose"

    @property
    def n_task(self) -> int:
        return len(self.robot.fluents)

    def belief(self, i: int) -> int:
        return self.n_task + i

    @property
    def meta_mask(self) -> int:
        m = 0
        for i in self.back_pointers:
            m |= 1 << i
        return m

    def fluents_with_role(self, *roles: str) -> list[Fluent]:
        return [f for f in self.task.fluents if f.role in roles]

    def actions_with_role(self, *roles: str) -> list[GroundAction]:
        return [a for a in self.task.actions if a.role in roles]

    def started(self, state: int) -> bool:
        """True once a task action has run."""
        i = self.task.index.get(STARTED)
        if i is not None:
            return bool((state >> i) & 1)
        return not (state >> self.task.index[INIT]) & 1

    def explained(self, state: int) -> frozenset[ModelUpdate]:
        """Updates in force in a state reached after ``ea__a0``."""
        return frozenset(u for u, m in self.meta.items()
                         if bool((state >> m) & 1) == u.plus)


def size_bounds(aug: AugmentedTask) -> dict[str, int]:
    """Fluent and action counts next to their linear bounds.

    ``fluents`` counts every fluent; ``aux_fluents`` is 1 only when the
    robot's initial state is empty and a ``started`` fluent had to be added.
    """
    n, na, d = len(aug.robot.fluents), len(aug.robot.actions), len(aug.diff)
    return {
        "fluents": len(aug.task.fluents), "fluent_bound": 2 * n + d + 2,
        "aux_fluents": len(aug.fluents_with_role("aux")),
        "actions": len(aug.task.actions), "action_bound": na + d + 2,
    }


def _check_size(aug: AugmentedTask) -> None:
    s = size_bounds(aug)
    assert s["aux_fluents"] <= 1, s
    assert s["fluents"] <= s["fluent_bound"] + s["aux_fluents"], s
    assert s["actions"] <= s["action_bound"], s


class _Builder:
    def __init__(self, robot: PlanningTask, human: PlanningTask, diff: ModelDiff,
                 cfg: CompileConfig):
        self.robot, self.human, self.diff, self.cfg = robot, human, diff, cfg
        n = self.n = len(robot.fluents)
        fl = [Fluent(i, f.name, "task") for i, f in enumerate(robot.fluents)]
        fl += [Fluent(n + i, f"bel__{f.name}", "belief")
               for i, f in enumerate(robot.fluents)]
        self.meta: dict[ModelUpdate, int] = {}
        self.slot: dict[tuple[str, str | None, int], int] = {}
        idx = robot.index
        for u in diff.updates:
            self.meta[u] = len(fl)
            self.slot[(u.field, u.action, idx[u.fluent])] = len(fl)
            fl.append(Fluent(len(fl), u.meta_name, "meta-plus" if u.plus else "meta-minus"))
        self.init_id = len(fl)
        fl.append(Fluent(self.init_id, INIT, "sentinel-init"))
        self.goal_id = len(fl)
        fl.append(Fluent(self.goal_id, GOAL, "sentinel-goal"))
        self.communicable = [u for u in diff.updates if cfg.cost_of(u) is not None]
        # Phases: before a0 ({I} only), after a0 but before the first task
        # action (I and the anchor, a fluent of the robot's initial state),
        # started (I deleted by every task action), done (G).  When a0 sets
        # nothing at all the first two phases coincide and no anchor is
        # needed.  Only when the robot's initial state is empty but a0 still
        # sets beliefs or meta fluents is a separate ``started`` fluent
        # added, and then a0 deletes I as usual.
        self.anchor = min(robot.init) if robot.init else None
        self.a0_noop = not robot.init and not human.init and not diff.minus
        self.started = None
        if self.anchor is None and not self.a0_noop and (
                cfg.ordering != "free" or any(u.field == "init" for u in self.communicable)):
            self.started = len(fl)
            fl.append(Fluent(self.started, STARTED, "aux"))
        self.fluents = tuple(fl)
        touched: set[int] = set()
        for t in (robot, human):
            for a in t.actions:
                for e in a.effects:
                    touched |= e.add | e.delete
        self.static = frozenset(range(n)) - touched

    def after_a0(self) -> tuple[tuple[tuple[int, int], ...], frozenset[int]]:
        """Implication and negative preconditions of every action but a0."""
        if self.a0_noop:
            return (), frozenset({self.goal_id})
        if self.anchor is None:
            return (), frozenset({self.init_id, self.goal_id})
        return ((self.init_id, self.anchor),), frozenset({self.goal_id})

    def not_started(self) -> tuple[frozenset[int], frozenset[int]]:
        """Extra (pre, neg) for actions allowed only before the first task action."""
        if self.started is not None:
            return frozenset(), frozenset({self.started})
        return frozenset({self.init_id}), frozenset()

    def bel(self, ids) -> frozenset[int]:
        return frozenset(self.n + i for i in ids)

    def task_action(self, name: str, stage: str, inference: bool,
                    restrict_unused: bool) -> GroundAction:
        R = self.robot.action_index[name]
        H = self.human.action_index[name]
        slot = self.slot
        hard = set(R.pre) | self.bel(R.pre & H.pre)
        impl = [(slot[("prec", name, p)], self.n + p) for p in sorted(R.pre - H.pre)]
        impl += [(slot[("prec", name, p)], self.n + p) for p in sorted(H.pre - R.pre)]
        rad, rdl = R.unconditional
        had, hdl = H.unconditional
        execute = stage == "execute"
        effects = [Effect(frozenset(), rad, rdl),
                   Effect(frozenset(), self.bel(rad & had), self.bel(rdl & hdl))]
        for e in sorted(rad - had):          # robot-only add
            m = slot[("adds", name, e)]
            effects.append(Effect(frozenset(), frozenset({self.n + e, m})) if execute
                           else Effect(frozenset({m}), frozenset({self.n + e})))
        for e in sorted(had - rad):          # human-only add
            m = slot[("adds", name, e)]
            effects.append(Effect(frozenset(), frozenset(), frozenset({m})) if execute
                           else Effect(frozenset({m}), frozenset({self.n + e})))
        for e in sorted(rdl - hdl):          # robot-only delete
            m = slot[("dels", name, e)]
            effects.append(Effect(frozenset(), frozenset({m}), frozenset({self.n + e}))
                           if execute else
                           Effect(frozenset({m}), frozenset(), frozenset({self.n + e})))
        for e in sorted(hdl - rdl):          # human-only delete
            m = slot[("dels", name, e)]
            effects.append(Effect(frozenset(), frozenset(), frozenset({m})) if execute
                           else Effect(frozenset({m}), frozenset(), frozenset({self.n + e})))
        for ce in R.conditional:
            effects.append(ce)
            effects.append(Effect(self.bel(ce.condition), self.bel(ce.add),
                                  self.bel(ce.delete)))
            if execute and inference and (not restrict_unused or ce.condition <= self.static):
                told = frozenset()
                if ce.condition <= self.static:
                    told = frozenset(slot[("init", None, c)] for c in ce.condition
                                     if ("init", None, c) in slot
                                     and self.fluents[slot[("init", None, c)]].role
                                     == "meta-plus")
                effects.append(Effect(ce.condition,
                                      self.bel(ce.add) | self.bel(ce.condition) | told,
                                      self.bel(ce.delete)))
        if self.started is not None:
            effects.append(Effect(frozenset(), frozenset({self.started})))
        else:
            effects.append(Effect(frozenset(), frozenset(), frozenset({self.init_id})))
        effects = [e for e in effects if e.add or e.delete]
        phase_impl, phase_neg = self.after_a0()
        return GroundAction(name, frozenset(hard), tuple(effects), R.cost,
                            tuple(impl) + phase_impl, phase_neg, "task")

    def sentinels(self) -> tuple[GroundAction, GroundAction]:
        R, H = self.robot, self.human
        minus = frozenset(self.meta[u] for u in self.diff.minus)
        if self.a0_noop:
            a0_del, a0_neg = frozenset(), frozenset({self.goal_id})
        elif self.anchor is not None:
            a0_del, a0_neg = frozenset(), frozenset({self.anchor, self.goal_id})
        else:
            a0_del, a0_neg = frozenset({self.init_id}), frozenset()
        a0 = GroundAction(A0, frozenset({self.init_id}),
                          (Effect(frozenset(), R.init | self.bel(H.init) | minus, a0_del),),
                          Fraction(0), (), a0_neg, role="init-sentinel")
        impl = tuple((self.slot[("goal", None, p)], self.n + p)
                     for p in sorted(R.goal ^ H.goal))
        phase_impl, phase_neg = self.after_a0()
        ainf = GroundAction(AINF, R.goal | self.bel(R.goal & H.goal),
                            (Effect(frozenset(), frozenset({self.goal_id})),),
                            Fraction(0), impl + phase_impl, phase_neg, "goal-sentinel")
        return a0, ainf

    def explanatory(self, u: ModelUpdate) -> GroundAction:
        m = self.meta[u]
        p = self.robot.index[u.fluent]
        pre: set[int] = set()
        phase_impl, phase_neg = self.after_a0()
        neg = set(phase_neg)
        add: set[int] = set()
        dele: set[int] = set()
        if u.plus:
            neg.add(m)
            add.add(m)
        else:
            pre.add(m)
            dele.add(m)
        if u.field == "init":
            (add if u.plus else dele).add(self.n + p)
        # before-first-use admits exactly the solutions of prefix ordering:
        # explanations touch only meta fluents (and, for the initial state,
        # beliefs read before the first step), so moving them all to the
        # front changes no action's behaviour.  It therefore shares the
        # prefix encoding.
        if u.field == "init" or self.cfg.ordering != "free":
            ns_pre, ns_neg = self.not_started()
            pre |= ns_pre
            neg |= ns_neg
        return GroundAction(f"explain_{u.meta_name}", frozenset(pre),
                            (Effect(frozenset(), frozenset(add), frozenset(dele)),),
                            self.cfg.cost_of(u), phase_impl, frozenset(neg), "explanatory")

    def build(self, stage: str, inference: bool, restrict_unused: bool) -> PlanningTask:
        a0, ainf = self.sentinels()
        actions = [a0] + [self.explanatory(u) for u in self.communicable]
        actions += [self.task_action(a.name, stage, inference, restrict_unused)
                    for a in sorted(self.robot.actions, key=lambda a: a.name)]
        actions.append(ainf)
        return PlanningTask(self.fluents, tuple(actions), frozenset({self.init_id}),
                            frozenset({self.goal_id}), name=f"{self.robot.name}-ea")


def compile_ea(robot: PlanningTask, human: PlanningTask,
               cfg: CompileConfig | None = None,
               diff: ModelDiff | None = None) -> AugmentedTask:
    """Build the augmented task; side effects are added when cfg.stage is execute."""
    cfg = cfg or CompileConfig()
    diff = diff_models(robot, human) if diff is None else diff
    b = _Builder(robot, human, diff, cfg)
    task = b.build("propose", False, cfg.restrict_unused)
    aug = AugmentedTask(task, robot, human, diff, cfg, dict(b.meta),
                        {m: u for u, m in b.meta.items()}, "propose")
    _check_size(aug)
    if cfg.stage == "execute":
        aug = annotate_side_effects(aug, "execute", cfg.inference)
    return aug


def annotate_side_effects(aug: AugmentedTask, mode: str = "execute",
                          inference: bool = True) -> AugmentedTask:
    """Let observed task actions update beliefs and meta fluents directly.

    In execute mode every differing effect of a task action is shown to the
    observer when it happens, so the action itself explains it.  With
    ``inference`` a fired conditional effect also makes the observer believe
    its condition; under ``restrict_unused`` (from the config) only
    conditions on fluents that no action ever changes are inferred.
    """
    if mode not in STAGES:
        raise ValueError(f"mode must be one of {STAGES}")
    if mode == "propose":
        return aug
    b = _Builder(aug.robot, aug.human, aug.diff, aug.cfg)
    new = b.build(mode, inference, aug.cfg.restrict_unused)
    out = replace(aug, task=new, stage=mode)
    _check_size(out)
    return out


# ---------------------------------------------------------------------------
# solutions

@dataclass(frozen=True)
class EASolution:
    explanation: frozenset[ModelUpdate]
    plan: tuple[str, ...]
    explanation_cost: Fraction = Fraction(0)
    task_cost: Fraction = Fraction(0)
    augmented_plan: tuple[str, ...] = ()

    @property
    def cost(self) -> Fraction:
        return self.explanation_cost + self.task_cost

    def to_dict(self) -> dict:
        return {
            "explanation": [u.to_dict() for u in sorted(self.explanation)],
            "plan": list(self.plan),
            "explanation_cost": str(self.explanation_cost),
            "task_cost": str(self.task_cost), "cost": str(self.cost),
            "augmented_plan": list(self.augmented_plan),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "EASolution":
        return cls(frozenset(ModelUpdate.from_dict(u) for u in d["explanation"]),
                   tuple(d["plan"]), Fraction(d.get("explanation_cost", 0)),
                   Fraction(d.get("task_cost", 0)),
                   tuple(d.get("augmented_plan", ())))


def extract_solution(aug: AugmentedTask, plan: Sequence[str]) -> EASolution:
    """Read the model updates and the task-level plan off an augmented plan.

    An update belongs to the explanation when some step (explanatory or
    task-level) sets its ``mup`` fluent or clears its ``mum`` fluent.
    """
    task = aug.task
    state = task.init_state
    meta = aug.meta_mask
    explanation: set[ModelUpdate] = set()
    steps: list[str] = []
    e_cost = t_cost = Fraction(0)
    for k, name in enumerate(plan):
        a = task.lookup(name)
        if not applicable(state, a):
            raise InvalidAugmentedPlanError(f"step {k} ({name}) is not applicable")
        nxt = successor(state, a)
        if a.role != "init-sentinel":
            changed = (state ^ nxt) & meta
            while changed:
                low = changed & -changed
                i = low.bit_length() - 1
                u = aug.back_pointers[i]
                if bool((nxt >> i) & 1) == u.plus:
                    explanation.add(u)
                changed ^= low
        if a.role == "task":
            steps.append(a.name)
            t_cost += a.cost
        elif a.role == "explanatory":
            e_cost += a.cost
        state = nxt
    if not task.is_goal(state):
        raise InvalidAugmentedPlanError("augmented plan does not reach the goal")
    return EASolution(frozenset(explanation), tuple(steps), e_cost, t_cost, tuple(plan))


@dataclass
class SolutionReport:
    consistent: bool
    robot: ValidityReport
    human: ValidityReport | None
    optimal: bool | None = None
    human_optimal_cost: Fraction | None = None

    @property
    def valid(self) -> bool:
        ok = self.consistent and self.robot.valid and \
            self.human is not None and self.human.valid
        return ok and self.optimal is not False

    def to_dict(self) -> dict:
        return {"valid": self.valid, "consistent": self.consistent,
                "robot": self.robot.to_dict(),
                "human": self.human.to_dict() if self.human else None,
                "optimal": self.optimal,
                "human_optimal_cost": None if self.human_optimal_cost is None
                else str(self.human_optimal_cost)}


def verify_solution(robot: PlanningTask, human: PlanningTask, sol: EASolution,
                    optimality: bool = False, limits: Limits | None = None,
                    diff: ModelDiff | None = None) -> SolutionReport:
    """Check a solution: valid in the robot model and in the updated human model.

    With ``optimality`` the plan must also be optimal in the updated human
    model; an inconclusive optimality search counts as a failure.
    """
    diff = diff_models(robot, human) if diff is None else diff
    consistent = all(u in diff for u in sol.explanation)
    r_rep = validate_plan(robot, sol.plan)
    if not consistent:
        return SolutionReport(False, r_rep, None)
    updated = apply_updates(human, sol.explanation)
    h_rep = validate_plan(updated, sol.plan)
    report = SolutionReport(True, r_rep, h_rep)
    if optimality:
        try:
            opt = optimal_cost(updated, limits)
        except SearchLimitReached:
            report.optimal = False
            return report
        report.human_optimal_cost = opt
        report.optimal = h_rep.valid and opt is not None and h_rep.total_cost == opt
    return report

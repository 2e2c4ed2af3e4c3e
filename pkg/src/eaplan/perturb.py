"""Random mental models: the robot model with a few slots changed.

Each change is expressed as a model update applied to the robot model, so
the diff between the robot model and the result has exactly one unit per
change.  Slots are drawn with a seeded ``random.Random`` and never repeat.
"""

from __future__ import annotations

import random

from .grounding import FALSE_FLUENT, PlanningTask
from .updates import ModelUpdate, apply_updates

__all__ = ["PERTURBATIONS", "InsufficientSlotsError", "perturbation_slots", "perturb_model"]

#: generator names and the update (applied to the robot model) they produce
PERTURBATIONS = {
    "drop-prec": "prec-remove", "add-prec": "prec-add",
    "flip-init": None,
    "drop-add": "addeff-remove", "add-add": "addeff-add",
    "drop-del": "deleff-remove", "add-del": "deleff-add",
    "drop-goal": "goal-remove",
}


class InsufficientSlotsError(ValueError):
    pass


def perturbation_slots(task: PlanningTask, kind: str) -> list[ModelUpdate]:
    names = [f.name for f in task.fluents if f.name != FALSE_FLUENT]
    idx = task.index
    if kind == "flip-init":
        return [ModelUpdate("init-remove" if idx[p] in task.init else "init-add", p)
                for p in names]
    if kind == "drop-goal":
        return [ModelUpdate("goal-remove", task.fluents[i].name) for i in sorted(task.goal)]
    out = []
    for a in task.actions:
        if FALSE_FLUENT in idx and idx[FALSE_FLUENT] in a.pre:
            continue
        adds, dels = a.unconditional
        have = {"prec": a.pre, "add": adds, "del": dels}[kind.split("-")[1]]
        if kind.startswith("drop"):
            out += [ModelUpdate(PERTURBATIONS[kind], task.fluents[i].name, a.name)
                    for i in sorted(have)]
        else:
            out += [ModelUpdate(PERTURBATIONS[kind], p, a.name)
                    for p in names if idx[p] not in have]
    return out


def perturb_model(robot: PlanningTask, n: int, seed: int = 0,
                  kinds: list[str] | None = None) -> PlanningTask:
    """The robot model with ``n`` distinct random slots changed."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return robot
    kinds = list(kinds or PERTURBATIONS)
    for k in kinds:
        if k not in PERTURBATIONS:
            raise ValueError(f"unknown perturbation {k!r}")
    rng = random.Random(seed)
    pools = {k: perturbation_slots(robot, k) for k in kinds}
    pools = {k: v for k, v in pools.items() if v}
    if sum(len(v) for v in pools.values()) < n:
        raise InsufficientSlotsError(f"only {sum(map(len, pools.values()))} slots for {n} changes")
    chosen: list[ModelUpdate] = []
    taken: set[tuple] = set()
    while len(chosen) < n:
        k = rng.choice(sorted(pools))
        u = pools[k].pop(rng.randrange(len(pools[k])))
        if not pools[k]:
            del pools[k]
        slot = (u.field, u.action, u.fluent)
        if slot not in taken:
            taken.add(slot)
            chosen.append(u)
    return apply_updates(robot, chosen)

"""Model updates: atomic corrections of the human model toward the robot model.

An update names one slot of a grounded model (an initial-state fact, a goal
fact, or a fluent in the precondition / add list / delete list of an action)
and says whether the human model should gain it (``*-add``, the robot has
it and the human does not) or lose it (``*-remove``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .grounding import Effect, GroundAction, PlanningTask

__all__ = [
    "KINDS", "ModelUpdate", "ModelDiff", "VocabularyMismatchError",
    "InconsistentUpdateError", "UnsupportedDifferenceError", "diff_models",
    "apply_updates", "diff_from_json",
]

KINDS = ("init-add", "init-remove", "goal-add", "goal-remove",
         "prec-add", "prec-remove", "addeff-add", "addeff-remove",
         "deleff-add", "deleff-remove")

_FIELD = {"init": "init", "goal": "goal", "prec": "prec",
          "addeff": "adds", "deleff": "dels"}
_FIELD_ORDER = {"init": 0, "goal": 1, "prec": 2, "adds": 3, "dels": 4}


class VocabularyMismatchError(ValueError):
    pass


class InconsistentUpdateError(ValueError):
    pass


class UnsupportedDifferenceError(ValueError):
    pass


@dataclass(frozen=True)
class ModelUpdate:
    kind: str
    fluent: str
    action: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown update kind {self.kind!r}")
        if (self.field in ("init", "goal")) != (self.action is None):
            raise ValueError(f"{self.kind} update needs "
                             f"{'no' if self.action else 'an'} action")

    @property
    def plus(self) -> bool:
        return self.kind.endswith("-add")

    @property
    def field(self) -> str:
        return _FIELD[self.kind.split("-")[0]]

    @property
    def sort_key(self) -> tuple:
        return (0 if self.plus else 1, _FIELD_ORDER[self.field],
                self.action or "", self.fluent)

    def __lt__(self, other: "ModelUpdate") -> bool:
        return self.sort_key < other.sort_key

    @property
    def meta_name(self) -> str:
        sign = "p" if self.plus else "m"
        if self.action is None:
            return f"mu{sign}_{self.field}__{self.fluent}"
        return f"mu{sign}_{self.field}__{self.action}__{self.fluent}"

    def describe(self) -> str:
        verb = "add" if self.plus else "remove"
        prep = "to" if self.plus else "from"
        where = {"init": "I", "goal": "G"}.get(self.field,
                                              f"{self.field}-of-{self.action}")
        return f"{verb}-({self.fluent})-{prep}-{where}"

    def __str__(self) -> str:
        return f"{self.kind}:{self.action or ''}:{self.fluent}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "action": self.action, "fluent": self.fluent}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelUpdate":
        return cls(d["kind"], d["fluent"], d.get("action"))


@dataclass(frozen=True)
class ModelDiff:
    plus: frozenset[ModelUpdate] = frozenset()
    minus: frozenset[ModelUpdate] = frozenset()

    def __post_init__(self):
        if self.plus & self.minus:
            raise ValueError("plus and minus updates overlap")
        if any(not u.plus for u in self.plus) or any(u.plus for u in self.minus):
            raise ValueError("update polarity does not match its set")

    @property
    def updates(self) -> list[ModelUpdate]:
        return sorted(self.plus | self.minus)

    def __len__(self) -> int:
        return len(self.plus) + len(self.minus)

    def __contains__(self, u: ModelUpdate) -> bool:
        return u in self.plus or u in self.minus

    def __iter__(self):
        return iter(self.updates)

    def to_json(self) -> str:
        return json.dumps({"plus": [u.to_dict() for u in sorted(self.plus)],
                           "minus": [u.to_dict() for u in sorted(self.minus)]},
                          indent=2)


def diff_from_json(text: str) -> ModelDiff:
    d = json.loads(text)
    return ModelDiff(frozenset(map(ModelUpdate.from_dict, d["plus"])),
                     frozenset(map(ModelUpdate.from_dict, d["minus"])))


def _check_vocabulary(robot: PlanningTask, human: PlanningTask) -> None:
    if [f.name for f in robot.fluents] != [f.name for f in human.fluents]:
        raise VocabularyMismatchError("models use different fluent vocabularies; "
                                      "ground them together with ground_pair")
    if set(robot.action_index) != set(human.action_index):
        only = sorted(set(robot.action_index) ^ set(human.action_index))
        raise VocabularyMismatchError(f"action names differ: {only[:5]}")


def diff_models(robot: PlanningTask, human: PlanningTask) -> ModelDiff:
    _check_vocabulary(robot, human)
    name = [f.name for f in robot.fluents]
    out: list[ModelUpdate] = []

    def compare(kind: str, r: Iterable[int], h: Iterable[int], action=None):
        r, h = set(r), set(h)
        out.extend(ModelUpdate(f"{kind}-add", name[i], action) for i in r - h)
        out.extend(ModelUpdate(f"{kind}-remove", name[i], action) for i in h - r)

    compare("init", robot.init, human.init)
    compare("goal", robot.goal, human.goal)
    for a in robot.actions:
        b = human.action_index[a.name]
        if a.neg or b.neg or a.impl or b.impl:
            raise UnsupportedDifferenceError(f"{a.name} is not a base STRIPS action")
        if set(a.conditional) != set(b.conditional):
            raise UnsupportedDifferenceError(
                f"conditional effects of {a.name} differ between the models")
        compare("prec", a.pre, b.pre, a.name)
        compare("addeff", a.unconditional[0], b.unconditional[0], a.name)
        compare("deleff", a.unconditional[1], b.unconditional[1], a.name)
    return ModelDiff(frozenset(u for u in out if u.plus),
                     frozenset(u for u in out if not u.plus))


def apply_updates(human: PlanningTask, updates: Iterable[ModelUpdate],
                  diff: ModelDiff | None = None) -> PlanningTask:
    """The human model with every update applied.

    With ``diff`` given, updates outside it are rejected: an explanation
    must be consistent with the robot model.
    """
    updates = list(updates)
    if diff is not None:
        bad = [u for u in updates if u not in diff]
        if bad:
            raise InconsistentUpdateError(
                f"updates not consistent with the robot model: {[str(u) for u in bad]}")
    idx = human.index
    init, goal = set(human.init), set(human.goal)
    per_action: dict[str, list[ModelUpdate]] = {}
    for u in updates:
        if u.fluent not in idx:
            raise InconsistentUpdateError(f"unknown fluent {u.fluent}")
        i = idx[u.fluent]
        if u.field == "init":
            (init.add if u.plus else init.discard)(i)
        elif u.field == "goal":
            (goal.add if u.plus else goal.discard)(i)
        else:
            if u.action not in human.action_index:
                raise InconsistentUpdateError(f"unknown action {u.action}")
            per_action.setdefault(u.action, []).append(u)
    actions = []
    for a in human.actions:
        ups = per_action.get(a.name)
        if not ups:
            actions.append(a)
            continue
        pre = set(a.pre)
        adds, dels = (set(x) for x in a.unconditional)
        for u in ups:
            target = {"prec": pre, "adds": adds, "dels": dels}[u.field]
            (target.add if u.plus else target.discard)(idx[u.fluent])
        effects = (Effect(frozenset(), frozenset(adds), frozenset(dels)),) + a.conditional
        actions.append(GroundAction(a.name, frozenset(pre), effects, a.cost,
                                    a.impl, a.neg, a.role))
    return PlanningTask(human.fluents, tuple(actions), frozenset(init),
                        frozenset(goal), name=human.name)

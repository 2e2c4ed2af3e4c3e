"""PDDL front end for the STRIPS + typing + action-costs subset.

Lifted domains and problems are parsed into frozen dataclasses whose
collections are kept in canonical (sorted) order, so two domains that differ
only in declaration order compare equal.  Serialization emits the same
canonical order, which makes the output byte-stable.

Conditional effects (``when``) are accepted in input effects because the
door action of the search-and-rescue domain uses one.  Negative and
disjunctive preconditions are output-only: they appear in compiled tasks
written by :func:`serialize_task` and are rejected on input, with the single
exception of ``(not (= ?x ?y))`` which is a grounding-time inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "PDDLError", "PDDLSyntaxError", "UnsupportedFeatureError",
    "Atom", "CondEffect", "ActionSchema", "Predicate", "LiftedDomain",
    "LiftedProblem", "parse_domain", "parse_problem", "serialize_domain",
    "serialize_problem", "serialize_task", "format_cost",
]

SUPPORTED_REQUIREMENTS = frozenset({
    ":strips", ":typing", ":action-costs", ":equality",
    ":conditional-effects", ":negative-preconditions",
    ":disjunctive-preconditions",
})


class PDDLError(Exception):
    """Base class for PDDL front-end errors."""


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnsupportedFeatureError(PDDLError):
    def __init__(self, construct: str, line: int | None = None,
                 column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"unsupported PDDL construct: {construct}{where}")
        self.construct = construct


# ---------------------------------------------------------------------------
# s-expressions

class _Token(str):
    line: int
    column: int


class _List(list):
    line: int = 0
    column: int = 0


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tok = _Token(ch)
            tok.line, tok.column = line, col
            tokens.append(tok)
            col, i = col + 1, i + 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        tok = _Token(text[start:i].lower())
        tok.line, tok.column = line, start_col
        tokens.append(tok)
    return tokens


def _read(text: str) -> _List:
    tokens = _tokenize(text)
    if not tokens:
        raise PDDLSyntaxError("empty input", 1, 1)
    stack: list[_List] = []
    root: _List | None = None
    for tok in tokens:
        if tok == "(":
            node = _List()
            node.line, node.column = tok.line, tok.column
            if stack:
                stack[-1].append(node)
            elif root is not None:
                raise PDDLSyntaxError("trailing content after top-level form",
                                      tok.line, tok.column)
            else:
                root = node
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", tok.line, tok.column)
            stack.pop()
        else:
            if not stack:
                raise PDDLSyntaxError(f"unexpected token {tok!r} outside a form",
                                      tok.line, tok.column)
            stack[-1].append(tok)
    if stack:
        raise PDDLSyntaxError("unbalanced '(' (missing ')')",
                              stack[-1].line, stack[-1].column)
    assert root is not None
    return root


def _pos(node) -> tuple[int, int]:
    return getattr(node, "line", 0), getattr(node, "column", 0)


def _expect_list(node, what: str) -> _List:
    if not isinstance(node, list):
        raise PDDLSyntaxError(f"expected {what}, got {node!r}", *_pos(node))
    return node


def _typed_list(items: Sequence) -> list[tuple[str, str]]:
    """Parse ``a b - t c`` into [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = items[i]
        if isinstance(tok, list):
            if tok and tok[0] == "either":
                raise UnsupportedFeatureError("either-types", *_pos(tok))
            raise PDDLSyntaxError("unexpected list in typed list", *_pos(tok))
        if tok == "-":
            if i + 1 >= len(items) or isinstance(items[i + 1], list):
                raise PDDLSyntaxError("missing type after '-'", *_pos(tok))
            out.extend((name, str(items[i + 1])) for name in pending)
            pending = []
            i += 2
            continue
        pending.append(str(tok))
        i += 1
    out.extend((name, "object") for name in pending)
    return out


# ---------------------------------------------------------------------------
# lifted structures

@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.args) + ")"

    def ground_name(self) -> str:
        return "_".join((self.predicate,) + self.args)


@dataclass(frozen=True, order=True)
class CondEffect:
    """One literal effect, optionally guarded by a conjunction of atoms."""
    atom: Atom
    negated: bool = False
    condition: frozenset[Atom] = frozenset()


@dataclass(frozen=True, order=True)
class Predicate:
    name: str
    parameters: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[tuple[str, str], ...] = ()
    precondition: frozenset[Atom] = frozenset()
    effects: frozenset[CondEffect] = frozenset()
    cost: Fraction = Fraction(1)
    inequalities: frozenset[tuple[str, str]] = frozenset()

    @property
    def is_base(self) -> bool:
        return all(not e.condition for e in self.effects)


@dataclass(frozen=True)
class LiftedDomain:
    name: str
    requirements: frozenset[str] = frozenset()
    types: frozenset[tuple[str, str]] = frozenset()
    constants: tuple[tuple[str, str], ...] = ()
    predicates: tuple[Predicate, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(sorted(self.predicates)))
        object.__setattr__(self, "actions",
                           tuple(sorted(self.actions, key=lambda a: a.name)))
        object.__setattr__(self, "constants", tuple(sorted(self.constants)))
        names = [p.name for p in self.predicates]
        if len(set(names)) != len(names):
            raise PDDLError(f"duplicate predicate in domain {self.name}")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise PDDLError(f"duplicate action schema in domain {self.name}")

    def predicate(self, name: str) -> Predicate | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def supertypes(self, t: str) -> list[str]:
        parents = dict(self.types)
        chain = [t]
        while chain[-1] in parents and parents[chain[-1]] not in chain:
            chain.append(parents[chain[-1]])
        if "object" not in chain:
            chain.append("object")
        return chain


@dataclass(frozen=True)
class LiftedProblem:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: frozenset[Atom] = frozenset()
    goal: frozenset[Atom] = frozenset()
    cost_table: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(self.objects)))
        object.__setattr__(self, "cost_table", tuple(sorted(self.cost_table)))


# ---------------------------------------------------------------------------
# parsing

def _parse_atom(node, variables: dict[str, str] | None, what: str) -> Atom:
    node = _expect_list(node, what)
    if not node or isinstance(node[0], list):
        raise PDDLSyntaxError(f"malformed {what}", *_pos(node))
    args = []
    for a in node[1:]:
        if isinstance(a, list):
            raise PDDLSyntaxError(f"nested term in {what}", *_pos(a))
        if a.startswith("?") and variables is not None and a not in variables:
            raise PDDLError(f"undeclared variable {a} in {what} "
                            f"(line {a.line}, column {a.column})")
        args.append(str(a))
    return Atom(str(node[0]), tuple(args))


_UNSUPPORTED_FORMULA = {
    "or": "disjunctive-preconditions", "imply": "implication-preconditions",
    "forall": "quantified-preconditions", "exists": "quantified-preconditions",
    "not": "negative-preconditions", "=": "equality-atom",
}


def _parse_conjunction(node, variables, what: str,
                       inequalities: list | None = None) -> list[Atom]:
    node = _expect_list(node, what)
    if not node:
        return []
    head = node[0]
    if head == "and":
        atoms: list[Atom] = []
        for sub in node[1:]:
            atoms.extend(_parse_conjunction(sub, variables, what, inequalities))
        return atoms
    if head == "not" and inequalities is not None and len(node) == 2 \
            and isinstance(node[1], list) and node[1] and node[1][0] == "=":
        eq = node[1]
        if len(eq) != 3:
            raise PDDLSyntaxError("malformed equality", *_pos(eq))
        inequalities.append((str(eq[1]), str(eq[2])))
        return []
    if isinstance(head, str) and head in _UNSUPPORTED_FORMULA:
        raise UnsupportedFeatureError(_UNSUPPORTED_FORMULA[head], *_pos(node))
    return [_parse_atom(node, variables, what)]


def _parse_number(tok) -> Fraction:
    try:
        value = Fraction(str(tok))
    except (ValueError, ZeroDivisionError):
        raise PDDLSyntaxError(f"expected a number, got {tok!r}", *_pos(tok))
    if value < 0:
        raise PDDLError(f"negative action cost {value}")
    return value


def _parse_effects(node, variables) -> tuple[list[CondEffect], Fraction | None]:
    node = _expect_list(node, "effect")
    effects: list[CondEffect] = []
    cost: Fraction | None = None
    if not node:
        return effects, cost
    head = node[0]
    if head == "and":
        for sub in node[1:]:
            sub_effects, sub_cost = _parse_effects(sub, variables)
            effects.extend(sub_effects)
            if sub_cost is not None:
                cost = (cost or 0) + sub_cost
        return effects, cost
    if head == "increase":
        if len(node) != 3 or not isinstance(node[1], list) \
                or list(node[1]) != ["total-cost"]:
            raise UnsupportedFeatureError("numeric-fluents", *_pos(node))
        if isinstance(node[2], list):
            raise UnsupportedFeatureError("numeric-fluents", *_pos(node[2]))
        return effects, _parse_number(node[2])
    if head in ("decrease", "assign", "scale-up", "scale-down"):
        raise UnsupportedFeatureError("numeric-fluents", *_pos(node))
    if head == "forall":
        raise UnsupportedFeatureError("quantified-effects", *_pos(node))
    if head == "when":
        if len(node) != 3:
            raise PDDLSyntaxError("malformed when", *_pos(node))
        cond = frozenset(_parse_conjunction(node[1], variables, "effect condition"))
        inner, inner_cost = _parse_effects(node[2], variables)
        if inner_cost is not None:
            raise UnsupportedFeatureError("conditional-cost", *_pos(node))
        for e in inner:
            if e.condition:
                raise UnsupportedFeatureError("nested-when", *_pos(node))
            effects.append(CondEffect(e.atom, e.negated, cond))
        return effects, None
    if head == "not":
        if len(node) != 2:
            raise PDDLSyntaxError("malformed negated effect", *_pos(node))
        return [CondEffect(_parse_atom(node[1], variables, "effect"), True)], None
    return [CondEffect(_parse_atom(node, variables, "effect"))], None


def _parse_action(node, predicates: dict[str, Predicate]) -> ActionSchema:
    if len(node) < 2 or isinstance(node[1], list):
        raise PDDLSyntaxError("action without a name", *_pos(node))
    name = str(node[1])
    params: list[tuple[str, str]] = []
    pre: list[Atom] = []
    ineq: list[tuple[str, str]] = []
    effects: list[CondEffect] = []
    cost: Fraction | None = None
    i = 2
    while i < len(node):
        key = node[i]
        if i + 1 >= len(node):
            raise PDDLSyntaxError(f"missing value for {key}", *_pos(key))
        value = node[i + 1]
        if key == ":parameters":
            params = _typed_list(_expect_list(value, "parameter list"))
        elif key == ":precondition":
            variables = dict(params)
            pre = _parse_conjunction(value, variables, "precondition", ineq)
        elif key == ":effect":
            effects, cost = _parse_effects(value, dict(params))
        else:
            raise UnsupportedFeatureError(f"action field {key}", *_pos(key))
        i += 2
    variables = dict(params)
    for a, b in ineq:
        for t in (a, b):
            if t.startswith("?") and t not in variables:
                raise PDDLError(f"undeclared variable {t} in action {name}")
    for atom in pre + [e.atom for e in effects] + \
            [c for e in effects for c in e.condition]:
        pred = predicates.get(atom.predicate)
        if pred is None:
            raise PDDLError(f"undeclared predicate {atom.predicate} "
                            f"in action {name}")
        if len(pred.parameters) != len(atom.args):
            raise PDDLError(f"arity mismatch for {atom.predicate} in action {name}")
    return ActionSchema(
        name=name, parameters=tuple(params), precondition=frozenset(pre),
        effects=frozenset(effects),
        cost=Fraction(1) if cost is None else cost,
        inequalities=frozenset(ineq))


def parse_domain(text: str) -> LiftedDomain:
    root = _read(text)
    if len(root) < 2 or root[0] != "define" or not isinstance(root[1], list) \
            or len(root[1]) != 2 or root[1][0] != "domain":
        raise PDDLSyntaxError("expected (define (domain NAME) ...)", *_pos(root))
    name = str(root[1][1])
    requirements: set[str] = set()
    types: set[tuple[str, str]] = set()
    constants: list[tuple[str, str]] = []
    predicates: dict[str, Predicate] = {}
    actions: list[ActionSchema] = []
    for section in root[2:]:
        section = _expect_list(section, "domain section")
        if not section:
            raise PDDLSyntaxError("empty section", *_pos(section))
        key = section[0]
        if key == ":requirements":
            for req in section[1:]:
                if req not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(f"requirement {req}", *_pos(req))
                requirements.add(str(req))
        elif key == ":types":
            types.update((t, p) for t, p in _typed_list(section[1:]) if t != "object")
        elif key == ":constants":
            constants.extend(_typed_list(section[1:]))
        elif key == ":predicates":
            for p in section[1:]:
                p = _expect_list(p, "predicate declaration")
                if not p or isinstance(p[0], list):
                    raise PDDLSyntaxError("malformed predicate", *_pos(p))
                if str(p[0]) in predicates:
                    raise PDDLError(f"duplicate predicate {p[0]}")
                predicates[str(p[0])] = Predicate(str(p[0]), tuple(_typed_list(p[1:])))
        elif key == ":functions":
            for f in section[1:]:
                if isinstance(f, list) and list(f) == ["total-cost"]:
                    continue
                if f in ("-", "number"):
                    continue
                raise UnsupportedFeatureError("numeric-fluents", *_pos(f))
        elif key == ":action":
            actions.append(_parse_action(section, predicates))
        elif key in (":durative-action", ":derived", ":axiom"):
            raise UnsupportedFeatureError(str(key)[1:], *_pos(section))
        else:
            raise UnsupportedFeatureError(f"domain section {key}", *_pos(section))
    return LiftedDomain(name=name, requirements=frozenset(requirements),
                        types=frozenset(types), constants=tuple(constants),
                        predicates=tuple(predicates.values()),
                        actions=tuple(actions))


def _check_ground_atom(atom: Atom, dom: LiftedDomain,
                       objects: dict[str, str], where: str) -> None:
    pred = dom.predicate(atom.predicate)
    if pred is None:
        raise PDDLError(f"undeclared predicate {atom.predicate} in {where}")
    if len(pred.parameters) != len(atom.args):
        raise PDDLError(f"arity mismatch for {atom} in {where}")
    for arg, (_, ptype) in zip(atom.args, pred.parameters):
        if arg not in objects:
            raise PDDLError(f"undeclared object {arg} in {where}")
        if ptype not in dom.supertypes(objects[arg]):
            raise PDDLError(f"type mismatch: {arg} is not a {ptype} in {atom}")


def parse_problem(text: str, dom: LiftedDomain | None = None) -> LiftedProblem:
    root = _read(text)
    if len(root) < 2 or root[0] != "define" or not isinstance(root[1], list) \
            or len(root[1]) != 2 or root[1][0] != "problem":
        raise PDDLSyntaxError("expected (define (problem NAME) ...)", *_pos(root))
    name = str(root[1][1])
    domain_name = ""
    objects: list[tuple[str, str]] = []
    init: set[Atom] = set()
    goal: list[Atom] = []
    for section in root[2:]:
        section = _expect_list(section, "problem section")
        if not section:
            raise PDDLSyntaxError("empty section", *_pos(section))
        key = section[0]
        if key == ":domain":
            domain_name = str(section[1])
        elif key == ":requirements":
            continue
        elif key == ":objects":
            objects.extend(_typed_list(section[1:]))
        elif key == ":init":
            for fact in section[1:]:
                if isinstance(fact, list) and fact and fact[0] == "=":
                    # (= (total-cost) 0) is the only numeric init we accept
                    if isinstance(fact[1], list) and list(fact[1]) == ["total-cost"]:
                        continue
                    raise UnsupportedFeatureError("numeric-fluents", *_pos(fact))
                if isinstance(fact, list) and fact and fact[0] == "not":
                    raise UnsupportedFeatureError("negative-init", *_pos(fact))
                init.add(_parse_atom(fact, None, "init"))
        elif key == ":goal":
            goal = _parse_conjunction(section[1], None, "goal") \
                if len(section) > 1 else []
        elif key == ":metric":
            if list(section[1:2]) != ["minimize"]:
                raise UnsupportedFeatureError("metric", *_pos(section))
        else:
            raise UnsupportedFeatureError(f"problem section {key}", *_pos(section))
    if dom is not None:
        if domain_name and domain_name != dom.name:
            raise PDDLError(f"problem {name} is for domain {domain_name}, "
                            f"not {dom.name}")
        obj_types = dict(dom.constants)
        obj_types.update(objects)
        for atom in sorted(init):
            _check_ground_atom(atom, dom, obj_types, "init")
        for atom in goal:
            _check_ground_atom(atom, dom, obj_types, "goal")
    return LiftedProblem(name=name, domain_name=domain_name or
                         (dom.name if dom else ""),
                         objects=tuple(objects), init=frozenset(init),
                         goal=frozenset(goal))


# ---------------------------------------------------------------------------
# serialization

def format_cost(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return repr(float(c)) if Fraction(float(c)) == c else f"{float(c):.12g}"


def _typed(items: Iterable[tuple[str, str]]) -> str:
    groups: dict[str, list[str]] = {}
    for n, t in items:
        groups.setdefault(t, []).append(n)
    parts = []
    for t in sorted(groups):
        names = " ".join(sorted(groups[t]))
        parts.append(names if t == "object" else f"{names} - {t}")
    return " ".join(parts)


def _conj(atoms: Sequence[str]) -> str:
    if not atoms:
        return "(and)"
    return "(and " + " ".join(atoms) + ")"


def _schema_effects(schema: ActionSchema, with_cost: bool) -> str:
    parts = []
    for e in sorted(schema.effects):
        lit = f"(not {e.atom})" if e.negated else str(e.atom)
        if e.condition:
            cond = _conj([str(a) for a in sorted(e.condition)])
            parts.append(f"(when {cond} {lit})")
        else:
            parts.append(lit)
    if with_cost:
        parts.append(f"(increase (total-cost) {format_cost(schema.cost)})")
    return _conj(parts)


def serialize_domain(dom: LiftedDomain) -> str:
    has_cost = any(a.cost != 1 for a in dom.actions) or \
        ":action-costs" in dom.requirements
    reqs = set(dom.requirements) | {":strips"}
    if dom.types:
        reqs.add(":typing")
    if has_cost:
        reqs.add(":action-costs")
    if any(a.inequalities for a in dom.actions):
        reqs.add(":equality")
    lines = [f"(define (domain {dom.name})",
             f"  (:requirements {' '.join(sorted(reqs))})"]
    if dom.types:
        lines.append(f"  (:types {_typed(dom.types)})")
    if dom.constants:
        lines.append(f"  (:constants {_typed(dom.constants)})")
    preds = []
    for p in dom.predicates:
        params = " ".join(f"{v} - {t}" if t != "object" else v
                          for v, t in p.parameters)
        preds.append(f"({p.name}{' ' + params if params else ''})")
    lines.append(f"  (:predicates {' '.join(preds)})")
    if has_cost:
        lines.append("  (:functions (total-cost))")
    for a in dom.actions:
        params = " ".join(f"{v} - {t}" if t != "object" else v
                          for v, t in a.parameters)
        pre = [str(x) for x in sorted(a.precondition)]
        pre += [f"(not (= {x} {y}))" for x, y in sorted(a.inequalities)]
        lines.append(f"  (:action {a.name}")
        lines.append(f"    :parameters ({params})")
        lines.append(f"    :precondition {_conj(pre)}")
        lines.append(f"    :effect {_schema_effects(a, has_cost)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def serialize_problem(prob: LiftedProblem) -> str:
    lines = [f"(define (problem {prob.name})",
             f"  (:domain {prob.domain_name})"]
    if prob.objects:
        lines.append(f"  (:objects {_typed(prob.objects)})")
    lines.append("  (:init " + " ".join(str(a) for a in sorted(prob.init)) + ")")
    lines.append("  (:goal " + _conj([str(a) for a in sorted(prob.goal)]) + ")")
    lines.append(")")
    return "\n".join(lines) + "\n"


def serialize_task(task, name: str | None = None) -> tuple[str, str]:
    """Write a grounded or compiled task as a (domain, problem) PDDL pair.

    Every fluent becomes a nullary predicate and every ground action a
    parameterless action.  Implication preconditions ``guard -> consequent``
    are written as ``(or (not guard) consequent)``.
    """
    from .grounding import PlanningTask  # local: grounding imports pddl
    aug = None
    if not isinstance(task, PlanningTask):
        aug, task = task, task.task
    name = name or task.name
    fname = [f.name for f in task.fluents]

    def lit(i: int) -> str:
        return f"({fname[i]})"

    needs_neg = any(a.neg or a.impl for a in task.actions)
    needs_or = any(a.impl for a in task.actions)
    needs_when = any(e.condition for a in task.actions for e in a.effects)
    has_cost = any(a.cost != 1 for a in task.actions)
    reqs = [":strips"]
    if needs_neg:
        reqs.append(":negative-preconditions")
    if needs_or:
        reqs.append(":disjunctive-preconditions")
    if needs_when:
        reqs.append(":conditional-effects")
    if has_cost:
        reqs.append(":action-costs")
    lines = [f"(define (domain {name})",
             f"  (:requirements {' '.join(sorted(reqs))})",
             "  (:predicates " + " ".join(lit(i) for i in sorted(
                 range(len(fname)), key=lambda i: fname[i])) + ")"]
    if has_cost:
        lines.append("  (:functions (total-cost))")
    for a in sorted(task.actions, key=lambda a: a.name):
        pre = [lit(i) for i in sorted(a.pre, key=lambda i: fname[i])]
        pre += [f"(not {lit(i)})" for i in sorted(a.neg, key=lambda i: fname[i])]
        pre += [f"(or (not {lit(g)}) {lit(c)})"
                for g, c in sorted(a.impl, key=lambda gc: (fname[gc[0]], fname[gc[1]]))]
        effs = []
        for e in a.effects:
            lits = [f"(not {lit(i)})" for i in sorted(e.delete, key=lambda i: fname[i])]
            lits += [lit(i) for i in sorted(e.add, key=lambda i: fname[i])]
            if not lits:
                continue
            if e.condition:
                cond = _conj([lit(i) for i in sorted(e.condition, key=lambda i: fname[i])])
                body = lits[0] if len(lits) == 1 else _conj(lits)
                effs.append(f"(when {cond} {body})")
            else:
                effs.extend(lits)
        effs.sort()
        if has_cost:
            effs.append(f"(increase (total-cost) {format_cost(a.cost)})")
        lines.append(f"  (:action {a.name}")
        lines.append("    :parameters ()")
        lines.append(f"    :precondition {_conj(pre)}")
        lines.append(f"    :effect {_conj(effs)})")
    lines.append(")")
    domain_text = "\n".join(lines) + "\n"
    plines = [f"(define (problem {name}-problem)", f"  (:domain {name})",
              "  (:init " + " ".join(sorted(lit(i) for i in task.init)) + ")",
              "  (:goal " + _conj(sorted(lit(i) for i in task.goal)) + ")"]
    if has_cost:
        plines.append("  (:metric minimize (total-cost))")
    plines.append(")")
    return domain_text, "\n".join(plines) + "\n"

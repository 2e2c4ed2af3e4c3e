from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eaplan.bench import data_path
from eaplan.pddl import (PDDLError, PDDLSyntaxError, UnsupportedFeatureError,
                         parse_domain, parse_problem, serialize_domain, serialize_problem)

BW = data_path("blocksworld", "domain.pddl").read_text()
USAR = data_path("usar", "domain.pddl").read_text()

DOM = """(define (domain d)
  (:requirements :strips)
  (:predicates (p ?x) (q ?x))
  (:action a :parameters (?x) :precondition {pre} :effect (q ?x)))"""


def test_blocksworld_schemas():
    dom = parse_domain(BW)
    assert [a.name for a in dom.actions] == ["pick-up", "put-down", "stack", "unstack"]
    stack = next(a for a in dom.actions if a.name == "stack")
    assert stack.inequalities == frozenset({("?x", "?y")})
    assert stack.cost == 1


def test_usar_costs_and_conditional_effect():
    dom = parse_domain(USAR)
    costs = {a.name: a.cost for a in dom.actions}
    assert costs == {"clear_passage": 50, "move": 10, "movethroughdoor": 20, "opendoor": 10}
    door = next(a for a in dom.actions if a.name == "opendoor")
    (eff,) = door.effects
    assert eff.atom.predicate == "open" and eff.condition


@pytest.mark.parametrize("pre,construct", [
    ("(or (p ?x) (q ?x))", "disjunctive-preconditions"),
    ("(imply (p ?x) (q ?x))", "implication-preconditions"),
    ("(forall (?y) (p ?y))", "quantified-preconditions"),
    ("(not (p ?x))", "negative-preconditions"),
])
def test_unsupported_preconditions(pre, construct):
    with pytest.raises(UnsupportedFeatureError) as err:
        parse_domain(DOM.format(pre=pre))
    assert err.value.construct == construct


def test_unsupported_requirement_and_sections():
    with pytest.raises(UnsupportedFeatureError):
        parse_domain(DOM.format(pre="(p ?x)").replace(":strips", ":strips :fluents"))
    durative = "(define (domain d) (:durative-action a :parameters ()))"
    with pytest.raises(UnsupportedFeatureError):
        parse_domain(durative)


def test_syntax_error_position():
    with pytest.raises(PDDLSyntaxError) as err:
        parse_domain("(define (domain d)\n  (:predicates (p)")
    assert err.value.line >= 1
    with pytest.raises(PDDLSyntaxError) as err:
        parse_domain("(define (domain d)))")
    assert (err.value.line, err.value.column) == (1, 20)


def test_problem_type_checks():
    dom = parse_domain(BW)
    good = "(define (problem x) (:domain blocksworld) (:objects a - block) " \
           "(:init (clear a)) (:goal (and (clear a))))"
    assert parse_problem(good, dom).goal
    with pytest.raises(PDDLError):
        parse_problem(good.replace("(clear a))", "(clear zz))"), dom)


def test_round_trip_is_canonical():
    for text in (BW, USAR):
        dom = parse_domain(text)
        out = serialize_domain(dom)
        assert parse_domain(out) == dom
        assert serialize_domain(parse_domain(out)) == out
    prob_text = data_path("usar", "robot.pddl").read_text()
    dom = parse_domain(USAR)
    prob = parse_problem(prob_text, dom)
    assert parse_problem(serialize_problem(prob), dom) == prob


def test_declaration_order_does_not_matter():
    a = parse_domain(DOM.format(pre="(p ?x)"))
    b = parse_domain(DOM.format(pre="(p ?x)").replace("(p ?x) (q ?x))", "(q ?x) (p ?x))", 1))
    assert a == b


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=1, max_value=50))
def test_costs_are_exact(num, den):
    c = Fraction(num, den)
    text = USAR.replace("(increase (total-cost) 10)))\n\n  (:action clear_passage",
                        f"(increase (total-cost) {float(c) if den == 1 else num})))"
                        "\n\n  (:action clear_passage", 1)
    dom = parse_domain(text)
    move = next(a for a in dom.actions if a.name == "move")
    assert move.cost == (Fraction(num) if den != 1 else Fraction(float(c)))

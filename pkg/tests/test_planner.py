from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eaplan.bench import load_bundled
from eaplan.grounding import PlanningTask, validate_plan
from eaplan.oracle import h_star_table, optimal_cost_oracle
from eaplan.planner import (Limits, SearchLimitReached, Status, astar, hadd, hmax,
                            optimal_cost)
from eaplan.perturb import perturb_model
from eaplan.updates import ModelUpdate, apply_updates


@pytest.mark.parametrize("heuristic", ["blind", "hmax"])
def test_usar_optimum(usar, heuristic):
    robot, human = usar
    res = astar(robot, heuristic)
    assert res.solved and res.cost == 80
    assert validate_plan(robot, res.plan).total_cost == 80
    assert astar(human, heuristic).cost == 50


def test_hadd_plan_is_valid(bw3):
    res = astar(bw3, "hadd")
    assert res.solved and validate_plan(bw3, res.plan).valid
    with pytest.raises(ValueError):
        optimal_cost(bw3, heuristic="hadd")


def test_hmax_bounds(bw3):
    assert 0 < hmax(bw3) <= hadd(bw3)
    assert hmax(bw3) <= optimal_cost_oracle(bw3)


def test_unsolvable_and_limits(bw3):
    goal = sorted(bw3.goal)[0]
    name = bw3.fluents[goal].name
    # remove the only way to achieve a goal fluent
    ups = [ModelUpdate("addeff-remove", name, a.name) for a in bw3.actions
           if bw3.index[name] in a.unconditional[0]]
    unsolvable = apply_updates(PlanningTask(bw3.fluents, bw3.actions,
                                            bw3.init - {goal}, bw3.goal), ups)
    assert astar(unsolvable).status is Status.UNSOLVABLE
    assert optimal_cost(unsolvable) is None
    res = astar(load_bundled("elevator", "p05"), "blind", Limits(nodes=3))
    assert res.status is Status.RESOURCE_LIMIT and res.plan is None
    with pytest.raises(SearchLimitReached):
        optimal_cost(load_bundled("elevator", "p05"), Limits(nodes=3))


def test_deterministic_tie_breaking(usar):
    robot, _ = usar
    assert astar(robot).plan == astar(robot).plan


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_hmax_matches_blind_on_perturbed(n, seed):
    t = perturb_model(load_bundled("gripper", "p01"), n, seed)
    assert astar(t, "hmax").cost == astar(t, "blind").cost


def test_hmax_admissible_on_all_states(bw3):
    hs = h_star_table(bw3)
    for s, hstar in hs.items():
        assert hmax(bw3, bw3.state(bw3.fluents[i].name for i in s)) <= hstar


def test_fractional_costs():
    from eaplan.grounding import GroundAction, Effect, Fluent, PlanningTask
    f = (Fluent(0, "a"), Fluent(1, "b"))
    acts = (GroundAction("x", frozenset({0}), (Effect(frozenset(), frozenset({1}), frozenset()),),
                         Fraction(1, 3)),)
    t = PlanningTask(f, acts, frozenset({0}), frozenset({1}))
    assert astar(t).cost == Fraction(1, 3)

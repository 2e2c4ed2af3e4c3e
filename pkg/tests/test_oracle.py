from fractions import Fraction

import pytest

from eaplan.compile import CompileConfig
from eaplan.oracle import (OracleCapExceeded, enumerate_ea_solutions, exact_delta,
                           explicable_min_cost, h_star_table, mce, min_solution_cost,
                           optimal_cost_oracle, reachable_states, robot_optimal_plans,
                           subsets_by_cost)
from eaplan.planner import optimal_cost
from eaplan.updates import diff_models

ROUTE = ("move_p1_p2", "move_p2_p3", "move_p3_p4", "move_p4_p11", "move_p11_p13",
         "move_p13_p14", "move_p14_p18", "move_p18_p17")


def test_oracle_optimum_matches_planner(usar, bw3):
    for t in (*usar, bw3):
        assert optimal_cost_oracle(t) == optimal_cost(t)


def test_h_star_table(bw3):
    hs = h_star_table(bw3)
    assert hs[frozenset(bw3.init)] == optimal_cost(bw3)
    assert all(v == 0 for s, v in hs.items() if bw3.goal <= s)
    assert set(hs) <= reachable_states(bw3)


def test_robot_optimal_plans(usar):
    robot, _ = usar
    plans = robot_optimal_plans(robot)
    assert ROUTE in plans
    assert all(len(p) for p in plans)


def test_usar_mce(usar):
    robot, human = usar
    E = mce(robot, human, ROUTE)
    assert {u.fluent for u in E} == {"clear_p2_p3", "clear_p16_p17"}


def test_usar_min_solution_cost(usar):
    robot, human = usar
    cost, E = min_solution_cost(robot, human)
    assert cost == 81 and len(E) == 1
    # no explanation: the plan must work in the robot model and the human's
    assert explicable_min_cost(robot, human) == 120


def test_enumeration_agrees_with_min_cost(usar):
    robot, human = usar
    sols = enumerate_ea_solutions(robot, human, cost_cap=82, plan_len_cap=9)
    assert min(s.cost for s in sols) == 81


def test_subsets_ordering(usar):
    d = diff_models(*usar)
    subs = subsets_by_cost(d.updates, CompileConfig())
    assert len(subs) == 8
    assert subs[0] == (0, frozenset())
    assert [c for c, _ in subs] == sorted(c for c, _ in subs)


def test_exact_delta(usar):
    robot, _ = usar
    res = exact_delta(robot, 200)
    assert res.optimum == 80 and res.value == 20 and not res.censored
    res = exact_delta(robot, 95)
    assert res.censored


def test_caps(bw3):
    with pytest.raises(OracleCapExceeded):
        reachable_states(bw3, cap=3)

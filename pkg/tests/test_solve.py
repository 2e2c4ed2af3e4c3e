from fractions import Fraction

import pytest

from eaplan.bench import load_bundled
from eaplan.compile import CompileConfig, compile_ea, verify_solution
from eaplan.perturb import perturb_model
from eaplan.planner import Limits, Status
from eaplan.solve import (DeltaBound, OptimalityOracle, SolveConfig, SolveMode,
                          agent_optimal_costs, delta_lower_bound, optimality_test,
                          solve_augmented, solve_ea)
from eaplan.updates import diff_models


def cfg(cost=1, **kw):
    return SolveConfig(CompileConfig(explanation_cost=cost, **kw))


def test_valid_mode_usar(usar):
    robot, human = usar
    sol, res = solve_ea(robot, human, "valid", cfg())
    assert res.solved
    rep = verify_solution(robot, human, sol)
    assert rep.valid
    # valid mode alone needs only the blocked corridor explained
    assert sol.cost == 81 and sol.task_cost == 80


def test_optimal_mode_usar(usar):
    robot, human = usar
    sol, res = solve_ea(robot, human, SolveMode.optimal(), cfg())
    assert sol.cost == 82
    assert verify_solution(robot, human, sol, optimality=True).valid
    assert res.info["optimality_searches"] >= 1


def test_penalty_mode_accepts_suboptimal(usar):
    robot, human = usar
    sol, res = solve_ea(robot, human, SolveMode.penalty(), cfg(100, stage="execute",
                                                                ordering="prefix"))
    assert sol.explanation_cost == 0
    assert res.info["penalized"] and res.cost == sol.cost + 100


@pytest.mark.parametrize("ordering", ["free", "before-first-use", "prefix"])
def test_orderings_agree_on_valid_cost(usar, ordering):
    robot, human = usar
    sol, _ = solve_ea(robot, human, "valid", cfg(ordering=ordering))
    assert sol.cost == 81


def test_speedups_do_not_change_cost(bw3):
    human = perturb_model(bw3, 6, 11)
    base = cfg(ordering="prefix")
    ref, _ = solve_ea(bw3, human, "optimal", SolveConfig(base.compile, prune=False,
                                                         floor=False))
    fast, _ = solve_ea(bw3, human, "optimal", base)
    assert (ref is None) == (fast is None)
    if ref is not None:
        assert ref.cost == fast.cost


def test_memoization(usar):
    robot, human = usar
    _, on = solve_ea(robot, human, "optimal", cfg(ordering="free"))
    _, off = solve_ea(robot, human, "optimal",
                      SolveConfig(CompileConfig(ordering="free"), memoize=False, prune=False))
    assert on.info["optimality_searches"] <= off.info["optimality_searches"]


def test_oracle_and_optimality_test(usar):
    robot, human = usar
    o = OptimalityOracle(human)
    assert o.optimum(frozenset()) == 50
    o.optimum(frozenset())
    assert o.searches == 1
    assert not optimality_test(human, [], ["move_p1_p2"])


def test_time_limit_reported(usar):
    robot, human = usar
    big = load_bundled("elevator", "p05")
    _, res = solve_ea(big, perturb_model(big, 8, 3), "optimal",
                      SolveConfig(limits=Limits(nodes=5)))
    assert res.status in (Status.RESOURCE_LIMIT, Status.TIMEOUT)


def test_mode_validation():
    with pytest.raises(ValueError):
        SolveMode("greedy")
    with pytest.raises(ValueError):
        SolveMode.penalty(0)
    assert str(SolveMode.penalty(3)) == "penalty(3)"


def test_delta_bound(usar):
    robot, _ = usar
    b = delta_lower_bound(robot)
    assert b == DeltaBound(Fraction(10))
    d = diff_models(*usar)
    costs = agent_optimal_costs(d, b)
    assert sum(costs.values()) < b.value
    assert set(costs) == set(d.updates)

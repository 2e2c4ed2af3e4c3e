from eaplan.baseline import model_space_search
from eaplan.compile import CompileConfig, verify_solution
from eaplan.planner import Limits, Status
from eaplan.solve import SolveConfig, solve_ea
from eaplan.updates import diff_models


def test_usar_baseline(usar):
    robot, human = usar
    sol, res = model_space_search(robot, human, CompileConfig(explanation_cost=1))
    assert res.solved
    assert verify_solution(robot, human, sol, optimality=True).valid
    assert sol.task_cost == 80 and sol.explanation_cost == 2
    assert res.info["nodes"] >= 1


def test_baseline_never_beats_compilation(usar):
    robot, human = usar
    for cost in (1, 100):
        cc = CompileConfig(explanation_cost=cost, ordering="prefix")
        b, _ = model_space_search(robot, human, cc)
        c, _ = solve_ea(robot, human, "optimal", SolveConfig(cc))
        assert c.cost <= b.cost


def test_witness_incompleteness(witness):
    robot, human = witness
    (u,) = diff_models(robot, human).updates
    cc = CompileConfig(cost_table={u: None})
    sol, res = model_space_search(robot, human, cc)
    assert sol is None and res.status is Status.APPROXIMATION_FAILURE
    sol, res = solve_ea(robot, human, "optimal", SolveConfig(cc))
    assert res.solved and not sol.explanation


def test_baseline_timeout(usar):
    robot, human = usar
    _, res = model_space_search(robot, human, limits=Limits(time=0.0))
    assert res.status is Status.TIMEOUT

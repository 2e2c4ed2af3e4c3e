import pytest
from hypothesis import given, settings, strategies as st

from eaplan.grounding import same_model
from eaplan.perturb import perturb_model
from eaplan.updates import (InconsistentUpdateError, ModelDiff, ModelUpdate, KINDS,
                            apply_updates, diff_from_json, diff_models)


def test_usar_diff(usar):
    robot, human = usar
    d = diff_models(robot, human)
    assert [str(u) for u in d.updates] == [
        "init-add::clear_p2_p3", "init-add::unlocked_d1", "init-remove::clear_p16_p17"]
    assert len(d.plus) == 2 and len(d.minus) == 1


def test_full_diff_reconciles(usar):
    robot, human = usar
    d = diff_models(robot, human)
    assert same_model(apply_updates(human, d.updates, d), robot)
    assert len(diff_models(robot, robot)) == 0


def test_inconsistent_update_rejected(usar):
    robot, human = usar
    d = diff_models(robot, human)
    with pytest.raises(InconsistentUpdateError):
        apply_updates(human, [ModelUpdate("init-add", "at_p5")], d)


def test_update_shape_validation():
    with pytest.raises(ValueError):
        ModelUpdate("nonsense", "p")
    with pytest.raises(ValueError):
        ModelUpdate("prec-add", "p")
    with pytest.raises(ValueError):
        ModelUpdate("init-add", "p", "a")
    assert len(KINDS) == 10


def test_diff_json_round_trip(usar):
    d = diff_models(*usar)
    assert diff_from_json(d.to_json()) == d
    u = d.updates[0]
    assert ModelUpdate.from_dict(u.to_dict()) == u


def test_polarity_checked():
    with pytest.raises(ValueError):
        ModelDiff(plus=frozenset({ModelUpdate("init-remove", "p")}))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=10**6))
def test_perturbation_diff_size_and_reconciliation(bw3, n, seed):
    human = perturb_model(bw3, n, seed)
    d = diff_models(bw3, human)
    assert len(d) == n
    assert same_model(apply_updates(human, d.updates), bw3)

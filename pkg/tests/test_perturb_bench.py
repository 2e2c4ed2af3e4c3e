import csv
import io

import pytest

from eaplan.bench import (CSV_COLUMNS, BenchConfig, run_bench, summarize, toy_suite,
                          write_csv)
from eaplan.perturb import (PERTURBATIONS, InsufficientSlotsError, perturb_model,
                            perturbation_slots)
from eaplan.updates import diff_models


def test_perturbation_is_seeded(bw3):
    a, b = perturb_model(bw3, 5, 7), perturb_model(bw3, 5, 7)
    assert diff_models(bw3, a) == diff_models(bw3, b)
    assert diff_models(bw3, a) != diff_models(bw3, perturb_model(bw3, 5, 8))


@pytest.mark.parametrize("kind", sorted(PERTURBATIONS))
def test_each_kind(bw3, kind):
    human = perturb_model(bw3, 1, 0, [kind])
    assert len(diff_models(bw3, human)) == 1


def test_insufficient_slots(bw3):
    total = sum(len(perturbation_slots(bw3, k)) for k in ["drop-goal"])
    with pytest.raises(InsufficientSlotsError):
        perturb_model(bw3, total + 1, 0, ["drop-goal"])
    with pytest.raises(ValueError):
        perturb_model(bw3, 1, 0, ["melt"])


def test_toy_suite_small():
    suite = toy_suite(count=4, seed=1)
    assert len(suite) == 4
    for inst in suite:
        assert 1 <= len(diff_models(inst.robot, inst.human)) <= 6


def test_mini_bench(tmp_path):
    cfg = BenchConfig(domains=[("blocksworld", "p01")], variants_per_domain=1,
                      updates_per_variant=4, time_limit=20)
    out = tmp_path / "b.csv"
    rows = run_bench(cfg, out)
    assert len(rows) == 2
    header = next(csv.reader(io.StringIO(out.read_text())))
    assert tuple(header) == CSV_COLUMNS
    s = summarize(rows)
    assert not s["dominance_violations"]
    assert set(s["by_domain"]["blocksworld"]) == {"compilation", "baseline"}
    assert write_csv(rows) == out.read_text()


def test_bad_input_becomes_row(tmp_path):
    cfg = BenchConfig(domains=[("nosuchdomain", "p01")], variants_per_domain=1)
    rows = run_bench(cfg)
    assert {r.status for r in rows} == {"error"}

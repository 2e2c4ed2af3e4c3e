import json

import pytest

from eaplan.bench import data_path
from eaplan.cli import main

DOM = str(data_path("usar", "domain.pddl"))
ROBOT = ["--robot", DOM, str(data_path("usar", "robot.pddl"))]
HUMAN = ["--human", DOM, str(data_path("usar", "human.pddl"))]


def test_solve_and_verify(tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert main(["solve", *ROBOT, *HUMAN, "--json", str(out)]) == 0
    assert "move_p2_p3" in capsys.readouterr().out
    sol = json.loads(out.read_text())
    assert sol["cost"] == "82"
    assert main(["verify", *ROBOT, *HUMAN, "--solution", str(out), "--optimal"]) == 0


def test_verify_rejects_bad_solution(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"explanation": [], "plan": ["move_p1_p2", "move_p2_p3"]}))
    assert main(["verify", *ROBOT, *HUMAN, "--solution", str(bad)]) == 1


def test_compile_writes_pddl(tmp_path, capsys):
    assert main(["compile", *ROBOT, *HUMAN, "--out-dir", str(tmp_path)]) == 0
    sizes = json.loads(capsys.readouterr().out.split("wrote")[0])
    assert sizes["fluents"] <= sizes["fluent_bound"]
    assert (tmp_path / "domain.pddl").exists()


def test_baseline_and_demo(capsys):
    assert main(["baseline", *ROBOT, *HUMAN]) == 0
    assert main(["demo-usar"]) == 0


def test_perturb_round_trip(tmp_path):
    bw = [str(data_path("blocksworld", "domain.pddl")), str(data_path("blocksworld", "p01.pddl"))]
    assert main(["perturb", "--robot", *bw, "--n", "3", "--seed", "4",
                 "--out-dir", str(tmp_path)]) == 0
    diff = json.loads((tmp_path / "diff.json").read_text())
    assert len(diff["plus"]) + len(diff["minus"]) == 3
    args = ["--robot", str(tmp_path / "robot-domain.pddl"), str(tmp_path / "robot-problem.pddl"),
            "--human", str(tmp_path / "human-domain.pddl"), str(tmp_path / "human-problem.pddl")]
    assert main(["solve", *args, "--mode", "valid"]) == 0


def test_exit_codes(tmp_path, monkeypatch):
    assert main(["solve", *ROBOT, *HUMAN, "--time-limit", "0"]) == 2
    missing = ["--human", DOM, str(tmp_path / "nope.pddl")]
    assert main(["solve", *ROBOT, *missing]) == 3
    assert main(["solve", *ROBOT]) == 3
    monkeypatch.setenv("EA_PLAN_SEED", "abc")
    assert main(["perturb", *ROBOT, "--out-dir", str(tmp_path)]) == 3


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("expl-cost = 100\nmode = optimal\nstage = execute\nordering = prefix\n")
    assert main(["--config", str(cfg), "solve", *ROBOT, *HUMAN]) == 0
    assert "opendoor_p8_d1" in capsys.readouterr().out
    cfg.write_text("bogus = 1\n")
    assert main(["--config", str(cfg), "solve", *ROBOT, *HUMAN]) == 3


def test_oracle_subcommand(tmp_path, capsys):
    plan = tmp_path / "plan"
    plan.write_text("(move p1 p2)\n(move p2 p3)\n(move p3 p4)\n(move p4 p11)\n"
                    "(move p11 p13)\n(move p13 p14)\n(move p14 p18)\n(move p18 p17)\n")
    assert main(["oracle", *ROBOT, *HUMAN, "--what", "mce", "--plan", str(plan)]) == 0
    assert "clear_p2_p3" in capsys.readouterr().out
    assert main(["oracle", *ROBOT, *HUMAN, "--what", "delta", "--cost-cap", "200"]) == 0

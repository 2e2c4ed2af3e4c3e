import pytest

from eaplan.bench import data_path, load_bundled, load_pair
from eaplan.grounding import ground_pair
from eaplan.usar import load_usar

# lines collected by the acceptance suite, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def usar():
    return load_usar()


@pytest.fixture(scope="session")
def bw3():
    return load_bundled("blocksworld", "p01")


@pytest.fixture(scope="session")
def witness():
    w = lambda f: data_path("witness", f)
    return ground_pair(load_pair(w("robot-domain.pddl"), w("problem.pddl")),
                       load_pair(w("human-domain.pddl"), w("problem.pddl")))

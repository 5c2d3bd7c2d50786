import sys
from pathlib import Path

import pytest

from aaulc.kripke import read_model
from aaulc.turing import load_machine

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parent.parent / "data"


def machine(name):
    return load_machine(DATA / f"{name}.json", allow_start_reentry=True)


@pytest.fixture
def t_halt():
    return machine("t_halt")


@pytest.fixture
def t_loop():
    return machine("t_loop")


@pytest.fixture
def t_mark():
    return machine("t_mark")


@pytest.fixture
def card_model():
    return read_model(DATA / "card_model.json")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

from pathlib import Path

import pytest

from iterative_rsa import parse_scene, prepare_scene

DATA = Path(__file__).parent / "data"

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def load(name):
    return parse_scene((DATA / f"{name}.json").read_bytes())


@pytest.fixture
def trains():
    return prepare_scene(load("two_trains"))


@pytest.fixture
def frisbee():
    return prepare_scene(load("dog_frisbee"))


@pytest.fixture
def pizzas():
    return prepare_scene(load("two_pizzas"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c.split(".")[0])):
        ok, detail = ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}  {detail}")

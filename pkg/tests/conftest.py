import json
import math

import pytest

from abfield import Constants, default_config

NATURAL = Constants.natural()


@pytest.fixture
def natural():
    return NATURAL


@pytest.fixture
def electric_doc():
    return {
        "experiment": "electric",
        "setup": {"Q": 0.01, "M": 100.0, "v": 0.4, "r": 10.0, "T": 250.0, "tau": 350.0},
    }


@pytest.fixture(scope="session")
def electric_run():
    from abfield.scenarios import electric_scenario
    return electric_scenario(default_config("electric"))


@pytest.fixture(scope="session")
def magnetic_run():
    from abfield.scenarios import magnetic_scenario
    return magnetic_scenario(default_config("magnetic"))


def dumps(doc):
    return json.dumps(doc)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_acceptance(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

import sys
import json
from importlib import resources

import numpy as np
import pytest


def load_fixture(name: str) -> dict:
    return json.loads(resources.files("cusp_certify").joinpath("data", f"{name}.json").read_text())


@pytest.fixture
def synthetic2():
    return load_fixture("synthetic-2")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    rows = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in rows:
            terminalreporter.write_line(row)

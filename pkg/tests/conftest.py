import math

import numpy as np
import pytest
from hypothesis import settings

from susyrmt.charfun import EnsembleSpec, charfun_for

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

# acceptance criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def gue4():
    return charfun_for(EnsembleSpec.gaussian(2, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def half_pi():
    return math.pi / 2

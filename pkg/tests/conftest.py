import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from elasticlb import MeasureKind, make_spec  # noqa: E402

ALL_KINDS = [k.label for k in MeasureKind]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=ALL_KINDS)
def spec(request):
    return make_spec(request.param)


ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Store one acceptance outcome; printed in the terminal summary."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")

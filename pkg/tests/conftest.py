import os
import sys
import warnings

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hitchin_duality.rootdata import A1Warning  # noqa: E402

warnings.simplefilter("ignore", A1Warning)


@pytest.fixture(autouse=True)
def _quiet_a1():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", A1Warning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)

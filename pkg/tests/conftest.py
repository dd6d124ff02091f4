import importlib

import pytest

from spectral_rv import _kernels_py

# acceptance results, filled by test_acceptance and echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def _compiled():
    try:
        return importlib.import_module("spectral_rv._kernels")
    except ImportError:
        return None


@pytest.fixture(params=["python", "compiled"])
def kernels(request):
    if request.param == "python":
        return _kernels_py
    mod = _compiled()
    if mod is None:
        pytest.skip("compiled extension not built")
    return mod


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import importlib

import numpy as np
import pytest

from radchemo import _pykernels

try:
    _ck = importlib.import_module("radchemo._ckernels")
except ImportError:  # extension not built
    _ck = None

BACKENDS = [pytest.param(_pykernels, id="python")]
BACKENDS.append(pytest.param(_ck, id="cython", marks=pytest.mark.skipif(_ck is None, reason="extension not built")))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def observed_order(e_coarse, e_fine, ratio=2.0):
    return float(np.log(e_coarse / e_fine) / np.log(ratio))


# lines appended by the acceptance module, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

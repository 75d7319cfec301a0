import json
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


@pytest.fixture(scope="session")
def oracles():
    with open(os.path.join(FIXTURES, "oracles.json")) as fh:
        return json.load(fh)


def rel_err(a, b):
    scale = max(abs(b[0]), abs(b[1]))
    return max(abs(a[0] - b[0]), abs(a[1] - b[1])) / scale


# ------------------------------------------------------------ acceptance verdict lines

_VERDICTS = {}


@pytest.fixture(scope="session")
def verdict():
    """``verdict(n, ok, detail)`` registers one sub-result of acceptance criterion n."""
    def record(n, ok, detail):
        _VERDICTS.setdefault(n, []).append((bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        parts = _VERDICTS[n]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"{status} criterion {n}: " + "; ".join(d for _, d in parts))

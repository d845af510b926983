import numpy as np
import pytest
from hypothesis import settings

from bergop.weights import RadialWeight

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def w0():
    return RadialWeight.standard(0.0)


@pytest.fixture(scope="session")
def w1():
    return RadialWeight.standard(1.0)


@pytest.fixture(scope="session")
def w2():
    return RadialWeight.standard(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


_RANK = {"PASS": 0, "SKIP": 1, "FAIL (known)": 2, "FAIL": 3}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        return
    n, title = mark.args
    if hasattr(rep, "wasxfail"):
        status = "FAIL (known)" if rep.skipped else "FAIL"
    else:
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    # parametrized cases: keep the worst outcome
    prev = _ACCEPTANCE.get(n, ("PASS", title))[0]
    _ACCEPTANCE[n] = (max(prev, status, key=_RANK.get), title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}")

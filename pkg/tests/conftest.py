import numpy as np
import pytest

from mcf_lab.families import FIXTURES, make_conformal_family
from mcf_lab.geometry import flat_isothermal, flat_normal_gaussian, hyperbolic_normal_gaussian


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def flat_iso():
    return flat_isothermal()


@pytest.fixture
def flat_ng():
    return flat_normal_gaussian()


@pytest.fixture
def hyperbolic():
    return hyperbolic_normal_gaussian()


@pytest.fixture(params=sorted(FIXTURES))
def family(request):
    """(name, metric, field) for each shipped conformal family."""
    metric, field = make_conformal_family(FIXTURES[request.param])
    return request.param, metric, field


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    item.config._criteria[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter, config):
    crit = getattr(config, "_criteria", {})
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(crit):
        status, title, detail = crit[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({detail})")

import pytest

from inverse_ramsey.model import Economy

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _RESULTS.get(crit, True)
        _RESULTS[crit] = prev and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_RESULTS.items()):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def fig1():
    return Economy.from_params(0.60, 2.50, 0.55)


@pytest.fixture
def fig2():
    return Economy.from_params(0.60, 4.00, 0.45)


@pytest.fixture
def fig3():
    return Economy.from_params(0.20, 1.10, 0.53)


@pytest.fixture
def fig4():
    return Economy.from_params(0.80, 1.90, 0.45)


@pytest.fixture
def ramsey():
    return Economy.from_params(0.60, 2.50, 1.0)

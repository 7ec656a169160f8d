import time

import numpy as np
import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, title): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion", None)
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[label] = (report.outcome, report.criterion_title, getattr(report, "detail", ""))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion, rep.criterion_title = mark.args
        rep.detail = item.user_properties and dict(item.user_properties).get("detail", "") or ""


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (int(s.split()[0]), s)):
        outcome, title, detail = _CRITERIA[label]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"{status}  criterion {label}: {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def detail(record_property):
    """Attach a short measured value to the criterion summary line."""
    return lambda text: record_property("detail", text)


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    # load (or compile) the cached RK4 kernel once so per-test budgets time the integration
    from netstab import graph as G
    from netstab.dynamics import NetworkSystem, sprott_circulant
    from netstab.sim import IntegratorConfig, simulate_network
    from netstab.spectral import CouplingConfig

    sys = NetworkSystem(G.path(2), sprott_circulant(0.1), CouplingConfig.diffusive(0.1))
    simulate_network(sys, np.zeros(6), IntegratorConfig(t_end=0.1))


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


@pytest.fixture
def stopwatch():
    return Stopwatch

import pytest

from fdtrace.model import generate_nqueens, generate_sorted
from fdtrace.search import solve
from fdtrace.trace import TraceRecorder

_acceptance: list[tuple[int, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): an acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "_acceptance", None)
    if marker is None:
        return
    number, title = marker
    detail = getattr(report, "_acceptance_detail", "")
    _acceptance.append((number, title, "PASS" if report.passed else "FAIL", detail))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report._acceptance = marker.args
        report._acceptance_detail = item.stash.get(DETAIL_KEY, "")


DETAIL_KEY = pytest.StashKey[str]()


@pytest.fixture
def report(request):
    """Attach a one-line detail to the acceptance summary of this test."""
    def put(text: str) -> None:
        request.node.stash[DETAIL_KEY] = text
    return put


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, detail in sorted(_acceptance):
        line = f"criterion {number} [{verdict}] {title}"
        if detail:
            line += f" :: {detail}"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sorted_events():
    rec = TraceRecorder()
    solutions = list(solve(generate_sorted(), sinks=[rec]))
    assert len(solutions) == 1
    return list(rec)


@pytest.fixture(scope="session")
def queens4_events():
    rec = TraceRecorder()
    list(solve(generate_nqueens(4), sinks=[rec]))
    return list(rec)

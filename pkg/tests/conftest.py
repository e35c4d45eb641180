"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""
import pytest

_criteria: dict[str, tuple[str, str]] = {}


def _criterion(nodeid: str) -> str | None:
    if "test_acceptance.py::test_criterion_" not in nodeid:
        return None
    return nodeid.split("test_criterion_", 1)[1]


def pytest_runtest_logreport(report):
    name = _criterion(report.nodeid)
    if name is None:
        return
    detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
    if report.when == "call" or report.outcome != "passed":
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if report.outcome == "skipped" and not detail and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        _criteria.setdefault(name, (outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_", 1)[0])):
        outcome, detail = _criteria[name]
        num, _, label = name.partition("_")
        line = f"criterion {num:>2} {outcome}  {label}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)


@pytest.fixture
def detail(record_property):
    """``detail(msg)`` attaches a summary string to the acceptance line of the running test."""
    def add(msg: str) -> None:
        record_property("detail", msg)
    return add

import time

import pytest

_LINES: list[str] = []


def pytest_sessionstart(session):
    session.config.stash["t0"] = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # the whole-suite timing criterion must run after everything else
    last = [it for it in items if it.name == "test_criterion_10_suite_runtime"]
    items[:] = [it for it in items if it not in last] + last


@pytest.fixture
def criterion():
    """``record(label, ok, detail)`` prints and collects one pass/fail line."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}" + (f": {detail}" if detail else "")
        print(line)
        _LINES.append(line)
        return ok

    return record


@pytest.fixture
def session_elapsed(request):
    t0 = request.config.stash["t0"]
    return lambda: time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)

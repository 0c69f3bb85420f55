from __future__ import annotations

import time

import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def acceptance(request):
    """Run one acceptance check under its time limit and log a result line."""
    lines = request.config.stash[_LINES_KEY]

    def run(number: int, title: str, limit: float, body):
        start = time.perf_counter()
        error = None
        detail = ""
        try:
            detail = body() or ""
        except AssertionError as exc:
            error = exc
        elapsed = time.perf_counter() - start
        ok = error is None and elapsed < limit
        why = detail if error is None else f"assertion: {error}"
        if error is None and elapsed >= limit:
            why = f"time limit exceeded; {detail}"
        line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'} "
                f"{elapsed:7.2f}s / {limit:g}s  {title}: {why}")
        lines.append((number, line))
        print(line)
        if error is not None:
            raise error
        assert elapsed < limit, line

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)

import contextlib
import time

import pytest

_RESULTS = []


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""
        self.elapsed = 0.0


@contextlib.contextmanager
def _measure(number: int, title: str, limit: float):
    c = Criterion(number, title, limit)
    start = time.perf_counter()
    ok = False
    try:
        yield c
        c.elapsed = time.perf_counter() - start
        assert c.elapsed < limit, f"took {c.elapsed:.1f}s, limit {limit}s"
        ok = True
    finally:
        c.elapsed = time.perf_counter() - start
        _RESULTS.append((c, ok))
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({c.elapsed:.2f}s / {limit:g}s)"
        print("\n" + line + (f" {c.detail}" if c.detail else ""))


@pytest.fixture
def criterion():
    return _measure


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for c, ok in sorted(_RESULTS, key=lambda r: r[0].number):
        extra = f" [{c.detail}]" if c.detail else ""
        terminalreporter.write_line(
            f"criterion {c.number}: {'PASS' if ok else 'FAIL'} - {c.title} "
            f"({c.elapsed:.2f}s, limit {c.limit:g}s){extra}")

import time
from contextlib import contextmanager

ACCEPTANCE_RESULTS = []


@contextmanager
def criterion(number, title, budget_s):
    """Record pass/fail and wall time of one acceptance criterion."""
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed > budget_s:
            detail = f"over time budget: {elapsed:.2f}s > {budget_s}s"
            raise AssertionError(detail)
        status = "PASS"
    except BaseException as exc:
        detail = detail or f"{type(exc).__name__}: {exc}".splitlines()[0]
        raise
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{status}] criterion {number:>2}: {title} ({elapsed:.2f}s)"
        ACCEPTANCE_RESULTS.append(line + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

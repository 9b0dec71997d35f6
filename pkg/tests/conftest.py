import numpy as np
import pytest

_ACCEPTANCE_LINES: list[tuple[int, str, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_criterion():
    """Record (number, passed, detail) for the acceptance summary; also print it."""

    def record(num: int, passed: bool, detail: str):
        verdict = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append((num, verdict, detail))
        print(f"criterion {num:2d}: {verdict}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {detail}")

import pytest
from hypothesis import settings

from monop import catalog as cat
from monop.measure import LineMeasure
from monop.symbols import affine_symbols

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def measures():
    out = {}
    for e in cat.ENTRIES:
        sym = affine_symbols(e.spec())
        if sym.intercept >= 0:  # T1 is not a self-map and has no line measure
            out[e.name] = LineMeasure.from_symbols(sym)
    return out


ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append((number, f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"))
        print(ACCEPTANCE_LINES[-1][1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from ksobs.spectral import eigenfunction_value


def brute_project(f, N, M=4096):
    """Quadrature oracle: midpoint rule against each basis function directly."""
    x = (np.arange(M) + 0.5) / M
    fx = f(x)
    h = np.full(N, 0.5)
    h[0] = 1.0
    return np.array([np.mean(fx * eigenfunction_value(j, x)) for j in range(1, N + 1)]) / h


def series(c, x):
    return sum(cj * eigenfunction_value(j, x) for j, cj in enumerate(c, start=1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


def record_criterion(number, title, ok, detail):
    ACCEPTANCE[number] = (title, ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:>2}. {title}: {detail}")

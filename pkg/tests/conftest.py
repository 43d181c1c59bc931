import numpy as np
import pytest


def random_contraction(rng, m, rho):
    """Gaussian matrix rescaled to spectral radius ``rho`` (generally non-normal)."""
    A = rng.normal(size=(m, m))
    return A * (rho / np.max(np.abs(np.linalg.eigvals(A))))


def contraction_suite(m, count=20, seed=2024):
    """Seeded random contractions with spectral radius in [0.3, 0.95]."""
    rng = np.random.default_rng(seed + m)
    rhos = np.linspace(0.3, 0.95, count)
    return [random_contraction(rng, m, rho) for rho in rhos]


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    """Log one acceptance verdict; printed live and again in the terminal summary."""
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

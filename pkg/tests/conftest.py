import numpy as np
import pytest
from hypothesis import strategies as st

from aniso_rt.geometry import Simplex


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_simplices(d, n, seed=0, thin=3.0):
    """Seeded random simplices with edge-length ratios up to 10**thin."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        scales = 10.0 ** rng.uniform(-thin, 0.0, size=d)
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        V = rng.normal(size=(d + 1, d)) * scales @ Q.T + rng.normal(size=d)
        try:
            out.append(Simplex(V))
        except ValueError:
            continue
    return out


@st.composite
def simplices(draw, d):
    """Hypothesis strategy for triangles or tetrahedra with aspect ratios up to 1e4."""
    seed = draw(st.integers(0, 2**32 - 1))
    thin = draw(st.floats(0.0, 4.0))
    return random_simplices(d, 1, seed=seed, thin=thin)[0]


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance verdict lines collected by test_acceptance."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])

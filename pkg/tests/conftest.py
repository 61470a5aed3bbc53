import numpy as np
import pytest
from hypothesis import settings

from porousfilms import build_grid

# compiled kernels make the first call of a session slow; timings are not
# what these property tests are about
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def reference_rhs(f, g, R, R_mu, dx, eps=0.0, F=None, G=None):
    """Face-flux formula written out directly with numpy, no kernels."""
    F = f if F is None else F
    G = g if G is None else G

    def mob(u, shift=0.0):
        return np.maximum(0.0, 0.5 * ((u[:-1] - shift) + (u[1:] - shift)))

    phi_f = ((1 + R) * mob(f) * np.diff(f) + R * mob(f, eps) * np.diff(G)) / dx
    phi_g = (R_mu * mob(g) * np.diff(g) + R_mu * mob(g, eps) * np.diff(F)) / dx
    phi_f = np.concatenate(([0.0], phi_f, [0.0]))
    phi_g = np.concatenate(([0.0], phi_g, [0.0]))
    return np.diff(phi_f) / dx, np.diff(phi_g) / dx


def dense_helmholtz(n, dx, eps):
    a = eps**2 / dx**2
    m = np.diag(np.full(n, 1 + 2 * a)) - a * (np.eye(n, k=1) + np.eye(n, k=-1))
    m[0, 0] = m[-1, -1] = 1 + a
    return m


@pytest.fixture
def grid64():
    return build_grid(64, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, shown at the end of every session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

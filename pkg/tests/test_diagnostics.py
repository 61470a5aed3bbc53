import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from porousfilms import (
    EquilibriumPair,
    Params,
    State,
    build_grid,
    dissipation_d1,
    dissipation_d2,
    dist2_to_equilibrium,
    energy_e1,
    energy_e2,
    fit_decay_rate,
    flat_equilibrium,
    linearized_decay_rate,
    lyapunov_f,
    lyapunov_parts,
)
from porousfilms.config import RunConfig
from porousfilms.initial import InitialSpec, ProfileSpec
from porousfilms.simulation import run
from porousfilms.smoother import neumann_eigenvalue

nonneg = arrays(np.float64, 16, elements=st.floats(0.0, 4.0))
coef = st.floats(0.05, 20.0)


def test_energies_at_unit_state():
    grid = build_grid(10, 2.0)
    s = State(np.ones(10), np.ones(10))
    p = Params(3.0, 0.5)
    assert energy_e1(s, p, grid) == 0.0
    assert energy_e2(s, p, grid) == pytest.approx(2.0 * (1 + 3.0 * 4))


def test_e1_vacuum_convention():
    grid = build_grid(4, 1.0)
    s = State(np.zeros(4), np.zeros(4))
    # 0 ln 0 = 0, so the density is 1 in both fields
    assert energy_e1(s, Params(2.0, 0.5), grid) == pytest.approx(1 + 2.0 / 0.5)


@given(nonneg, nonneg, coef, coef)
def test_e1_quadratic_bound(f, g, R, R_mu):
    grid = build_grid(16, 1.0)
    bound = grid.dx * np.sum((f - 1) ** 2 + R / R_mu * (g - 1) ** 2)
    assert energy_e1(State(f, g), Params(R, R_mu), grid) <= bound * (1 + 1e-12) + 1e-15


def _loop_e2(f, g, R, dx):
    return dx * math.fsum(fi * fi + R * (fi + gi) ** 2 for fi, gi in zip(f, g))


def _loop_d2(f, g, R, R_mu, dx):
    terms = []
    for i in range(len(f) - 1):
        mf = max(0.0, 0.5 * (f[i] + f[i + 1]))
        mg = max(0.0, 0.5 * (g[i] + g[i + 1]))
        fx = (f[i + 1] - f[i]) / dx
        gx = (g[i + 1] - g[i]) / dx
        terms.append(mf * ((1 + R) * fx + R * gx) ** 2 + R * R_mu * mg * (fx + gx) ** 2)
    return dx * math.fsum(terms)


@given(nonneg, nonneg, coef, coef)
def test_e2_and_d2_match_loop_oracle(f, g, R, R_mu):
    grid = build_grid(16, 0.7)
    s, p = State(f, g), Params(R, R_mu)
    assert energy_e2(s, p, grid) == pytest.approx(_loop_e2(f, g, R, grid.dx), rel=1e-12, abs=1e-300)
    assert dissipation_d2(s, p, grid) == pytest.approx(_loop_d2(f, g, R, R_mu, grid.dx), rel=1e-12, abs=1e-300)


def test_d1_ramp():
    grid = build_grid(20, 2.0)
    s = 0.7
    state = State(s * grid.cell_centers, np.zeros(20))
    assert dissipation_d1(state, Params(1, 1), grid) == pytest.approx(0.5 * s**2 * (grid.length - grid.dx), rel=1e-13)
    state = State(np.zeros(20), s * grid.cell_centers)
    R = 2.0
    assert dissipation_d1(state, Params(R, 1), grid) == pytest.approx(
        R / (1 + 2 * R) * s**2 * (grid.length - grid.dx), rel=1e-13)


@pytest.mark.parametrize("delta", [-0.5, -0.01, 0.0, 0.2, 3.0])
def test_lyapunov_closed_form_for_constant_states(delta):
    grid = build_grid(8, 1.5)
    A, B, R = 0.8, 1.7, 2.5
    eq = EquilibriumPair(A, B)
    s = State(np.full(8, A * (1 + delta)), np.full(8, B))
    entropy, quad = lyapunov_parts(s, Params(R, 0.4), grid, eq)
    assert entropy == pytest.approx(grid.length * (A * (1 + delta) * math.log1p(delta) - A * delta), rel=1e-12, abs=1e-15)
    assert quad == pytest.approx(0.5 * grid.length * (1 + R) * (A * delta) ** 2, rel=1e-12, abs=1e-15)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), coef, coef, st.floats(1e-4, 0.3))
def test_lyapunov_nonnegative_near_equilibrium(seed, R, R_mu, amp):
    grid = build_grid(32, 1.0)
    rng = np.random.default_rng(seed)
    s = State(1 + amp * rng.uniform(-1, 1, 32), 1 + amp * rng.uniform(-1, 1, 32))
    eq = flat_equilibrium(s, grid)
    assert lyapunov_f(s, Params(R, R_mu), grid, eq) >= 0


@given(nonneg, nonneg, coef, coef)
def test_distance_controls_entropy(f, g, R, R_mu):
    grid = build_grid(16, 1.0)
    s = State(f + 0.01, g + 0.01)
    eq = flat_equilibrium(s, grid)
    entropy, _ = lyapunov_parts(s, Params(R, R_mu), grid, eq)
    d2f, d2g = dist2_to_equilibrium(s, eq, grid)
    c = min(eq.f_flat, R_mu * eq.g_flat / R)
    assert c * entropy <= (d2f + d2g) * (1 + 1e-10) + 1e-14


def test_lyapunov_rejects_vacuum_equilibrium():
    grid = build_grid(4, 1.0)
    with pytest.raises(ValueError):
        lyapunov_f(State(np.zeros(4), np.ones(4)), Params(1, 1), grid, EquilibriumPair(0.0, 1.0))


def test_flat_equilibrium_and_cosine_distance():
    grid = build_grid(128, 2.0)
    a = 0.3
    x = grid.cell_centers
    s = State(1.5 + a * np.cos(np.pi * x / grid.length), np.full(128, 0.25))
    eq = flat_equilibrium(s, grid)
    assert eq.f_flat == pytest.approx(1.5, rel=1e-14)
    assert eq.g_flat == pytest.approx(0.25, rel=1e-14)
    d2f, d2g = dist2_to_equilibrium(s, eq, grid)
    assert d2f == pytest.approx(a**2 * grid.length / 2, rel=1e-12)
    assert d2g == pytest.approx(0.0, abs=1e-28)


def _series(times, values):
    return [SimpleNamespace(time=t, dist2_f=v, dist2_g=0.0) for t, v in zip(times, values)]


def test_fit_recovers_exponential():
    t = np.linspace(0, 3, 31)
    fit = fit_decay_rate(_series(t, 3e-3 * np.exp(-5 * t)))
    assert fit.omega == pytest.approx(5.0, rel=1e-10)
    assert fit.amplitude == pytest.approx(3e-3, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
    assert fit.n_samples == 31 and fit.window == (0.0, 3.0)


def test_fit_window_and_errors():
    t = np.linspace(0, 10, 101)
    d = 1e-1 * np.exp(-4 * t)
    fit = fit_decay_rate(_series(t, d), t_max=5.0)
    assert fit.window[0] > 0  # 0.1 is above the default ceiling
    assert fit.window[1] == 5.0
    with pytest.raises(ValueError):
        fit_decay_rate(_series(t, np.full_like(t, 1e-25)))
    with pytest.raises(ValueError):
        fit_decay_rate(_series(t[:2], d[:2] * 1e-3))


def test_linearized_rate_examples():
    grid = build_grid(64, 1.0)
    k2 = neumann_eigenvalue(1, grid)
    eq = EquilibriumPair(1.0, 1.0)
    assert linearized_decay_rate(Params(1.0, 1.0), eq, grid) == pytest.approx((3 - math.sqrt(5)) * k2, rel=1e-14)
    # weak coupling: the slower of the two decoupled porous-medium rates
    eq = EquilibriumPair(2.0, 0.5)
    assert linearized_decay_rate(Params(1e-12, 3.0), eq, grid) == pytest.approx(2 * 1.5 * k2, rel=1e-9)


@given(coef, coef, st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 10))
def test_linearized_rate_scaling(R, R_mu, A, B, c):
    grid = build_grid(32, 1.0)
    p = Params(R, R_mu)
    base = linearized_decay_rate(p, EquilibriumPair(A, B), grid)
    assert base > 0
    assert linearized_decay_rate(p, EquilibriumPair(c * A, c * B), grid) == pytest.approx(c * base, rel=1e-12)


def test_energies_decrease_along_short_run():
    init = InitialSpec(ProfileSpec("bump", {"base": 0.3, "height": 1.0, "center": 0.3, "width": 0.1}),
                       ProfileSpec("cosine_perturbation", {"base": 0.8, "amplitude": 0.4, "mode": 3}))
    cfg = RunConfig(build_grid(64, 1.0), Params(2.0, 0.5), "degenerate", init, 0.05, 0.0025)
    _, series = run(cfg)
    e1 = np.array([r.e1 for r in series])
    e2 = np.array([r.e2 for r in series])
    assert np.all(np.diff(e1) <= 0) and np.all(np.diff(e2) <= 0)

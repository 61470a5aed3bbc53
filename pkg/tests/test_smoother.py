import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from porousfilms import HelmholtzOperator, Params, build_grid, discrete_mass, helmholtz_solve, regularize_initial_data
from porousfilms.core import grad_l2, l2_norm
from porousfilms.smoother import neumann_eigenvalue, neumann_laplacian

from conftest import dense_helmholtz


def test_matrix_structure(grid64):
    op = HelmholtzOperator(grid64, 0.05)
    m = op.matrix()
    np.testing.assert_allclose(m, dense_helmholtz(64, grid64.dx, 0.05), rtol=0, atol=0)
    np.testing.assert_array_equal(m, m.T)
    np.testing.assert_allclose(m.sum(axis=1), 1.0, rtol=1e-13)
    off = np.abs(m).sum(axis=1) - np.abs(np.diag(m))
    assert np.all(np.abs(np.diag(m)) > off)
    assert np.all(np.linalg.eigvalsh(m) > 0)


def test_constant_is_fixed(grid64):
    op = HelmholtzOperator(grid64, 0.1)
    np.testing.assert_allclose(helmholtz_solve(op, np.full(64, 3.7)), 3.7, rtol=1e-14)


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.5])
@pytest.mark.parametrize("k", [1, 3])
def test_cosine_mode_is_exact_eigenvector(grid64, eps, k):
    x = grid64.cell_centers
    u = np.cos(k * math.pi * x / grid64.length)
    # residual check of the eigen-relation against the stencil itself
    np.testing.assert_allclose(-neumann_laplacian(u, grid64), neumann_eigenvalue(k, grid64) * u, atol=1e-9)
    ktilde2 = (2 - 2 * math.cos(k * math.pi * grid64.dx / grid64.length)) / grid64.dx**2
    U = helmholtz_solve(HelmholtzOperator(grid64, eps), u)
    np.testing.assert_allclose(U, u / (1 + eps**2 * ktilde2), rtol=1e-12, atol=1e-14)


def test_matches_dense_solve(grid64, rng):
    u = rng.normal(size=64)
    op = HelmholtzOperator(grid64, 0.07)
    np.testing.assert_allclose(op.solve(u), np.linalg.solve(dense_helmholtz(64, grid64.dx, 0.07), u), rtol=1e-12, atol=1e-13)


def test_rejects_bad_input(grid64):
    op = HelmholtzOperator(grid64, 0.1)
    with pytest.raises(ValueError):
        op.solve(np.ones(63))
    with pytest.raises(ValueError):
        op.solve(np.full(64, np.nan))
    with pytest.raises(ValueError):
        HelmholtzOperator(grid64, 0.0)


field = arrays(np.float64, 32, elements=st.floats(-10, 10, allow_nan=False))
eps_st = st.floats(0.005, 0.9)


@given(field, eps_st)
def test_smoother_properties(u, eps):
    grid = build_grid(32, 1.0)
    U = HelmholtzOperator(grid, eps).solve(u)
    scale = discrete_mass(np.abs(u), grid) + 1e-300
    assert abs(discrete_mass(U, grid) - discrete_mass(u, grid)) <= 1e-13 * max(scale, 1.0)
    assert U.min() >= u.min() - 1e-12 and U.max() <= u.max() + 1e-12
    # round-off floor for difference quotients of O(max|u|) data
    tiny = 1e-13 * (np.abs(u).max() + 1.0) / grid.dx
    assert l2_norm(U, grid) <= l2_norm(u, grid) * (1 + 1e-12) + 1e-14
    assert grad_l2(U, grid) <= grad_l2(u, grid) * (1 + 1e-12) + tiny
    lap = neumann_laplacian(U, grid)
    assert eps * l2_norm(lap, grid) <= grad_l2(u, grid) * (1 + 1e-9) + tiny / grid.dx


@given(field, field, eps_st)
def test_self_adjoint(u, v, eps):
    grid = build_grid(32, 1.0)
    op = HelmholtzOperator(grid, eps)
    a = np.dot(op.solve(u), v)
    b = np.dot(u, op.solve(v))
    assert abs(a - b) <= 1e-12 * (np.abs(u).sum() * np.abs(v).sum() + 1e-300)


def test_eps_to_zero_second_order():
    grid = build_grid(2048, 1.0)
    u = 1.0 + np.cos(math.pi * grid.cell_centers)
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    err = [l2_norm(HelmholtzOperator(grid, e).solve(u) - u, grid) for e in eps]
    slope = np.polyfit(np.log(eps), np.log(err), 1)[0]
    # the largest eps is only marginally asymptotic (eps^2 k^2 ~ 0.1)
    assert slope == pytest.approx(2.0, abs=0.1)


def test_regularize_zero_data():
    grid = build_grid(16, 1.0)
    s = regularize_initial_data(np.zeros(16), np.zeros(16), Params(1, 1, 0.1), grid)
    np.testing.assert_allclose(s.f, 0.1, rtol=1e-15)
    np.testing.assert_allclose(s.g, 0.1, rtol=1e-15)
    assert s.time == 0.0


def test_regularize_bounds(rng):
    grid = build_grid(100, 2.0)
    eps = 0.2
    f0 = np.where(rng.random(100) < 0.5, 0.0, rng.random(100) * 3)
    g0 = rng.random(100)
    s = regularize_initial_data(f0, g0, Params(1, 1, eps), grid)
    assert s.f.min() >= eps and s.g.min() >= eps
    assert discrete_mass(s.f, grid) == pytest.approx(discrete_mass(f0, grid) + eps * grid.length, rel=1e-13)
    assert l2_norm(s.f - eps, grid) <= l2_norm(f0, grid)
    assert l2_norm(s.f, grid) <= l2_norm(f0, grid) + eps * math.sqrt(grid.length)


def test_regularize_rejects_negative():
    grid = build_grid(4, 1.0)
    with pytest.raises(ValueError):
        regularize_initial_data([0, -1e-3, 0, 0], np.zeros(4), Params(1, 1, 0.1), grid)
    with pytest.raises(ValueError):
        regularize_initial_data(np.zeros(4), np.zeros(4), Params(1, 1, 0.0), grid)


def _rational_solve(op, u):
    """Exact Thomas elimination in rationals on the float64 input."""
    a = Fraction(op.epsilon) ** 2 / Fraction(op.grid.dx) ** 2
    n = len(u)
    diag = [1 + 2 * a] * n
    diag[0] = diag[-1] = 1 + a
    c, y = [Fraction(0)] * n, [Fraction(0)] * n
    p = diag[0]
    c[0], y[0] = -a / p, Fraction(u[0]) / p
    for i in range(1, n):
        p = diag[i] + a * c[i - 1]
        c[i], y[i] = -a / p, (Fraction(u[i]) + a * y[i - 1]) / p
    x = [Fraction(0)] * n
    x[-1] = y[-1]
    for i in range(n - 2, -1, -1):
        x[i] = y[i] - c[i] * x[i + 1]
    return np.array([float(v) for v in x])


@settings(max_examples=30)
@given(st.integers(2, 40), st.floats(1e-3, 0.99), st.floats(1e-3, 10.0), st.integers(0, 2**32 - 1))
def test_nonnegative_data_solved_to_componentwise_accuracy(n, eps, length, seed):
    op = HelmholtzOperator(build_grid(n, length), eps)
    u = np.random.default_rng(seed).uniform(0, 1, n)
    exact = _rational_solve(op, u)
    assert np.all(np.abs(op.solve(u) - exact) <= 1e-14 * n * exact)


@pytest.mark.parametrize("eps, n", [(0.9, 1000), (0.5, 4000), (0.99, 20)])
def test_mass_kept_when_very_stiff(eps, n):
    grid = build_grid(n, 0.01)  # eps^2/dx^2 up to ~4e9
    u = np.random.default_rng(n).uniform(0, 1, n)
    U = HelmholtzOperator(grid, eps).solve(u)
    assert abs(U.sum() - u.sum()) <= 1e-14 * u.sum()

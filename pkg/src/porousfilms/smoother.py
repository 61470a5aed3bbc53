"""Helmholtz smoothing ``(1 - eps^2 d_xx)^{-1}`` with Neumann ends.

The Laplacian is the 3-point stencil with ghost cells mirrored across both
end faces, so constants are in its kernel and the discrete mass of the input
is reproduced exactly by the output.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .core import Grid, Params, State


class HelmholtzOperator:
    """Factorised ``I - eps^2 D2`` on a fixed grid.

    Immutable after construction; :meth:`solve` allocates its own output so
    the operator can be shared between threads.
    """

    def __init__(self, grid: Grid, epsilon: float):
        if not (math.isfinite(epsilon) and epsilon > 0):
            raise ValueError(f"epsilon must be finite and > 0, got {epsilon}")
        self.grid = grid
        self.epsilon = float(epsilon)
        n = grid.n_cells
        a = self.epsilon**2 / grid.dx**2
        diag = np.full(n, 1.0 + 2.0 * a)
        diag[0] = diag[-1] = 1.0 + a
        lower = np.full(n, -a)
        upper = np.full(n, -a)
        lower[0] = 0.0
        upper[-1] = 0.0
        self.diag, self.lower, self.upper = diag, lower, upper
        self.cp, self.inv = _kernels.helmholtz_factor(a, n)
        for arr in (self.diag, self.lower, self.upper, self.cp, self.inv):
            arr.setflags(write=False)

    def matrix(self) -> np.ndarray:
        """Dense copy of the operator matrix (for tests and small grids)."""
        n = self.grid.n_cells
        m = np.diag(self.diag)
        m[np.arange(1, n), np.arange(n - 1)] = self.lower[1:]
        m[np.arange(n - 1), np.arange(1, n)] = self.upper[:-1]
        return m

    def solve(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.grid.n_cells,):
            raise ValueError(f"expected shape ({self.grid.n_cells},), got {u.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("input contains non-finite entries")
        out = np.empty_like(u)
        _kernels.thomas_solve(self.lower, self.cp, self.inv, np.ascontiguousarray(u), out)
        return out

    def __repr__(self):
        return f"HelmholtzOperator(n_cells={self.grid.n_cells}, length={self.grid.length}, epsilon={self.epsilon})"


def helmholtz_solve(op: HelmholtzOperator, u) -> np.ndarray:
    return op.solve(u)


def neumann_laplacian(u, grid: Grid) -> np.ndarray:
    """3-point Laplacian with mirrored ghost cells."""
    u = np.asarray(u, dtype=np.float64)
    padded = np.concatenate(([u[0]], u, [u[-1]]))
    return (padded[2:] - 2.0 * u + padded[:-2]) / grid.dx**2


def neumann_eigenvalue(k: int, grid: Grid) -> float:
    """Discrete eigenvalue of ``-D2`` for the mode ``cos(k pi x / L)``.

    ``(2 - 2 cos t) / dx^2`` written as ``4 sin^2(t/2) / dx^2`` to avoid
    cancellation for low modes.
    """
    s = math.sin(0.5 * k * math.pi * grid.dx / grid.length)
    return 4.0 * s * s / grid.dx**2


def regularize_initial_data(f0, g0, params: Params, grid: Grid) -> State:
    """Smooth both profiles and lift them by ``epsilon``.

    Both elimination sweeps of the M-matrix solve only add nonnegative
    terms, so nonnegative data end up ``>= epsilon`` without clipping.
    """
    eps = params.epsilon
    if eps <= 0:
        raise ValueError("regularised initial data need epsilon > 0")
    f0 = np.asarray(f0, dtype=np.float64)
    g0 = np.asarray(g0, dtype=np.float64)
    for name, u in (("f0", f0), ("g0", g0)):
        if not np.all(np.isfinite(u)):
            raise ValueError(f"{name} contains non-finite entries")
        if np.any(u < 0):
            raise ValueError(f"{name} has negative entries (min {u.min():.3e})")
    op = HelmholtzOperator(grid, eps)
    f = op.solve(f0)
    g = op.solve(g0)
    return State(f + eps, g + eps, 0.0)

"""Explicit conservative time stepping for the degenerate, regularised and
porous-medium modes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Grid, Params, State
from .smoother import HelmholtzOperator

MODES = {
    "degenerate": _kernels.MODE_DEGENERATE,
    "regularized": _kernels.MODE_REGULARIZED,
    "pme_g": _kernels.MODE_PME_G,
}


class SimulationAbort(RuntimeError):
    """A time step was rejected; ``time`` is when the failing step started."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.17g}")
        self.time = time


class PositivityError(SimulationAbort):
    pass


class ClampBudgetError(SimulationAbort):
    pass


@dataclass(frozen=True)
class SchemeControls:
    cfl_safety: float = 0.4
    dt_max: float = 1.0
    clamp_tol: float = 1e-12
    clamp_abort_fraction: float = 1e-8

    def __post_init__(self):
        if not (0 < self.cfl_safety <= 1):
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not (math.isfinite(self.dt_max) and self.dt_max > 0):
            raise ValueError(f"dt_max must be finite and > 0, got {self.dt_max}")
        if not (self.clamp_tol >= 0):
            raise ValueError(f"clamp_tol must be >= 0, got {self.clamp_tol}")
        if not (self.clamp_abort_fraction >= 0):
            raise ValueError(f"clamp_abort_fraction must be >= 0, got {self.clamp_abort_fraction}")


@dataclass(frozen=True)
class StepResult:
    state: State
    dt_used: float
    clamp_mass_step: float


def face_mobility(u_left: float, u_right: float) -> float:
    return max(0.0, 0.5 * (u_left + u_right))


def _fields(state: State, grid: Grid):
    if state.f.shape != (grid.n_cells,):
        raise ValueError(f"state has {state.f.shape[0]} cells, grid has {grid.n_cells}")
    return np.ascontiguousarray(state.f), np.ascontiguousarray(state.g)


def _no_smoother(n: int):
    z = np.zeros(n)
    return z, z, z


def rhs_degenerate(state: State, params: Params, grid: Grid):
    """Conservative right-hand side of the unregularised system.

    ``params.epsilon`` is ignored.
    """
    state.validate()
    f, g = _fields(state, grid)
    n = grid.n_cells
    lower, cp, inv = _no_smoother(n)
    df, dg = np.empty(n), np.empty(n)
    _kernels.rhs(f, g, params.R, params.R_mu, 0.0, grid.dx, _kernels.MODE_DEGENERATE,
                 lower, cp, inv, np.empty(n), np.empty(n), df, dg)
    return df, dg


def rhs_regularized(state: State, params: Params, grid: Grid, op: HelmholtzOperator | None = None):
    """Right-hand side with smoothed cross-diffusion and barrier-shifted
    cross mobilities ``f - eps`` and ``g - eps``."""
    if params.epsilon <= 0:
        raise ValueError("rhs_regularized needs epsilon > 0; use rhs_degenerate")
    op = _operator(op, grid, params)
    state.validate()
    f, g = _fields(state, grid)
    n = grid.n_cells
    df, dg = np.empty(n), np.empty(n)
    _kernels.rhs(f, g, params.R, params.R_mu, params.epsilon, grid.dx, _kernels.MODE_REGULARIZED,
                 op.lower, op.cp, op.inv, np.empty(n), np.empty(n), df, dg)
    return df, dg


def _operator(op, grid: Grid, params: Params) -> HelmholtzOperator:
    if op is None:
        return HelmholtzOperator(grid, params.epsilon)
    if op.grid != grid or op.epsilon != params.epsilon:
        raise ValueError(f"{op!r} does not match grid/epsilon of the run")
    return op


def stable_dt(state: State, params: Params, grid: Grid, controls: SchemeControls) -> float:
    f, g = _fields(state, grid)
    return float(_kernels.stable_dt(f, g, params.R, params.R_mu, grid.dx,
                                    controls.cfl_safety, controls.dt_max))


def _mode_code(mode: str, params: Params) -> int:
    try:
        code = MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(MODES)}") from None
    if code == _kernels.MODE_REGULARIZED and params.epsilon <= 0:
        raise ValueError("regularized mode needs epsilon > 0")
    return code


def _raise_abort(status: int, t: float, worst: float):
    if status == _kernels.STATUS_NEGATIVE:
        raise PositivityError(f"positivity failure (entry {worst:.3e} below the clamp window)", t)
    raise ClampBudgetError("clamp budget exceeded", t)


def step(state: State, params: Params, grid: Grid, controls: SchemeControls,
         mode: str = "degenerate", op: HelmholtzOperator | None = None) -> StepResult:
    """Advance by one forward-Euler step of size :func:`stable_dt`.

    In ``pme_g`` mode ``f`` is held at zero and only ``g`` evolves.
    """
    code = _mode_code(mode, params)
    n = grid.n_cells
    if code == _kernels.MODE_REGULARIZED:
        op = _operator(op, grid, params)
        lower, cp, inv = op.lower, op.cp, op.inv
        eps = params.epsilon
    else:
        lower, cp, inv = _no_smoother(n)
        eps = 0.0
    f, g = (a.copy() for a in _fields(state, grid))
    if code == _kernels.MODE_PME_G:
        f[:] = 0.0
    dt = float(_kernels.stable_dt(f, g, params.R, params.R_mu, grid.dx,
                                  controls.cfl_safety, controls.dt_max))
    f_new, g_new = np.empty(n), np.empty(n)
    status, clamp, worst, *_ = _kernels.explicit_step(
        f, g, dt, params.R, params.R_mu, eps, grid.dx, code, lower, cp, inv,
        controls.clamp_tol, controls.clamp_abort_fraction,
        np.empty(n), np.empty(n), f_new, g_new)
    if status != _kernels.STATUS_OK:
        _raise_abort(status, state.time, worst)
    return StepResult(State(f_new, g_new, state.time + dt), dt, float(clamp))


def advance(f: np.ndarray, g: np.ndarray, t: float, t_target: float, params: Params, grid: Grid,
            controls: SchemeControls, mode: str, op: HelmholtzOperator | None, acc: np.ndarray) -> float:
    """Advance the work arrays ``(f, g)`` in place up to ``t_target``.

    Uses the same compiled step as :func:`step`.  ``acc`` accumulates
    ``[clamp_mass, int d1 dt, int d2 dt, int rho dt, steps]``.
    """
    code = _mode_code(mode, params)
    if code == _kernels.MODE_REGULARIZED:
        op = _operator(op, grid, params)
        lower, cp, inv, eps = op.lower, op.cp, op.inv, params.epsilon
    else:
        lower, cp, inv = _no_smoother(grid.n_cells)
        eps = 0.0
    status, t_new, worst = _kernels.advance(
        f, g, float(t), float(t_target), params.R, params.R_mu, eps, grid.dx, code,
        lower, cp, inv, controls.cfl_safety, controls.dt_max,
        controls.clamp_tol, controls.clamp_abort_fraction, acc)
    if status != _kernels.STATUS_OK:
        _raise_abort(status, t_new, worst)
    return t_new

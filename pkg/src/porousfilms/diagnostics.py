"""Energies, dissipation rates, the Lyapunov functional and decay fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DiagnosticsRecord, Grid, Params, State, discrete_mass, grad_l2
from .smoother import HelmholtzOperator, neumann_eigenvalue


@dataclass(frozen=True)
class EquilibriumPair:
    f_flat: float
    g_flat: float


@dataclass(frozen=True)
class DecayFit:
    omega: float
    amplitude: float
    window: tuple
    r_squared: float
    n_samples: int


def _entropy_density(z: np.ndarray) -> np.ndarray:
    """``z ln z - z + 1`` with ``0 ln 0 = 0``."""
    out = np.ones_like(z)
    pos = z > 0
    zp = z[pos]
    out[pos] = zp * np.log(zp) - zp + 1.0
    return out


def _relative_entropy_density(z: np.ndarray, ref: float) -> np.ndarray:
    """``z ln(z/ref) - z + ref``, equal to ``ref`` at ``z = 0``."""
    out = np.full_like(z, ref)
    pos = z > 0
    zp = z[pos]
    out[pos] = zp * np.log(zp / ref) - zp + ref
    return out


def _check_nonnegative(state: State):
    if np.any(state.f < 0) or np.any(state.g < 0):
        raise ValueError("entropy needs f, g >= 0")


def energy_e1(state: State, params: Params, grid: Grid) -> float:
    """Entropy ``int (f ln f - f + 1) + R/R_mu (g ln g - g + 1) dx``."""
    _check_nonnegative(state)
    w = params.R / params.R_mu
    return float(grid.dx * np.sum(_entropy_density(state.f) + w * _entropy_density(state.g)))


def energy_e2(state: State, params: Params, grid: Grid) -> float:
    """Quadratic energy ``int f^2 + R (f + g)^2 dx``."""
    h = state.f + state.g
    return float(grid.dx * np.sum(state.f**2 + params.R * h**2))


def dissipation_d1(state: State, params: Params, grid: Grid) -> float:
    d1, _, _ = _kernels.face_dissipation(np.ascontiguousarray(state.f), np.ascontiguousarray(state.g),
                                         params.R, params.R_mu, grid.dx)
    return float(d1)


def dissipation_d2(state: State, params: Params, grid: Grid) -> float:
    _, d2, _ = _kernels.face_dissipation(np.ascontiguousarray(state.f), np.ascontiguousarray(state.g),
                                         params.R, params.R_mu, grid.dx)
    return float(d2)


def flat_equilibrium(state0: State, grid: Grid) -> EquilibriumPair:
    return EquilibriumPair(discrete_mass(state0.f, grid) / grid.length,
                           discrete_mass(state0.g, grid) / grid.length)


def dist2_to_equilibrium(state: State, eq: EquilibriumPair, grid: Grid):
    df = state.f - eq.f_flat
    dg = state.g - eq.g_flat
    return float(grid.dx * np.dot(df, df)), float(grid.dx * np.dot(dg, dg))


def lyapunov_parts(state: State, params: Params, grid: Grid, eq: EquilibriumPair,
                   op: HelmholtzOperator | None = None):
    """Return the (relative entropy, quadratic) parts of the Lyapunov functional.

    Without a smoother (degenerate runs) the smoothed fields are the fields
    themselves.
    """
    A, B = eq.f_flat, eq.g_flat
    if not (A > 0 and B > 0):
        raise ValueError(f"Lyapunov functional needs positive equilibrium, got A={A}, B={B}")
    _check_nonnegative(state)
    f, g = state.f, state.g
    if op is None:
        F, G = f, g
    else:
        F, G = op.solve(f), op.solve(g)
    R = params.R
    w = R / params.R_mu
    entropy = grid.dx * np.sum(_relative_entropy_density(f, A) + w * _relative_entropy_density(g, B))
    fa, gb = f - A, g - B
    quad = 0.5 * grid.dx * np.sum(fa**2 + R * (fa**2 + gb**2 + gb * (F - A) + fa * (G - B)))
    return float(entropy), float(quad)


def lyapunov_f(state: State, params: Params, grid: Grid, eq: EquilibriumPair,
               op: HelmholtzOperator | None = None) -> float:
    entropy, quad = lyapunov_parts(state, params, grid, eq, op)
    return entropy + quad


def linearized_decay_rate(params: Params, eq: EquilibriumPair, grid: Grid) -> float:
    """Decay rate of the squared L2 distance for small perturbations of the
    flat state, from the slowest discrete Neumann mode."""
    A, B = eq.f_flat, eq.g_flat
    if not (A > 0 and B > 0):
        raise ValueError(f"linearised rate needs positive equilibrium, got A={A}, B={B}")
    R, Rm = params.R, params.R_mu
    tr = (1.0 + R) * A + Rm * B
    det = A * Rm * B
    # tr - sqrt(tr^2 - 4 det) cancels badly when det << tr^2
    lam_max = 0.5 * (tr + math.sqrt(tr * tr - 4.0 * det))
    lam_min = det / lam_max
    return 2.0 * lam_min * neumann_eigenvalue(1, grid)


def fit_decay_rate(series, d2_floor: float = 1e-20, d2_ceil: float = 1e-2,
                   t_min: float = -math.inf, t_max: float = math.inf) -> DecayFit:
    """Least-squares fit of ``ln(dist2_f + dist2_g)`` against time.

    Only samples with ``d2_floor < dist2 < d2_ceil`` and ``t_min <= t <= t_max``
    enter the fit.  ``omega`` is minus the slope.
    """
    t = np.array([r.time for r in series], dtype=float)
    d = np.array([r.dist2_f + r.dist2_g for r in series], dtype=float)
    keep = (d > d2_floor) & (d < d2_ceil) & (t >= t_min) & (t <= t_max)
    if keep.sum() < 3:
        raise ValueError(f"need at least 3 samples in the fit window, found {int(keep.sum())}")
    t, y = t[keep], np.log(d[keep])
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(-float(slope), float(math.exp(intercept)), (float(t[0]), float(t[-1])),
                    max(0.0, min(1.0, r2)), int(t.size))


def make_record(state: State, params: Params, grid: Grid, eq: EquilibriumPair,
                acc=None) -> DiagnosticsRecord:
    """Bundle all per-sample diagnostics.  ``acc`` carries the running totals
    from the stepper (clamp mass, time integrals, step count)."""
    acc = np.zeros(5) if acc is None else acc
    f, g = np.ascontiguousarray(state.f), np.ascontiguousarray(state.g)
    d1, d2, _ = _kernels.face_dissipation(f, g, params.R, params.R_mu, grid.dx)
    d2f, d2g = dist2_to_equilibrium(state, eq, grid)
    return DiagnosticsRecord(
        time=state.time,
        mass_f=discrete_mass(f, grid),
        mass_g=discrete_mass(g, grid),
        e1=energy_e1(state, params, grid),
        e2=energy_e2(state, params, grid),
        d1_rate=float(d1),
        d2_rate=float(d2),
        min_f=float(f.min()),
        min_g=float(g.min()),
        clamp_mass_cum=float(acc[0]),
        dist2_f=d2f,
        dist2_g=d2g,
        grad_f_l2=grad_l2(f, grid),
        grad_g_l2=grad_l2(g, grid),
        d1_int=float(acc[1]),
        d2_int=float(acc[2]),
        rho_int=float(acc[3]),
        steps=int(acc[4]),
    )

"""Finite-volume simulation of two stacked thin films in a porous medium.

The unknowns are the lower-layer height ``f`` and the upper-layer thickness
``g`` (the free surface is ``h = f + g``).  Both the degenerate system and its
Helmholtz-smoothed regularisation are supported, together with diagnostics for
mass, the entropy and quadratic energies, and decay towards flat equilibria.
"""

from .core import (
    DiagnosticsRecord,
    Grid,
    Params,
    State,
    build_grid,
    discrete_mass,
)
from .smoother import HelmholtzOperator, helmholtz_solve, regularize_initial_data
from .dynamics import (
    ClampBudgetError,
    PositivityError,
    SchemeControls,
    SimulationAbort,
    StepResult,
    face_mobility,
    rhs_degenerate,
    rhs_regularized,
    stable_dt,
    step,
)
from .diagnostics import (
    DecayFit,
    EquilibriumPair,
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
from .initial import InitialSpec, ProfileSpec, build_initial
from .config import ConfigError, RunConfig, parse_config
from .simulation import run

__all__ = [
    "ClampBudgetError",
    "ConfigError",
    "DecayFit",
    "DiagnosticsRecord",
    "EquilibriumPair",
    "Grid",
    "HelmholtzOperator",
    "InitialSpec",
    "Params",
    "PositivityError",
    "ProfileSpec",
    "RunConfig",
    "SchemeControls",
    "SimulationAbort",
    "State",
    "StepResult",
    "build_grid",
    "build_initial",
    "discrete_mass",
    "dissipation_d1",
    "dissipation_d2",
    "dist2_to_equilibrium",
    "energy_e1",
    "energy_e2",
    "face_mobility",
    "fit_decay_rate",
    "flat_equilibrium",
    "helmholtz_solve",
    "linearized_decay_rate",
    "lyapunov_f",
    "lyapunov_parts",
    "parse_config",
    "regularize_initial_data",
    "rhs_degenerate",
    "rhs_regularized",
    "run",
    "stable_dt",
    "step",
]

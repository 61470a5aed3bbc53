"""Grid, parameters, state and the per-sample diagnostics record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# absolute slack for the lower barrier f, g >= epsilon
TOL_BARRIER = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred mesh on ``(0, length)`` with no-flux end faces."""

    n_cells: int
    length: float

    def __post_init__(self):
        if isinstance(self.n_cells, bool) or int(self.n_cells) != self.n_cells:
            raise ValueError(f"n_cells must be an integer, got {self.n_cells!r}")
        if self.n_cells < 2:
            raise ValueError(f"n_cells must be >= 2, got {self.n_cells}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be finite and > 0, got {self.length}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        object.__setattr__(self, "length", float(self.length))

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


def build_grid(n_cells: int, length: float) -> Grid:
    return Grid(n_cells, length)


@dataclass(frozen=True)
class Params:
    """Physical constants ``R``, ``R_mu`` and the regularisation ``epsilon``.

    ``epsilon = 0`` selects the degenerate system.
    """

    R: float
    R_mu: float
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("R", "R_mu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.epsilon) and 0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")


def _as_field(u, n: int, name: str) -> np.ndarray:
    a = np.asarray(u, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class State:
    """Cell averages of ``f`` and ``g`` at one time instant.

    Arrays are copied and made read-only so a State can be shared freely.
    """

    f: np.ndarray
    g: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        f = np.array(self.f, dtype=np.float64)
        g = np.array(self.g, dtype=np.float64)
        if f.ndim != 1 or f.shape != g.shape:
            raise ValueError(f"f and g must be 1-D arrays of equal length, got {f.shape} and {g.shape}")
        f.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "time", float(self.time))

    @property
    def h(self) -> np.ndarray:
        return self.f + self.g

    def validate(self, params: Params | None = None, tol: float = TOL_BARRIER) -> "State":
        """Raise ``ValueError`` unless the state is finite, nonnegative and,
        for regularised parameters, above the ``epsilon`` barrier."""
        if not (math.isfinite(self.time) and self.time >= 0):
            raise ValueError(f"time must be finite and >= 0, got {self.time}")
        floor = -tol
        if params is not None and params.epsilon > 0:
            floor = params.epsilon - tol
        for name in ("f", "g"):
            u = getattr(self, name)
            if not np.all(np.isfinite(u)):
                raise ValueError(f"{name} contains non-finite entries")
            lo = float(u.min())
            if lo < floor:
                raise ValueError(f"{name} has minimum {lo:.3e} below the admissible floor {floor:.3e}")
        return self


def discrete_mass(u, grid: Grid) -> float:
    """Midpoint quadrature ``dx * sum(u)`` of the cell averages."""
    a = _as_field(u, grid.n_cells, "u")
    return float(grid.dx * np.sum(a))


def l2_norm(u, grid: Grid) -> float:
    return math.sqrt(grid.dx * float(np.dot(u, u)))


def grad_l2(u, grid: Grid) -> float:
    """L2 norm of the forward face differences over interior faces."""
    d = np.diff(u) / grid.dx
    return math.sqrt(grid.dx * float(np.dot(d, d)))


@dataclass
class DiagnosticsRecord:
    time: float
    mass_f: float
    mass_g: float
    e1: float
    e2: float
    d1_rate: float
    d2_rate: float
    min_f: float
    min_g: float
    clamp_mass_cum: float
    dist2_f: float
    dist2_g: float
    grad_f_l2: float
    grad_g_l2: float
    # time integrals accumulated step by step (not part of the CSV schema)
    d1_int: float = 0.0
    d2_int: float = 0.0
    rho_int: float = 0.0
    steps: int = 0

    CSV_FIELDS = (
        "time", "mass_f", "mass_g", "e1", "e2", "d1_rate", "d2_rate",
        "min_f", "min_g", "clamp_mass_cum", "dist2_f", "dist2_g",
        "grad_f_l2", "grad_g_l2",
    )

    @property
    def dist2(self) -> float:
        return self.dist2_f + self.dist2_g

    def csv_values(self) -> tuple:
        return tuple(getattr(self, k) for k in self.CSV_FIELDS)

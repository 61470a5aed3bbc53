"""Initial profiles for ``f`` and ``g``."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Grid

# parameters each kind accepts, with defaults (None = required)
KIND_PARAMS = {
    "flat": {"value": None},
    "cosine_perturbation": {"base": None, "amplitude": None, "mode": 1},
    "bump": {"base": 0.0, "height": None, "center": None, "width": None},
    "compact_support": {"height": None, "support_lo": None, "support_hi": None},
    "random_fourier": {"base": None, "amplitude": None, "n_modes": 8},
    "from_file": {"path": None},
    # g only: g0 = level - f0, i.e. a flat initial free surface h0 = level
    "flat_surface": {"level": None},
}
INT_PARAMS = {"mode", "n_modes"}
STR_PARAMS = {"path"}


@dataclass(frozen=True)
class ProfileSpec:
    """One initial profile.  ``floor`` is a lower clip applied last."""

    kind: str
    params: dict = field(default_factory=dict)
    floor: float = 0.0

    def __post_init__(self):
        if self.kind not in KIND_PARAMS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {sorted(KIND_PARAMS)}")
        allowed = KIND_PARAMS[self.kind]
        extra = set(self.params) - set(allowed)
        if extra:
            raise ValueError(f"parameters {sorted(extra)} are not used by kind {self.kind!r}")
        merged = {}
        for k, default in allowed.items():
            if k in self.params:
                merged[k] = self.params[k]
            elif default is None:
                raise ValueError(f"kind {self.kind!r} requires parameter {k!r}")
            else:
                merged[k] = default
        object.__setattr__(self, "params", merged)
        if not self.floor >= 0:
            raise ValueError(f"floor must be >= 0, got {self.floor}")


@dataclass(frozen=True)
class InitialSpec:
    f: ProfileSpec
    g: ProfileSpec


def _profile(spec: ProfileSpec, grid: Grid, rng: np.random.Generator, column: str,
             other: np.ndarray | None = None) -> np.ndarray:
    x = grid.cell_centers
    L = grid.length
    p = spec.params
    if spec.kind == "flat":
        u = np.full(grid.n_cells, float(p["value"]))
    elif spec.kind == "cosine_perturbation":
        u = p["base"] + p["amplitude"] * np.cos(p["mode"] * np.pi * x / L)
    elif spec.kind == "bump":
        u = p["base"] + p["height"] * np.exp(-(((x - p["center"]) / p["width"]) ** 2))
    elif spec.kind == "compact_support":
        lo, hi = p["support_lo"], p["support_hi"]
        if not (0 <= lo < hi <= L):
            raise ValueError(f"support ({lo}, {hi}) must lie inside [0, {L}]")
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = np.clip(1.0 - ((x - c) / r) ** 2, 0.0, None)
        u = p["height"] * s**2
    elif spec.kind == "random_fourier":
        k = np.arange(1, p["n_modes"] + 1)
        coef = rng.uniform(-1.0, 1.0, size=k.size) / k
        u = p["base"] + p["amplitude"] * np.cos(np.outer(x, k) * np.pi / L) @ coef
    elif spec.kind == "flat_surface":
        if other is None:
            raise ValueError("flat_surface is only available for g")
        u = p["level"] - other
    else:
        u = read_profile(p["path"], column, grid.n_cells)
    u = np.maximum(u, spec.floor)
    if not np.all(np.isfinite(u)) or np.any(u < 0):
        raise ValueError(f"{spec.kind} profile for {column} is negative or non-finite")
    return u


def read_profile(path, column: str, n_cells: int) -> np.ndarray:
    """Read a profile from a snapshot CSV (column by name) or a plain list of
    numbers, one or more per line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read initial profile {path}: {exc}") from exc
    first = text.lstrip().split("\n", 1)[0]
    if first and first[0].isalpha():
        rows = list(csv.DictReader(text.splitlines()))
        if not rows or column not in rows[0]:
            raise ValueError(f"{path} has no column {column!r}")
        u = np.array([float(r[column]) for r in rows])
    else:
        u = np.array(text.split(), dtype=float)
    if u.shape != (n_cells,):
        raise ValueError(f"{path} holds {u.size} values, grid has {n_cells} cells")
    return u


def build_initial(spec: InitialSpec, grid: Grid, seed: int = 0):
    """Return ``(f0, g0)``; deterministic in ``(spec, grid, seed)``."""
    f0 = _profile(spec.f, grid, np.random.default_rng([seed, 0]), "f")
    g0 = _profile(spec.g, grid, np.random.default_rng([seed, 1]), "g", other=f0)
    return f0, g0

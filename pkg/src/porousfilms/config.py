"""Run configuration and its flat ``key = value`` text format.

Example::

    # comments start with '#'
    grid.n_cells = 256
    grid.length = 1.0
    params.R = 1
    params.R_mu = 1
    mode = degenerate
    t_end = 1.0
    initial.f.kind = cosine_perturbation
    initial.f.base = 1.0
    initial.f.amplitude = 0.1
    initial.g.kind = flat
    initial.g.value = 1.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import Grid, Params
from .dynamics import MODES, SchemeControls
from .initial import INT_PARAMS, KIND_PARAMS, STR_PARAMS, InitialSpec, ProfileSpec


class ConfigError(ValueError):
    """Invalid configuration; ``keys`` names the offending entries."""

    def __init__(self, message: str, *keys: str):
        super().__init__(message)
        self.keys = keys


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    params: Params
    mode: str
    initial: InitialSpec
    t_end: float
    sample_dt: float
    snapshot_times: tuple = ()
    controls: SchemeControls = field(default_factory=SchemeControls)
    output_dir: Path = Path("output")
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {sorted(MODES)}, got {self.mode!r}", "mode")
        if self.mode == "regularized" and self.params.epsilon <= 0:
            raise ConfigError("mode = regularized requires params.epsilon > 0", "mode", "params.epsilon")
        if self.mode != "regularized" and self.params.epsilon != 0:
            raise ConfigError(f"mode = {self.mode} requires params.epsilon = 0", "mode", "params.epsilon")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ConfigError(f"t_end must be finite and >= 0, got {self.t_end}", "t_end")
        if not (math.isfinite(self.sample_dt) and self.sample_dt > 0):
            raise ConfigError(f"sample_dt must be > 0, got {self.sample_dt}", "sample_dt")
        snaps = tuple(sorted(float(t) for t in self.snapshot_times))
        if any(not (0 <= t <= self.t_end) for t in snaps):
            raise ConfigError(f"snapshot_times must lie in [0, t_end], got {snaps}", "snapshot_times")
        object.__setattr__(self, "snapshot_times", snaps)
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def with_value(self, axis: str, value) -> "RunConfig":
        """Copy with one sweep axis replaced.  Setting ``epsilon`` switches
        between the degenerate and regularised modes as needed."""
        if axis == "n_cells":
            return replace(self, grid=Grid(int(value), self.grid.length))
        if axis in ("R", "R_mu"):
            return replace(self, params=replace(self.params, **{axis: float(value)}))
        if axis == "epsilon":
            eps = float(value)
            mode = self.mode
            if eps > 0 and mode == "degenerate":
                mode = "regularized"
            elif eps == 0 and mode == "regularized":
                mode = "degenerate"
            return replace(self, params=replace(self.params, epsilon=eps), mode=mode)
        raise ValueError(f"unknown sweep axis {axis!r}; expected epsilon, n_cells, R or R_mu")


_FLOAT, _INT, _STR, _LIST = "float", "int", "str", "list"

SCHEMA = {
    "grid.n_cells": _INT,
    "grid.length": _FLOAT,
    "params.R": _FLOAT,
    "params.R_mu": _FLOAT,
    "params.epsilon": _FLOAT,
    "mode": _STR,
    "t_end": _FLOAT,
    "sample_dt": _FLOAT,
    "snapshot_times": _LIST,
    "controls.cfl_safety": _FLOAT,
    "controls.dt_max": _FLOAT,
    "controls.clamp_tol": _FLOAT,
    "controls.clamp_abort_fraction": _FLOAT,
    "output_dir": _STR,
    "seed": _INT,
}
_PROFILE_KEYS = {"kind": _STR, "floor": _FLOAT}
for _params in KIND_PARAMS.values():
    for _k in _params:
        _PROFILE_KEYS[_k] = _INT if _k in INT_PARAMS else _STR if _k in STR_PARAMS else _FLOAT
for _which in ("f", "g"):
    for _k, _t in _PROFILE_KEYS.items():
        SCHEMA[f"initial.{_which}.{_k}"] = _t

REQUIRED = ("grid.n_cells", "grid.length", "params.R", "params.R_mu", "mode", "t_end",
            "initial.f.kind", "initial.g.kind")


def _convert(key: str, raw: str):
    kind = SCHEMA[key]
    try:
        if kind == _INT:
            return int(raw)
        if kind == _FLOAT:
            return float(raw)
        if kind == _LIST:
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}", key) from None
    return raw


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Parse and validate the flat config format.

    Relative ``initial.*.path`` entries are resolved against ``base_dir``.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key)
        values[key] = _convert(key, raw)

    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}", *missing)

    try:
        grid = Grid(values["grid.n_cells"], values["grid.length"])
    except ValueError as exc:
        key = "grid.n_cells" if "n_cells" in str(exc) else "grid.length"
        raise ConfigError(f"{key}: {exc}", key) from None
    try:
        params = Params(values["params.R"], values["params.R_mu"], values.get("params.epsilon", 0.0))
    except ValueError as exc:
        key = "params." + str(exc).split()[0]
        raise ConfigError(f"{key}: {exc}", key) from None

    controls_kw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("controls.")}
    try:
        controls = SchemeControls(**controls_kw)
    except ValueError as exc:
        key = "controls." + str(exc).split()[0]
        raise ConfigError(f"{key}: {exc}", key) from None

    profiles = {}
    for which in ("f", "g"):
        prefix = f"initial.{which}."
        entries = {k[len(prefix):]: v for k, v in values.items() if k.startswith(prefix)}
        kind = entries.pop("kind")
        floor = entries.pop("floor", 0.0)
        if "path" in entries and base_dir is not None and not Path(entries["path"]).is_absolute():
            entries["path"] = str(Path(base_dir) / entries["path"])
        try:
            profiles[which] = ProfileSpec(kind, entries, floor)
        except ValueError as exc:
            raise ConfigError(f"{prefix}*: {exc}", prefix + "kind") from None

    t_end = values["t_end"]
    if not t_end > 0:
        raise ConfigError(f"t_end must be > 0, got {t_end}", "t_end")
    return RunConfig(
        grid=grid,
        params=params,
        mode=values["mode"],
        initial=InitialSpec(profiles["f"], profiles["g"]),
        t_end=t_end,
        sample_dt=values.get("sample_dt", t_end / 100),
        snapshot_times=values.get("snapshot_times", ()),
        controls=controls,
        output_dir=Path(values.get("output_dir", "output")),
        seed=values.get("seed", 0),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)

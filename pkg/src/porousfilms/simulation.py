"""Driving a configured run from ``t = 0`` to ``t_end``."""

from __future__ import annotations

import numpy as np

from .core import State
from .diagnostics import flat_equilibrium, make_record
from .dynamics import advance
from .initial import build_initial
from .smoother import HelmholtzOperator, regularize_initial_data


def initial_state(config) -> State:
    f0, g0 = build_initial(config.initial, config.grid, config.seed)
    if config.mode == "regularized":
        return regularize_initial_data(f0, g0, config.params, config.grid)
    if config.mode == "pme_g":
        f0 = np.zeros_like(f0)
    return State(f0, g0, 0.0)


def sample_times(t_end: float, sample_dt: float) -> list:
    """Multiples of ``sample_dt`` below ``t_end``, then ``t_end`` itself."""
    times = []
    k = 0
    while k * sample_dt < t_end - 1e-9 * sample_dt:
        times.append(k * sample_dt)
        k += 1
    times.append(float(t_end))
    return times


def run(config, on_sample=None, on_snapshot=None):
    """Simulate ``config`` and return ``(final_state, records)``.

    ``on_sample(state, record)`` is called at every diagnostics sample and
    ``on_snapshot(index, state)`` at every configured snapshot time.  The
    run is deterministic in the config and shares no state with other runs.
    """
    grid, params = config.grid, config.params
    state = initial_state(config)
    eq = flat_equilibrium(state, grid)
    op = HelmholtzOperator(grid, params.epsilon) if config.mode == "regularized" else None

    samples = sample_times(config.t_end, config.sample_dt)
    snaps = list(config.snapshot_times)
    stops = sorted(set(samples) | set(snaps))
    sample_set, snap_index = set(samples), {t: i for i, t in enumerate(snaps)}

    f = np.array(state.f)
    g = np.array(state.g)
    acc = np.zeros(5)
    t = 0.0
    records = []
    for stop in stops:
        if stop > t:
            t = advance(f, g, t, stop, params, grid, config.controls, config.mode, op, acc)
        state = State(f, g, t)
        if stop in sample_set:
            rec = make_record(state, params, grid, eq, acc)
            records.append(rec)
            if on_sample is not None:
                on_sample(state, rec)
        if stop in snap_index and on_snapshot is not None:
            on_snapshot(snap_index[stop], state)
    return state, records

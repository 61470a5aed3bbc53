"""Independent runs along one parameter axis, with a summary table."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .config import RunConfig
from .core import l2_norm
from .diagnostics import fit_decay_rate
from .io import write_diagnostics, write_snapshot, write_table
from .simulation import run

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["axis", "value", "status", "final_e1", "final_e2", "omega",
                   "final_dist2", "max_clamp", "diff_to_reference_l2", "order_estimate"]


def child_dir(base: RunConfig, axis: str, value) -> str:
    return f"{axis}_{value}"


def execute(config: RunConfig, write: bool = True):
    """Run one config and write ``diagnostics.csv``, ``final.csv`` and any
    ``snapshot_XXXX.csv`` into its output directory."""
    out = config.output_dir
    snapshot = None
    if write and config.snapshot_times:
        def snapshot(i, state):
            write_snapshot(state, config.grid, out / f"snapshot_{i:04d}.csv")
    final, series = run(config, on_snapshot=snapshot)
    if write:
        write_diagnostics(series, out / "diagnostics.csv")
        write_snapshot(final, config.grid, out / "final.csv")
    return final, series


def _child(args):
    config, write = args
    try:
        final, series = execute(config, write)
    except Exception as exc:  # recorded in the summary row, siblings continue
        return None, None, f"abort: {exc}"
    return final, series, "ok"


def _restrict(u: np.ndarray, factor: int) -> np.ndarray:
    """Average groups of ``factor`` fine cells onto the coarse grid."""
    return u.reshape(-1, factor).mean(axis=1)


def run_sweep(base: RunConfig, axis: str, values, jobs: int = 1, write: bool = True,
              reference: bool = True) -> list:
    """Run ``base`` once per value of ``axis`` and summarise.

    For an ``epsilon`` axis (and ``reference=True``) an extra degenerate run
    supplies ``diff_to_reference_l2 = |f_eps(T) - f_deg(T)|_2``.  For an
    ``n_cells`` axis each row reports the difference to the next finer run
    (restricted by cell averaging) and an observed order from the ratio of
    successive differences.
    """
    values = list(values)
    configs = []
    for v in values:
        cfg = base.with_value(axis, v)
        configs.append(replace(cfg, output_dir=base.output_dir / child_dir(base, axis, v)))
    jobs_list = [(c, write) for c in configs]
    ref_cfg = None
    if axis == "epsilon" and reference:
        ref_cfg = base.with_value("epsilon", 0.0)
        ref_cfg = replace(ref_cfg, output_dir=base.output_dir / "reference")
        jobs_list.append((ref_cfg, write))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_child, jobs_list))
    else:
        results = [_child(j) for j in jobs_list]

    ref_final = results[-1][0] if ref_cfg is not None else None
    rows = []
    for v, cfg, (final, series, status) in zip(values, configs, results):
        row = {"axis": axis, "value": v, "status": status}
        if series:
            last = series[-1]
            row.update(final_e1=last.e1, final_e2=last.e2, final_dist2=last.dist2,
                       max_clamp=max(r.clamp_mass_cum for r in series))
            try:
                row["omega"] = fit_decay_rate(series).omega
            except ValueError:
                row["omega"] = math.nan
            if ref_final is not None:
                row["diff_to_reference_l2"] = l2_norm(final.f - ref_final.f, cfg.grid)
        rows.append(row)
        log.info("%s=%s: %s", axis, v, status)

    if axis == "n_cells":
        finals = [r[0] for r in results]
        diffs = []
        for k in range(len(values) - 1):
            nc, nf = int(values[k]), int(values[k + 1])
            d = math.nan
            if finals[k] is not None and finals[k + 1] is not None and nf % nc == 0:
                d = l2_norm(finals[k].f - _restrict(finals[k + 1].f, nf // nc), configs[k].grid)
            rows[k]["diff_to_reference_l2"] = d
            diffs.append(d)
        for k in range(len(diffs) - 1):
            if diffs[k] > 0 and diffs[k + 1] > 0:
                ratio = int(values[k + 1]) / int(values[k])
                rows[k]["order_estimate"] = math.log(diffs[k] / diffs[k + 1]) / math.log(ratio)

    if write:
        write_table(rows, SUMMARY_COLUMNS, base.output_dir / f"sweep_{axis}.csv")
    return rows

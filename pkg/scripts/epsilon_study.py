"""Regularised runs converging to the degenerate one as epsilon -> 0.

Sweeps ``epsilon`` over the given values on a base config (default:
``configs/smooth.cfg`` with 128 cells) and reports
``|f_eps(T) - f_deg(T)|_2`` together with the observed order in epsilon.
"""

import argparse
import dataclasses
import math
from pathlib import Path

from porousfilms.config import load_config
from porousfilms.sweep import run_sweep

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", nargs="?", type=Path, default=HERE / "configs" / "smooth.cfg")
    ap.add_argument("--values", default="0.1,0.05,0.025,0.0125")
    ap.add_argument("--n-cells", type=int, default=128)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()

    cfg = load_config(args.config).with_value("n_cells", args.n_cells)
    cfg = dataclasses.replace(cfg, snapshot_times=(), output_dir=cfg.output_dir.parent / "epsilon_study")
    values = [float(v) for v in args.values.split(",")]
    rows = run_sweep(cfg, "epsilon", values, jobs=args.jobs)

    print(f"{'epsilon':>10} {'|f_eps - f_deg|':>16} {'order':>7}")
    prev = None
    for r in rows:
        d = r.get("diff_to_reference_l2", math.nan)
        order = "" if prev is None else f"{math.log(prev[1] / d) / math.log(prev[0] / r['value']):7.3f}"
        print(f"{r['value']:>10g} {d:>16.6e} {order:>7}  {r['status']}")
        prev = (r["value"], d)


if __name__ == "__main__":
    main()

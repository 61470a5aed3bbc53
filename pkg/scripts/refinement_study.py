"""Grid self-convergence of the degenerate scheme.

Runs a config (default: ``configs/smooth.cfg``) on successively doubled
grids, restricts each solution to the next coarser grid by cell averaging and
prints the differences with the observed order.
"""

import argparse
import dataclasses
from pathlib import Path

from porousfilms.config import load_config
from porousfilms.sweep import run_sweep

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", nargs="?", type=Path, default=HERE / "configs" / "smooth.cfg")
    ap.add_argument("--values", default="32,64,128,256")
    ap.add_argument("--t-end", type=float, default=0.1)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()

    cfg = load_config(args.config)
    cfg = dataclasses.replace(cfg, t_end=args.t_end, sample_dt=args.t_end / 10, snapshot_times=(),
                              output_dir=cfg.output_dir.parent / "refinement_study")
    rows = run_sweep(cfg, "n_cells", [int(v) for v in args.values.split(",")], jobs=args.jobs)

    print(f"{'n_cells':>8} {'|u_n - R u_2n|':>16} {'order':>7}")
    for r in rows:
        d = r.get("diff_to_reference_l2")
        order = r.get("order_estimate")
        print(f"{r['value']:>8} {'' if d is None else f'{d:16.6e}':>16} "
              f"{'' if order is None else f'{order:7.3f}':>7}  {r['status']}")


if __name__ == "__main__":
    main()

"""theta* / theta_bar over the (q1, qM) grid 0.02..0.26, step 0.04.

    python scripts/quality_surface.py [--scenario II --q2 0.24] [--out surface.csv]
"""
import argparse
import time

import numpy as np

from seacoop import Axis, SweepSpec, base_config, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default="I", choices=("I", "II"))
    ap.add_argument("--q2", type=float, default=0.15)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    kw = {"q2": args.q2} if args.scenario == "II" else {}
    base = base_config(args.scenario, **kw)
    axes = (Axis.scalar("q1", 0.02, 0.26, 7), Axis.scalar("qM", 0.02, 0.26, 7))
    t0 = time.time()
    res = sweep(SweepSpec(base, axes, outputs=("theta_star", "theta_bar")), workers=args.workers)
    print(f"{len(res.rows)} scans in {time.time() - t0:.1f}s")

    np.set_printoptions(precision=3, suppress=True)
    print("theta* (rows q1, cols qM)\n", res.table("theta_star"))
    print("theta_bar\n", res.table("theta_bar"))
    if args.out:
        with open(args.out, "w") as f:
            f.write(",".join(res.columns) + "\n")
            for row in res.rows:
                f.write(",".join(str(row[c]) for c in res.columns) + "\n")


if __name__ == "__main__":
    main()

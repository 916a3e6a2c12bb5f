"""Profits at theta* over gross-margin grids c1, cM in {50, ..., 300}."""
import argparse

import numpy as np

from seacoop import Axis, SweepSpec, base_config, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default="I", choices=("I", "II"))
    ap.add_argument("--c2", type=float, default=200.0)
    args = ap.parse_args()

    base = base_config(args.scenario, c2=args.c2)
    axes = (Axis.scalar("c1", 50, 300, 6), Axis.scalar("cM", 50, 300, 6))
    outs = ("theta_star", "J1", "JM", "Jchannel") + (("J2",) if args.scenario == "II" else ())
    res = sweep(SweepSpec(base, axes, outputs=outs))
    np.set_printoptions(precision=1, suppress=True, linewidth=120)
    for name in outs:
        print(f"{name} (rows c1, cols cM)\n{res.table(name)}")
    print(res.cross_effects())


if __name__ == "__main__":
    main()

"""Scenario II at x0 in {0.1, 0.5, 0.9}: optima and effort paths at theta*."""
from seacoop import base_config, build_trajectory, scan_subsidy


def main():
    for x0 in (0.1, 0.5, 0.9):
        cfg = base_config("II", x0=x0)
        c = scan_subsidy(cfg)
        tr = build_trajectory(cfg, c.theta_star)
        print(f"x0={x0}: theta*={c.theta_star:.3f} theta_bar={c.theta_bar:.3f}")
        for k in range(0, cfg.grid_steps + 1, cfg.grid_steps // 10):
            print(f"  t={tr.t[k]:6.1f} x={tr.x[k]:.4f} u1={tr.u1[k]:.4f} v={tr.v[k]:.4f} u2={tr.u2[k]:.4f}")


if __name__ == "__main__":
    main()

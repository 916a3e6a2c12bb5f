"""With vs without the rival retailer over the quality-score settings
(q1 in {0.05, 0.25} x qM levels, and qM in {0.05, 0.25} x q1 levels)."""
import numpy as np

from seacoop import base_config, compare_scenarios

LEVELS = (0.05, 0.1, 0.15, 0.2, 0.25)


def main():
    pts = [(q1, qM) for q1 in (0.05, 0.25) for qM in LEVELS]
    pts += [(q1, qM) for qM in (0.05, 0.25) for q1 in LEVELS if (q1, qM) not in pts]
    print("q1    qM    th*_wo th*_w  thb_wo thb_w  dJ1      dJM      dJch     min du1  min dv   max dx")
    for q1, qM in pts:
        r = compare_scenarios(base_config("II", q1=q1, qM=qM))
        d = r.deltas
        print(f"{q1:<5} {qM:<5} {r.worc.theta_star:<6} {r.wrc.theta_star:<6} {r.worc.theta_bar:<6} "
              f"{r.wrc.theta_bar:<6} {d['J1']:<8.1f} {d['JM']:<8.1f} {d['Jchannel']:<8.1f} "
              f"{np.min(d['u1']):<8.3f} {np.min(d['v']):<8.3f} {np.max(d['x']):.2e}")


if __name__ == "__main__":
    main()

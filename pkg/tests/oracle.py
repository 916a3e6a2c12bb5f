"""Fine-grid reference solver, written independently of ``seacoop``.

Explicit Euler (backward in time for the coefficient slopes/intercepts,
forward for the share), trapezoid profits on the same grid, and Romberg
(Richardson) extrapolation over dt, dt/2, dt/4 to cancel the first- and
second-order error terms. Only plain floats and numpy are used; quality
scores are passed as callables.
"""
import numpy as np


def euler_run(theta, dt, p, q1, qM, q2=None):
    """One Euler pass. ``theta`` may be an array (vectorised over rates).

    Returns a dict with t=0 coefficients, x(T) and discounted profits.
    """
    theta = np.asarray(theta, dtype=float)
    T = p["T"]
    n = int(round(T / dt))
    t = np.arange(n + 1) * (T / n)
    h = T / n
    A1 = (p["rho1"] * q1(t)) ** 2
    AM = (p["rhoM"] * qM(t)) ** 2
    A2 = (p["rho2"] * q2(t)) ** 2 if q2 is not None else np.zeros_like(t)
    r, c1, cM, c2 = p["r"], p["c1"], p["cM"], p["c2"] if q2 is not None else 0.0
    w = 1.0 / (1.0 - theta)

    shape = (n + 1,) + theta.shape
    B1 = np.zeros(shape)
    BM = np.zeros(shape)
    B2 = np.zeros(shape)
    al1 = alM = al2 = np.zeros(theta.shape)
    b1 = np.zeros(theta.shape)
    bM = np.zeros(theta.shape)
    b2 = np.zeros(theta.shape)
    for k in range(n, 0, -1):
        a1, am, a2 = A1[k], AM[k], A2[k]
        # derivatives at t_k, then step to t_{k-1}
        d_b1 = r * b1 + a1 * b1 * b1 * w / 4 + am * b1 * bM / 2 - a2 * b1 * b2 / 2 - c1
        d_bM = (r * bM + am * bM * bM / 4 - a1 * theta * b1 * b1 * w * w / 4
                + a1 * b1 * bM * w / 2 - a2 * b2 * bM / 2 - cM)
        d_b2 = r * b2 + a1 * b1 * b2 * w / 2 + am * b2 * bM / 2 - a2 * b2 * b2 / 4 + c2
        d_al1 = r * al1 - a1 * b1 * b1 * w / 4 - am * b1 * bM / 2
        d_alM = r * alM - am * bM * bM / 4 + a1 * theta * b1 * b1 * w * w / 4 - a1 * b1 * bM * w / 2
        d_al2 = r * al2 - a1 * b1 * b2 * w / 2 - am * b2 * bM / 2 - c2
        b1, bM, b2 = b1 - h * d_b1, bM - h * d_bM, b2 - h * d_b2
        al1, alM, al2 = al1 - h * d_al1, alM - h * d_alM, al2 - h * d_al2
        B1[k - 1], BM[k - 1], B2[k - 1] = b1, bM, b2

    x = np.full(theta.shape, p["x0"])
    X = np.empty(shape)
    X[0] = x
    for k in range(n):
        g = A1[k] * B1[k] * w / 2 + AM[k] * BM[k] / 2
        l = A2[k] * B2[k] / 2
        x = x + h * (g * (1 - x) + l * x)
        X[k + 1] = x

    ex = lambda a: a.reshape((-1,) + (1,) * theta.ndim)
    s = np.sqrt(np.maximum(0.0, 1 - X))
    u1 = p["rho1"] * ex(q1(t)) * B1 * s * w / 2
    v = p["rhoM"] * ex(qM(t)) * BM * s / 2
    u2 = -p["rho2"] * ex(q2(t)) * B2 * np.sqrt(np.maximum(0.0, X)) / 2 if q2 is not None else 0 * X
    disc = ex(np.exp(-r * t))
    J1 = np.trapezoid((c1 * X - (1 - theta) * u1**2) * disc, dx=h, axis=0)
    JM = np.trapezoid((cM * X - v**2 - theta * u1**2) * disc, dx=h, axis=0)
    J2 = np.trapezoid((c2 * (1 - X) - u2**2) * disc, dx=h, axis=0)
    return {
        "beta1_0": B1[0], "betaM_0": BM[0], "beta2_0": B2[0],
        "alpha1_0": al1, "alphaM_0": alM, "alpha2_0": al2,
        "x_T": X[-1], "J1": J1, "JM": JM, "J2": J2,
    }


def romberg(theta, dt, p, q1, qM, q2=None, levels=3):
    """Richardson-extrapolated Euler results (dt, dt/2, ..., dt/2^(levels-1))."""
    runs = [euler_run(theta, dt / 2**i, p, q1, qM, q2) for i in range(levels)]
    out = {}
    for key in runs[0]:
        col = [np.asarray(r[key], dtype=float) for r in runs]
        for j in range(1, levels):
            f = 2.0**j
            col = [(f * col[i + 1] - col[i]) / (f - 1) for i in range(len(col) - 1)]
        out[key] = col[0]
    return out


def euler_objectives(theta, dt, p, q1, qM, q2=None):
    """Memory-light Euler pass returning only (JM, Jchannel) per theta."""
    theta = np.asarray(theta, dtype=float)
    T = p["T"]
    n = int(round(T / dt))
    h = T / n
    t = np.arange(n + 1) * h
    Q1, QM = q1(t), qM(t)
    Q2 = q2(t) if q2 is not None else np.zeros_like(t)
    A1, AM, A2 = (p["rho1"] * Q1) ** 2, (p["rhoM"] * QM) ** 2, (p["rho2"] * Q2) ** 2
    r, c1, cM = p["r"], p["c1"], p["cM"]
    c2 = p["c2"] if q2 is not None else 0.0
    w = 1.0 / (1.0 - theta)
    B1 = np.zeros((n + 1, theta.size))
    BM = np.zeros_like(B1)
    B2 = np.zeros_like(B1)
    b1 = np.zeros(theta.size)
    bM = np.zeros(theta.size)
    b2 = np.zeros(theta.size)
    for k in range(n, 0, -1):
        a1, am, a2 = A1[k], AM[k], A2[k]
        d_b1 = r * b1 + a1 * b1 * b1 * w / 4 + am * b1 * bM / 2 - a2 * b1 * b2 / 2 - c1
        d_bM = (r * bM + am * bM * bM / 4 - a1 * theta * b1 * b1 * w * w / 4
                + a1 * b1 * bM * w / 2 - a2 * b2 * bM / 2 - cM)
        d_b2 = r * b2 + a1 * b1 * b2 * w / 2 + am * b2 * bM / 2 - a2 * b2 * b2 / 4 + c2
        b1, bM, b2 = b1 - h * d_b1, bM - h * d_bM, b2 - h * d_b2
        B1[k - 1], BM[k - 1], B2[k - 1] = b1, bM, b2

    x = np.full(theta.size, p["x0"])
    JM = np.zeros(theta.size)
    J1 = np.zeros(theta.size)
    for k in range(n + 1):
        s = np.sqrt(np.maximum(0.0, 1.0 - x))
        u1 = p["rho1"] * Q1[k] * B1[k] * s * w / 2
        v = p["rhoM"] * QM[k] * BM[k] * s / 2
        d = np.exp(-r * t[k]) * (0.5 if k in (0, n) else 1.0) * h
        J1 += d * (c1 * x - (1 - theta) * u1 * u1)
        JM += d * (cM * x - v * v - theta * u1 * u1)
        if k < n:
            g = A1[k] * B1[k] * w / 2 + AM[k] * BM[k] / 2
            x = x + h * (g * (1 - x) + A2[k] * B2[k] / 2 * x)
    return JM, J1 + JM


def theta_scan(thetas, dt, p, q1, qM, q2=None, chunk=50, levels=2):
    """Richardson-extrapolated (JM, Jchannel) over a theta grid."""
    thetas = np.asarray(thetas, dtype=float)
    JM = np.empty(thetas.size)
    JC = np.empty(thetas.size)
    for i in range(0, thetas.size, chunk):
        part = thetas[i:i + chunk]
        runs = [euler_objectives(part, dt / 2**j, p, q1, qM, q2) for j in range(levels)]
        for slot, out in ((0, JM), (1, JC)):
            col = [r[slot] for r in runs]
            for j in range(1, levels):
                f = 2.0**j
                col = [(f * col[m + 1] - col[m]) / (f - 1) for m in range(len(col) - 1)]
            out[i:i + chunk] = col[0]
    return JM, JC

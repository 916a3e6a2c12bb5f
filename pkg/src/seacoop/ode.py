"""Backward solves of the value-function coefficient ODEs and forward
integration of the market-share state.

Everything here is vectorised over a batch of subsidy rates: coefficient
arrays have shape ``(N + 1, B)``. The single-theta entry points wrap the
batch routines.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import THETA_MAX, ConfigError, DomainError, ScenarioConfig, eval_quality, validate_theta

BLOWUP = 1e12

COEFS_I = ("alpha1", "beta1", "alphaM", "betaM")
COEFS_II = ("alpha1", "beta1", "alphaM", "betaM", "alpha2", "beta2")


class PreconditionError(ValueError):
    """An operation was called on inputs that violate its preconditions."""


@dataclass(frozen=True)
class Effectiveness:
    """Squared effective reach (rho*q)^2 at grid nodes and half-step points."""

    a1: np.ndarray
    aM: np.ndarray
    a2: np.ndarray | None
    a1_mid: np.ndarray
    aM_mid: np.ndarray
    a2_mid: np.ndarray | None


def effectiveness(config: ScenarioConfig) -> Effectiveness:
    p = config.params
    grid = config.grid
    t = grid.nodes
    tm = (np.arange(grid.N) + 0.5) * p.T / grid.N

    def sq(rho, sched, times):
        return (rho * eval_quality(sched, times, p.T)) ** 2

    two = config.scenario == "II"
    return Effectiveness(
        a1=sq(p.rho1, config.q1, t),
        aM=sq(p.rhoM, config.qM, t),
        a2=sq(p.rho2, config.q2, t) if two else None,
        a1_mid=sq(p.rho1, config.q1, tm),
        aM_mid=sq(p.rhoM, config.qM, tm),
        a2_mid=sq(p.rho2, config.q2, tm) if two else None,
    )


def rhs_I(y, a1, aM, theta, p, printed=False):
    """Time derivative of (alpha1, beta1, alphaM, betaM) without a rival.

    ``printed=True`` reproduces the alphaM equation with (rho1 q1)^2 in the
    betaM^2 term instead of (rhoM qM)^2; it is kept only so the HJ residual
    can expose the difference.
    """
    al1, b1, alM, bM = y
    k = 1.0 / (1.0 - theta)
    own1 = a1 * b1 * b1 * k / 4
    cross1 = aM * b1 * bM / 2
    subsidy = a1 * theta * b1 * b1 * k * k / 4
    crossM = a1 * b1 * bM * k / 2
    ownM = (a1 if printed else aM) * bM * bM / 4
    return np.stack([
        p.r * al1 - own1 - cross1,
        p.r * b1 + own1 + cross1 - p.c1,
        p.r * alM - ownM + subsidy - crossM,
        p.r * bM + aM * bM * bM / 4 - subsidy + crossM - p.cM,
    ])


def rhs_II(y, a1, aM, a2, theta, p, printed=False):
    """Time derivative of (alpha1, beta1, alphaM, betaM, alpha2, beta2) with
    an independent competing retailer.

    ``printed=True`` swaps the alpha2 cross term aM*beta2*betaM for
    aM*beta1*betaM.
    """
    al1, b1, alM, bM, al2, b2 = y
    k = 1.0 / (1.0 - theta)
    own1 = a1 * b1 * b1 * k / 4
    cross1 = aM * b1 * bM / 2
    subsidy = a1 * theta * b1 * b1 * k * k / 4
    crossM = a1 * b1 * bM * k / 2
    rival1 = a2 * b1 * b2 / 2
    rivalM = a2 * b2 * bM / 2
    cross2 = a1 * b1 * b2 * k / 2
    alliance2 = aM * (b1 if printed else b2) * bM / 2
    return np.stack([
        p.r * al1 - own1 - cross1,
        p.r * b1 + own1 - rival1 + cross1 - p.c1,
        p.r * alM - aM * bM * bM / 4 + subsidy - crossM,
        p.r * bM + aM * bM * bM / 4 - subsidy + crossM - rivalM - p.cM,
        p.r * al2 - cross2 - alliance2 - p.c2,
        p.r * b2 + cross2 + aM * b2 * bM / 2 - a2 * b2 * b2 / 4 + p.c2,
    ])


@dataclass
class CoefficientBatch:
    """Coefficient paths for several subsidy rates on one grid."""

    config: ScenarioConfig
    thetas: np.ndarray
    values: dict
    slopes: dict
    feasible: np.ndarray
    variant: str = "derived"

    def path(self, i) -> "CoefficientPath":
        names = COEFS_II if self.config.scenario == "II" else COEFS_I
        arrs = {n: self.values[n][:, i] for n in names}
        return CoefficientPath(
            theta=float(self.thetas[i]),
            scenario=self.config.scenario,
            config=self.config,
            feasible=bool(self.feasible[i]),
            slopes={n: self.slopes[n][:, i] for n in names},
            variant=self.variant,
            **arrs,
        )


@dataclass
class CoefficientPath:
    theta: float
    scenario: str
    config: ScenarioConfig
    alpha1: np.ndarray
    beta1: np.ndarray
    alphaM: np.ndarray
    betaM: np.ndarray
    alpha2: np.ndarray | None = None
    beta2: np.ndarray | None = None
    feasible: bool = True
    slopes: dict = field(default_factory=dict)
    variant: str = "derived"

    @property
    def names(self):
        return COEFS_II if self.scenario == "II" else COEFS_I


@dataclass
class StatePath:
    theta: float
    x: np.ndarray


def _check_thetas(thetas):
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any(~np.isfinite(thetas)) or np.any(thetas < 0) or np.any(thetas > THETA_MAX):
        raise DomainError(f"theta must lie in [0, {THETA_MAX}]")
    return thetas


def solve_coefficients_batch(config: ScenarioConfig, thetas, variant="derived") -> CoefficientBatch:
    """Integrate the coefficient system backward from zero terminal data with
    classical RK4, for every theta in ``thetas`` at once.

    Columns whose magnitude exceeds ``BLOWUP`` (or turns non-finite) are
    flagged infeasible and zeroed so the rest of the batch continues.
    """
    if variant not in ("derived", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    thetas = _check_thetas(thetas)
    p = config.params
    N = config.grid_steps
    dt = p.T / N
    eff = effectiveness(config)
    printed = variant == "printed"
    two = config.scenario == "II"
    names = COEFS_II if two else COEFS_I

    if two:
        def f(y, k, mid=False):
            if mid:
                return rhs_II(y, eff.a1_mid[k], eff.aM_mid[k], eff.a2_mid[k], thetas, p, printed)
            return rhs_II(y, eff.a1[k], eff.aM[k], eff.a2[k], thetas, p, printed)
    else:
        def f(y, k, mid=False):
            if mid:
                return rhs_I(y, eff.a1_mid[k], eff.aM_mid[k], thetas, p, printed)
            return rhs_I(y, eff.a1[k], eff.aM[k], thetas, p, printed)

    B = thetas.size
    out = np.zeros((N + 1, len(names), B))
    ok = np.ones(B, dtype=bool)
    y = np.zeros((len(names), B))
    half = dt / 2
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N - 1, -1, -1):
            # step from t_{k+1} back to t_k; the half-step point is index k
            k1 = f(y, k + 1)
            k2 = f(y - half * k1, k, mid=True)
            k3 = f(y - half * k2, k, mid=True)
            k4 = f(y - dt * k3, k)
            y = y - dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            bad = ~np.all(np.isfinite(y) & (np.abs(y) <= BLOWUP), axis=0)
            if bad.any():
                ok &= ~bad
                y[:, bad] = 0.0
            out[k] = y
        out[:, :, ~ok] = np.nan

    if two:
        sl = rhs_II(np.moveaxis(out, 1, 0), eff.a1[:, None], eff.aM[:, None], eff.a2[:, None], thetas, p, printed)
    else:
        sl = rhs_I(np.moveaxis(out, 1, 0), eff.a1[:, None], eff.aM[:, None], thetas, p, printed)
    values = {n: out[:, i, :] for i, n in enumerate(names)}
    slopes = {n: sl[i] for i, n in enumerate(names)}
    return CoefficientBatch(config, thetas, values, slopes, ok, variant)


def _solve_single(config, theta, scenario, variant):
    if config.scenario != scenario:
        raise ConfigError([("scenario", f"expected scenario {scenario}, got {config.scenario}")])
    try:
        theta = validate_theta(theta)
    except ConfigError as exc:
        raise DomainError(str(exc)) from None
    return solve_coefficients_batch(config, [theta], variant).path(0)


def solve_coefficients_I(config: ScenarioConfig, theta: float, variant="derived") -> CoefficientPath:
    return _solve_single(config, theta, "I", variant)


def solve_coefficients_II(config: ScenarioConfig, theta: float, variant="derived") -> CoefficientPath:
    return _solve_single(config, theta, "II", variant)


def solve_coefficients(config: ScenarioConfig, theta: float, variant="derived") -> CoefficientPath:
    return _solve_single(config, theta, config.scenario, variant)


def _hermite_mid(v, dv, dt):
    # cubic Hermite value halfway between consecutive nodes
    return 0.5 * (v[:-1] + v[1:]) + dt / 8 * (dv[:-1] - dv[1:])


def state_drift_coefficients(config: ScenarioConfig, thetas, values, slopes):
    """Growth and loss rates (A, B) of dx/dt = A (1 - x) + B x at nodes and
    half-steps, each shaped ``(N + 1, B)`` / ``(N, B)``."""
    eff = effectiveness(config)
    dt = config.params.T / config.grid_steps
    k = 1.0 / (1.0 - thetas)
    b1, bM = values["beta1"], values["betaM"]
    b1m = _hermite_mid(b1, slopes["beta1"], dt)
    bMm = _hermite_mid(bM, slopes["betaM"], dt)
    A = eff.a1[:, None] * b1 * k / 2 + eff.aM[:, None] * bM / 2
    Am = eff.a1_mid[:, None] * b1m * k / 2 + eff.aM_mid[:, None] * bMm / 2
    if config.scenario == "II":
        b2 = values["beta2"]
        b2m = _hermite_mid(b2, slopes["beta2"], dt)
        Bn = eff.a2[:, None] * b2 / 2
        Bm = eff.a2_mid[:, None] * b2m / 2
    else:
        Bn = np.zeros_like(A)
        Bm = np.zeros_like(Am)
    return A, Am, Bn, Bm


def integrate_state_batch(batch: CoefficientBatch) -> np.ndarray:
    """Forward RK4 for the market share under equilibrium play.

    Coefficients at half steps come from cubic Hermite interpolation of the
    stored paths and their exact slopes. Infeasible columns are NaN.
    """
    config = batch.config
    N = config.grid_steps
    dt = config.params.T / N
    A, Am, Bn, Bm = state_drift_coefficients(config, batch.thetas, batch.values, batch.slopes)
    x = np.full(batch.thetas.size, config.params.x0)
    xs = np.empty((N + 1, x.size))
    xs[0] = x
    with np.errstate(invalid="ignore"):
        for k in range(N):
            k1 = A[k] * (1 - x) + Bn[k] * x
            xa = x + dt / 2 * k1
            k2 = Am[k] * (1 - xa) + Bm[k] * xa
            xb = x + dt / 2 * k2
            k3 = Am[k] * (1 - xb) + Bm[k] * xb
            xc = x + dt * k3
            k4 = A[k + 1] * (1 - xc) + Bn[k + 1] * xc
            x = np.clip(x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), 0.0, 1.0)
            xs[k + 1] = x
    xs[:, ~batch.feasible] = np.nan
    return xs


def _slope(coeffs, name, dt):
    if name in coeffs.slopes:
        return coeffs.slopes[name]
    # hand-built paths carry no slopes
    return np.gradient(getattr(coeffs, name), dt)


def integrate_state(config: ScenarioConfig, theta: float, coeffs: CoefficientPath) -> StatePath:
    if not coeffs.feasible:
        raise PreconditionError("coefficient path is infeasible")
    if coeffs.theta != theta:
        raise PreconditionError(f"coefficients solved for theta={coeffs.theta}, not {theta}")
    names = coeffs.names
    dt = config.params.T / config.grid_steps
    batch = CoefficientBatch(
        config=config,
        thetas=np.array([theta]),
        values={n: getattr(coeffs, n)[:, None] for n in names},
        slopes={n: _slope(coeffs, n, dt)[:, None] for n in names},
        feasible=np.array([True]),
    )
    return StatePath(theta=theta, x=integrate_state_batch(batch)[:, 0])

"""Feedback controls, equilibrium trajectories, discounted profits, value
functions and HJ residuals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .model import DomainError, ScenarioConfig, eval_quality
from .ode import (
    CoefficientBatch,
    CoefficientPath,
    PreconditionError,
    effectiveness,
    integrate_state_batch,
    solve_coefficients_batch,
)


@dataclass(frozen=True)
class Controls:
    u1: float
    v: float
    u2: float = 0.0
    projected: tuple = ()


@dataclass
class EquilibriumTrajectory:
    theta: float
    scenario: str
    t: np.ndarray
    x: np.ndarray
    u1: np.ndarray
    v: np.ndarray
    u2: np.ndarray | None
    projection_active: dict
    feasible: bool = True
    coeffs: CoefficientPath | None = None


@dataclass(frozen=True)
class ProfitReport:
    J1: float
    JM: float
    Jchannel: float
    J2: float | None = None


def _qualities(config, t):
    T = config.params.T
    q2 = eval_quality(config.q2, t, T) if config.scenario == "II" else None
    return eval_quality(config.q1, t, T), eval_quality(config.qM, t, T), q2


def raw_controls(config, theta, beta1, betaM, beta2, x, q1, qM, q2):
    """Unprojected first-order-condition controls (broadcasts)."""
    p = config.params
    one_minus = np.sqrt(np.maximum(0.0, 1.0 - x))
    u1 = p.rho1 * q1 * beta1 * one_minus / (2 * (1 - theta))
    v = p.rhoM * qM * betaM * one_minus / 2
    u2 = None
    if beta2 is not None:
        u2 = -p.rho2 * q2 * beta2 * np.sqrt(np.maximum(0.0, x)) / 2
    return u1, v, u2


def feedback_controls(config: ScenarioConfig, coeffs: CoefficientPath, x: float, k: int) -> Controls:
    """Equilibrium efforts at node ``k`` and share ``x``, clipped at zero."""
    N = config.grid_steps
    if not 0 <= k <= N:
        raise DomainError(f"node index must lie in [0, {N}]")
    if not 0.0 <= x <= 1.0:
        raise DomainError("x must lie in [0, 1]")
    t = k * config.params.T / N
    q1, qM, q2 = _qualities(config, t)
    b2 = coeffs.beta2[k] if config.scenario == "II" else None
    u1, v, u2 = raw_controls(config, coeffs.theta, coeffs.beta1[k], coeffs.betaM[k], b2, x, q1, qM, q2)
    projected = tuple(name for name, val in (("u1", u1), ("v", v), ("u2", u2)) if val is not None and val < 0)
    return Controls(
        u1=max(0.0, float(u1)),
        v=max(0.0, float(v)),
        u2=max(0.0, float(u2)) if u2 is not None else 0.0,
        projected=projected,
    )


@dataclass
class BatchOutcome:
    """Trajectories and profits for every theta of a coefficient batch."""

    batch: CoefficientBatch
    t: np.ndarray
    x: np.ndarray
    u1: np.ndarray
    v: np.ndarray
    u2: np.ndarray | None
    projected: dict
    J1: np.ndarray
    JM: np.ndarray
    J2: np.ndarray | None

    @property
    def Jchannel(self):
        return self.J1 + self.JM

    @property
    def feasible(self):
        return self.batch.feasible

    def trajectory(self, i) -> EquilibriumTrajectory:
        ok = bool(self.feasible[i])
        return EquilibriumTrajectory(
            theta=float(self.batch.thetas[i]),
            scenario=self.batch.config.scenario,
            t=self.t,
            x=self.x[:, i],
            u1=self.u1[:, i],
            v=self.v[:, i],
            u2=None if self.u2 is None else self.u2[:, i],
            projection_active={k: bool(m[i]) for k, m in self.projected.items()},
            feasible=ok,
            coeffs=self.batch.path(i),
        )

    def report(self, i) -> ProfitReport:
        return ProfitReport(
            J1=float(self.J1[i]),
            JM=float(self.JM[i]),
            Jchannel=float(self.J1[i] + self.JM[i]),
            J2=None if self.J2 is None else float(self.J2[i]),
        )


def discounted_integral(flow, t, r):
    """Composite Simpson integral of ``flow * exp(-r t)`` along axis 0."""
    w = np.exp(-r * t)
    if np.ndim(flow) > 1:
        w = w.reshape((-1,) + (1,) * (flow.ndim - 1))
    return simpson(flow * w, x=t, axis=0)


def profit_integrals(config, theta, t, x, u1, v, u2):
    p = config.params
    J1 = discounted_integral(p.c1 * x - (1 - theta) * u1**2, t, p.r)
    JM = discounted_integral(p.cM * x - v**2 - theta * u1**2, t, p.r)
    J2 = None
    if u2 is not None:
        J2 = discounted_integral(p.c2 * (1 - x) - u2**2, t, p.r)
    return J1, JM, J2


def evaluate_batch(config: ScenarioConfig, thetas, variant="derived") -> BatchOutcome:
    """Solve, simulate and price every theta in ``thetas`` at once."""
    batch = solve_coefficients_batch(config, thetas, variant)
    x = integrate_state_batch(batch)
    t = config.grid.nodes
    q1, qM, q2 = _qualities(config, t)
    two = config.scenario == "II"
    vals = batch.values
    with np.errstate(invalid="ignore"):
        u1, v, u2 = raw_controls(
            config,
            batch.thetas,
            vals["beta1"],
            vals["betaM"],
            vals["beta2"] if two else None,
            x,
            q1[:, None],
            qM[:, None],
            q2[:, None] if two else None,
        )
        projected = {"u1": np.any(u1 < 0, axis=0), "v": np.any(v < 0, axis=0)}
        u1 = np.maximum(u1, 0.0)
        v = np.maximum(v, 0.0)
        if two:
            projected["u2"] = np.any(u2 < 0, axis=0)
            u2 = np.maximum(u2, 0.0)
    J1, JM, J2 = profit_integrals(config, batch.thetas, t, x, u1, v, u2)
    return BatchOutcome(batch, t, x, u1, v, u2, projected, J1, JM, J2)


def build_trajectory(config: ScenarioConfig, theta: float, variant="derived") -> EquilibriumTrajectory:
    """Equilibrium path at a fixed subsidy rate.

    An infeasible rate yields a trajectory with ``feasible=False`` and NaN
    arrays rather than an exception.
    """
    return evaluate_batch(config, [theta], variant).trajectory(0)


def profits(config: ScenarioConfig, traj: EquilibriumTrajectory) -> ProfitReport:
    if not traj.feasible:
        raise PreconditionError("trajectory is infeasible")
    J1, JM, J2 = profit_integrals(config, traj.theta, traj.t, traj.x, traj.u1, traj.v, traj.u2)
    return ProfitReport(J1=float(J1), JM=float(JM), Jchannel=float(J1 + JM), J2=None if J2 is None else float(J2))


def value_at(coeffs: CoefficientPath, x: float, k: int) -> dict:
    """Present values e^{-r t_k} (alpha + beta x) for each player."""
    if not 0.0 <= x <= 1.0:
        raise DomainError("x must lie in [0, 1]")
    p = coeffs.config.params
    t = k * p.T / coeffs.config.grid_steps
    disc = np.exp(-p.r * t)
    players = {"R1": ("alpha1", "beta1"), "M": ("alphaM", "betaM")}
    if coeffs.scenario == "II":
        players["R2"] = ("alpha2", "beta2")
    return {who: float(disc * (getattr(coeffs, a)[k] + getattr(coeffs, b)[k] * x)) for who, (a, b) in players.items()}


def hj_residual(config: ScenarioConfig, coeffs: CoefficientPath, x: float, k: int, discounted=True) -> dict:
    """Signed residual of each player's HJ equation at (x, t_k).

    Value-function time derivatives come from centred differences of the
    stored alpha/beta paths, so ``k`` must be an interior node. With
    ``discounted=False`` the residual is returned in current-value terms
    (multiplied by e^{r t}).
    """
    N = config.grid_steps
    if not 0 < k < N:
        raise DomainError(f"residual needs an interior node, got k={k}")
    p = config.params
    dt = p.T / N
    eff = effectiveness(config)
    a1, aM = eff.a1[k], eff.aM[k]
    th = coeffs.theta
    km = 1.0 / (1.0 - th)

    def vt(a, b):
        # e^{rt} V_t for V = e^{-rt}(alpha + beta x)
        da = (a[k + 1] - a[k - 1]) / (2 * dt)
        db = (b[k + 1] - b[k - 1]) / (2 * dt)
        return -p.r * (a[k] + b[k] * x) + da + db * x

    b1, bM = coeffs.beta1[k], coeffs.betaM[k]
    res = {
        "R1": vt(coeffs.alpha1, coeffs.beta1) + p.c1 * x + a1 * b1**2 * (1 - x) * km / 4 + aM * b1 * bM * (1 - x) / 2,
        "M": (
            vt(coeffs.alphaM, coeffs.betaM)
            + p.cM * x
            + aM * bM**2 * (1 - x) / 4
            - th * a1 * b1**2 * (1 - x) * km**2 / 4
            + a1 * b1 * bM * (1 - x) * km / 2
        ),
    }
    if config.scenario == "II":
        a2, b2 = eff.a2[k], coeffs.beta2[k]
        res["R1"] += a2 * b1 * b2 * x / 2
        res["M"] += a2 * b2 * bM * x / 2
        res["R2"] = (
            vt(coeffs.alpha2, coeffs.beta2)
            + p.c2 * (1 - x)
            + a1 * b1 * b2 * (1 - x) * km / 2
            + a2 * b2**2 * x / 4
            + aM * b2 * bM * (1 - x) / 2
        )
    scale = np.exp(-p.r * k * dt) if discounted else 1.0
    return {who: float(scale * val) for who, val in res.items()}

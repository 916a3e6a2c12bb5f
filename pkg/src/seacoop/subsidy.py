"""Grid search for the manufacturer's subsidy rate.

``theta_star`` maximises the manufacturer's own profit, ``theta_bar`` the
profit of the manufacturer-retailer alliance. Ties go to the smaller rate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import BatchOutcome, evaluate_batch
from .model import THETA_MAX, DomainError, ScenarioConfig

DEFAULT_THETA_STEP = 0.005


class OptimizationError(RuntimeError):
    """No feasible subsidy rate was found."""


@dataclass
class SubsidyCurve:
    thetas: np.ndarray
    JM: np.ndarray
    Jchannel: np.ndarray
    feasible: np.ndarray
    theta_star: float
    theta_bar: float
    J1: np.ndarray | None = None
    J2: np.ndarray | None = None

    def rows(self):
        for i, th in enumerate(self.thetas):
            yield float(th), float(self.JM[i]), float(self.Jchannel[i]), bool(self.feasible[i])


def theta_grid(step):
    if not 0 < step <= 0.1:
        raise DomainError(f"theta_step must lie in (0, 0.1], got {step}")
    n = int(np.floor(THETA_MAX / step + 1e-9))
    grid = np.arange(n + 1) * step
    if THETA_MAX - grid[-1] > 1e-9:
        grid = np.append(grid, THETA_MAX)
    # round away float noise so curves serialise stably
    return np.round(grid, 12)


def _argmax_first(values, feasible):
    masked = np.where(feasible, values, -np.inf)
    best = masked.max()
    # argmax returns the first index, i.e. the smallest theta
    return int(np.argmax(masked == best))


def curve_from_outcome(out: BatchOutcome) -> SubsidyCurve:
    ok = np.asarray(out.feasible, dtype=bool)
    if not ok.any():
        raise OptimizationError("no feasible subsidy rate on the grid")
    th = out.batch.thetas
    JM, Jc = out.JM, out.Jchannel
    return SubsidyCurve(
        thetas=th,
        JM=JM,
        Jchannel=Jc,
        feasible=ok,
        theta_star=float(th[_argmax_first(JM, ok)]),
        theta_bar=float(th[_argmax_first(Jc, ok)]),
        J1=out.J1,
        J2=out.J2,
    )


def scan_subsidy(config: ScenarioConfig, theta_step: float = DEFAULT_THETA_STEP, chunk: int | None = None) -> SubsidyCurve:
    """Evaluate both objectives at every rate in {0, step, ..., 0.99}.

    ``chunk`` bounds how many rates are solved in one vectorised batch;
    results are identical for any chunk size.
    """
    grid = theta_grid(theta_step)
    if chunk is None or chunk >= grid.size:
        return curve_from_outcome(evaluate_batch(config, grid))
    parts = [evaluate_batch(config, grid[i:i + chunk]) for i in range(0, grid.size, chunk)]
    ok = np.concatenate([p.feasible for p in parts])
    if not ok.any():
        raise OptimizationError("no feasible subsidy rate on the grid")
    JM = np.concatenate([p.JM for p in parts])
    Jc = np.concatenate([p.Jchannel for p in parts])
    J1 = np.concatenate([p.J1 for p in parts])
    J2 = None if parts[0].J2 is None else np.concatenate([p.J2 for p in parts])
    return SubsidyCurve(
        thetas=grid,
        JM=JM,
        Jchannel=Jc,
        feasible=ok,
        theta_star=float(grid[_argmax_first(JM, ok)]),
        theta_bar=float(grid[_argmax_first(Jc, ok)]),
        J1=J1,
        J2=J2,
    )


def optimal_rates(curve: SubsidyCurve):
    """Return ``(theta_star, theta_bar)``, re-derived from the curve."""
    ok = np.asarray(curve.feasible, dtype=bool)
    if not ok.any():
        raise OptimizationError("no feasible subsidy rate on the curve")
    star = float(curve.thetas[_argmax_first(np.asarray(curve.JM), ok)])
    bar = float(curve.thetas[_argmax_first(np.asarray(curve.Jchannel), ok)])
    if (star, bar) != (curve.theta_star, curve.theta_bar):
        raise OptimizationError("recorded optima disagree with the curve")
    return star, bar

"""Feedback Stackelberg equilibria for cooperative search-engine advertising.

A manufacturer subsidises a share theta of one retailer's advertising cost;
optionally a rival retailer competes for the same market. The solver
integrates the coefficient ODEs of the affine value functions backwards,
simulates the market share forwards and grid-searches theta.
"""
from .equilibrium import build_trajectory, feedback_controls, hj_residual, profits, value_at
from .experiments import Axis, SweepSpec, compare_scenarios, sweep
from .model import ConfigError, DomainError, QualitySchedule, ScenarioConfig, base_config, validate_config
from .ode import PreconditionError, integrate_state, solve_coefficients, solve_coefficients_I, solve_coefficients_II
from .subsidy import OptimizationError, optimal_rates, scan_subsidy

__all__ = [
    "Axis", "ConfigError", "DomainError", "OptimizationError", "PreconditionError", "QualitySchedule",
    "ScenarioConfig", "SweepSpec", "base_config", "build_trajectory", "compare_scenarios",
    "feedback_controls", "hj_residual", "integrate_state", "optimal_rates", "profits", "scan_subsidy",
    "solve_coefficients", "solve_coefficients_I", "solve_coefficients_II", "sweep", "validate_config",
    "value_at",
]

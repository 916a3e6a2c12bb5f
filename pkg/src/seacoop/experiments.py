"""Parameter sweeps and the with/without-competition comparison."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import EquilibriumTrajectory, build_trajectory, profits
from .model import ConfigError, QualitySchedule, ScenarioConfig, parse_schedule
from .subsidy import DEFAULT_THETA_STEP, OptimizationError, scan_subsidy

SCALAR_AXES = ("q1", "q2", "qM", "c1", "c2", "cM", "x0")
SCHEDULE_AXES = ("q1", "q2", "qM")
OUTPUTS = ("theta_star", "theta_bar", "J1", "J2", "JM", "Jchannel", "trajectories")
ROW_COLUMNS = ("feasible", "theta", "theta_star", "theta_bar", "J1", "J2", "JM", "Jchannel")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def scalar(cls, name, start, stop, count):
        if name not in SCALAR_AXES:
            raise ConfigError([("axes", f"cannot sweep {name!r}")])
        if count < 1:
            raise ConfigError([("axes", f"{name}: count must be >= 1")])
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, int(count))))

    @classmethod
    def schedules(cls, name, schedules):
        if name not in SCHEDULE_AXES:
            raise ConfigError([("axes", f"{name!r} does not take schedules")])
        return cls(name, tuple(parse_schedule(s, name) for s in schedules))

    def label(self, value):
        if isinstance(value, QualitySchedule):
            if value.kind == "constant":
                return value.q0
            if value.kind == "linear":
                return f"linear({value.start:g}->{value.end:g})"
            return "table"
        return value


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axes: tuple
    outputs: tuple = ("theta_star", "theta_bar", "J1", "JM", "Jchannel")
    theta_step: float = DEFAULT_THETA_STEP
    theta: float | None = None  # fixed rate; None -> evaluate at theta_star

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError([("axes", "a sweep takes one or two axes")])
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ConfigError([("outputs", f"unknown outputs {bad}")])
        # every point must validate up front
        for point in self.points():
            self.config_at(point)

    def points(self):
        return list(itertools.product(*(a.values for a in self.axes)))

    def config_at(self, point):
        changes = {a.name: v for a, v in zip(self.axes, point)}
        for name in SCHEDULE_AXES:
            if name in changes and not isinstance(changes[name], QualitySchedule):
                changes[name] = QualitySchedule.constant(changes[name])
        if "q2" in changes and self.base.scenario != "II":
            raise ConfigError([("axes", "q2 can only be swept in scenario II")])
        return self.base.with_(**changes)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list
    trajectories: list = field(default_factory=list)

    @property
    def columns(self):
        names = [a.name for a in self.spec.axes]
        wanted = [c for c in ROW_COLUMNS if c in ("feasible", "theta") or c in self.spec.outputs]
        return names + wanted

    def column(self, name):
        return np.array([row[name] for row in self.rows], dtype=float)

    def table(self, name):
        """Output ``name`` reshaped to the axis grid."""
        return self.column(name).reshape([len(a.values) for a in self.spec.axes])

    def cross_effects(self):
        """Share of adjacent grid pairs where a partner's margin raises a
        member's profit (c1 -> JM and cM -> J1); NaN when not swept."""
        names = [a.name for a in self.spec.axes]
        out = {}
        for member, partner in (("JM", "c1"), ("J1", "cM")):
            if partner in names and member in self.spec.outputs:
                diff = np.diff(self.table(member), axis=names.index(partner))
                out[f"d{member}/d{partner}"] = float(np.mean(diff > 0))
            else:
                out[f"d{member}/d{partner}"] = float("nan")
        return out


def _evaluate_point(spec: SweepSpec, point):
    cfg = spec.config_at(point)
    row = {a.name: a.label(v) for a, v in zip(spec.axes, point)}
    nan = float("nan")
    row.update(feasible=False, theta=nan, theta_star=nan, theta_bar=nan, J1=nan, J2=nan, JM=nan, Jchannel=nan)
    traj = None
    try:
        curve = scan_subsidy(cfg, spec.theta_step)
    except OptimizationError:
        return row, traj
    row.update(theta_star=curve.theta_star, theta_bar=curve.theta_bar)
    theta = curve.theta_star if spec.theta is None else spec.theta
    traj = build_trajectory(cfg, theta)
    row["theta"] = theta
    if traj.feasible:
        rep = profits(cfg, traj)
        row.update(feasible=True, J1=rep.J1, JM=rep.JM, Jchannel=rep.Jchannel)
        if rep.J2 is not None:
            row["J2"] = rep.J2
    return row, traj


def _evaluate_star(args):
    return _evaluate_point(*args)


def sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Full factorial evaluation; one row per grid point in axis order.

    Infeasible points stay in the table with ``feasible=False``.
    """
    pts = spec.points()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_evaluate_star, [(spec, p) for p in pts]))
    else:
        results = [_evaluate_point(spec, p) for p in pts]
    rows = [r for r, _ in results]
    trajs = [t for _, t in results] if "trajectories" in spec.outputs else []
    return SweepResult(spec, rows, trajs)


def spec_from_dict(base: ScenarioConfig, raw: dict) -> SweepSpec:
    """Build a sweep from its JSON form.

    ``{"axes": [{"name": "q1", "start": .., "stop": .., "count": ..} |
    {"name": "qM", "schedules": [...]}], "outputs": [...],
    "theta_step": .., "theta": ..}``
    """
    axes = []
    for i, ax in enumerate(raw.get("axes", [])):
        try:
            if "schedules" in ax:
                axes.append(Axis.schedules(ax["name"], ax["schedules"]))
            elif "values" in ax:
                if ax["name"] not in SCALAR_AXES:
                    raise ConfigError([("axes", f"cannot sweep {ax['name']!r}")])
                axes.append(Axis(ax["name"], tuple(float(v) for v in ax["values"])))
            else:
                axes.append(Axis.scalar(ax["name"], ax["start"], ax["stop"], ax["count"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError([(f"axes[{i}]", f"malformed axis: {exc}")]) from None
    kw = {}
    if "outputs" in raw:
        kw["outputs"] = tuple(raw["outputs"])
    if "theta_step" in raw:
        kw["theta_step"] = float(raw["theta_step"])
    if raw.get("theta") is not None:
        kw["theta"] = float(raw["theta"])
    return SweepSpec(base=base, axes=tuple(axes), **kw)


@dataclass
class ScenarioRun:
    config: ScenarioConfig
    theta_star: float
    theta_bar: float
    at_star: EquilibriumTrajectory
    at_matched: EquilibriumTrajectory
    J1: float
    JM: float
    Jchannel: float
    J2: float | None = None


@dataclass
class ComparisonReport:
    worc: ScenarioRun
    wrc: ScenarioRun
    matched_theta: float
    deltas: dict

    def summary(self):
        keys = ("theta_star", "theta_bar", "J1", "JM", "Jchannel")
        out = {"matched_theta": self.matched_theta}
        for k in keys:
            out[f"{k}_worc"] = getattr(self.worc, k)
            out[f"{k}_wrc"] = getattr(self.wrc, k)
            out[f"{k}_delta"] = self.deltas[k]
        out["J2_wrc"] = self.wrc.J2
        return out


def _run(cfg, theta_step, matched):
    curve = scan_subsidy(cfg, theta_step)
    at_star = build_trajectory(cfg, curve.theta_star)
    rep = profits(cfg, at_star)
    m = matched if matched is not None else curve.theta_star
    return ScenarioRun(
        config=cfg,
        theta_star=curve.theta_star,
        theta_bar=curve.theta_bar,
        at_star=at_star,
        at_matched=build_trajectory(cfg, m),
        J1=rep.J1,
        JM=rep.JM,
        Jchannel=rep.Jchannel,
        J2=rep.J2,
    )


def compare_scenarios(base: ScenarioConfig, theta_step: float = DEFAULT_THETA_STEP, matched_theta=None) -> ComparisonReport:
    """Run the alliance with (WRC) and without (WORC) the rival retailer.

    ``base`` must be a Scenario II configuration; the WORC run drops q2. Both
    runs are evaluated at their own theta_star, and additionally at a
    matched rate (default: the WORC theta_star) for path comparisons.
    """
    if base.scenario != "II" or base.q2 is None:
        raise ConfigError([("q2", "comparison needs a scenario II base with q2")])
    worc_cfg = base.with_(scenario="I", q2=None)
    worc = _run(worc_cfg, theta_step, matched_theta)
    matched = worc.theta_star if matched_theta is None else matched_theta
    wrc = _run(base, theta_step, matched)
    deltas = {k: getattr(wrc, k) - getattr(worc, k) for k in ("theta_star", "theta_bar", "J1", "JM", "Jchannel")}
    for name in ("x", "u1", "v"):
        deltas[name] = getattr(wrc.at_star, name) - getattr(worc.at_star, name)
        deltas[f"matched_{name}"] = getattr(wrc.at_matched, name) - getattr(worc.at_matched, name)
    return ComparisonReport(worc=worc, wrc=wrc, matched_theta=float(matched), deltas=deltas)

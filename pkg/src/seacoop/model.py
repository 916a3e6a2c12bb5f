"""Domain types, validation, quality-score schedules and time grids."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping

import numpy as np

THETA_MAX = 0.99
MIN_GRID_STEPS = 10
DEFAULT_GRID_STEPS = 2000

# Base case: every effectiveness 0.05, every quality score 0.15, every margin 200.
BASE_RHO = 0.05
BASE_Q = 0.15
BASE_C = 200.0
BASE_R = 0.05
BASE_T = 100.0
BASE_X0 = 0.1


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``violations`` is a list of ``(field, message)`` pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{name}: {text}" for name, text in self.violations)
        super().__init__(msg or "invalid configuration")

    @property
    def fields(self):
        return [name for name, _ in self.violations]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class MarketParams:
    rho1: float = BASE_RHO
    rho2: float = BASE_RHO
    rhoM: float = BASE_RHO
    c1: float = BASE_C
    c2: float = BASE_C
    cM: float = BASE_C
    r: float = BASE_R
    T: float = BASE_T
    x0: float = BASE_X0

    def violations(self):
        out = []
        for name in ("rho1", "rho2", "rhoM", "c1", "c2", "cM", "r"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                out.append((name, f"must be finite and >= 0, got {v!r}"))
        if not math.isfinite(self.T) or self.T <= 0:
            out.append(("T", f"must be finite and > 0, got {self.T!r}"))
        if not math.isfinite(self.x0) or not 0.0 <= self.x0 <= 1.0:
            out.append(("x0", f"must lie in [0, 1], got {self.x0!r}"))
        return out


@dataclass(frozen=True)
class QualitySchedule:
    """Quality score q(t) on [0, T].

    kind is ``"constant"`` (uses ``q0``), ``"linear"`` (``start`` -> ``end``)
    or ``"table"`` (``points``: increasing ``(t, q)`` samples covering [0, T]).
    """

    kind: str
    q0: float = 0.0
    start: float = 0.0
    end: float = 0.0
    points: tuple = ()

    @classmethod
    def constant(cls, q0):
        return cls("constant", q0=float(q0))

    @classmethod
    def linear(cls, start, end):
        return cls("linear", start=float(start), end=float(end))

    @classmethod
    def table(cls, points):
        return cls("table", points=tuple((float(t), float(q)) for t, q in points))

    @property
    def is_zero(self):
        if self.kind == "constant":
            return self.q0 == 0.0
        if self.kind == "linear":
            return self.start == 0.0 and self.end == 0.0
        return all(q == 0.0 for _, q in self.points)

    def mean(self, T):
        """Time average of q over [0, T]."""
        if self.kind == "constant":
            return self.q0
        if self.kind == "linear":
            return 0.5 * (self.start + self.end)
        ts, qs = np.array(self.points).T
        return float(np.trapezoid(qs, ts) / T)

    def violations(self, name, T):
        if self.kind == "constant":
            vals = [self.q0]
        elif self.kind == "linear":
            vals = [self.start, self.end]
        elif self.kind == "table":
            if len(self.points) < 2:
                return [(name, "table needs at least two points")]
            ts = [p[0] for p in self.points]
            vals = [p[1] for p in self.points]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                return [(name, "table times must be strictly increasing")]
            if ts[0] > 0.0 or ts[-1] < T:
                return [(name, f"table must cover [0, {T}]")]
        else:
            return [(name, f"unknown schedule kind {self.kind!r}")]
        if any(not math.isfinite(v) or v < 0 for v in vals):
            return [(name, "quality scores must be finite and >= 0")]
        return []

    def to_dict(self):
        if self.kind == "constant":
            return {"kind": "constant", "q0": self.q0}
        if self.kind == "linear":
            return {"kind": "linear", "start": self.start, "end": self.end}
        return {"kind": "table", "points": [list(p) for p in self.points]}


def eval_quality(schedule: QualitySchedule, t, T: float):
    """Evaluate ``schedule`` at time(s) ``t`` on the horizon [0, T].

    Accepts a scalar or an array; returns the same shape.
    """
    ta = np.asarray(t, dtype=float)
    # Tolerate rounding in t = k*T/N at the right edge.
    slack = 1e-12 * max(1.0, T)
    if np.any(ta < -slack) or np.any(ta > T + slack):
        raise DomainError(f"t must lie in [0, {T}]")
    if schedule.kind == "constant":
        out = np.full_like(ta, schedule.q0)
    elif schedule.kind == "linear":
        out = schedule.start + (schedule.end - schedule.start) * (ta / T)
    elif schedule.kind == "table":
        ts, qs = np.array(schedule.points).T
        out = np.interp(ta, ts, qs)
    else:
        raise DomainError(f"unknown schedule kind {schedule.kind!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TimeGrid:
    T: float
    N: int

    @property
    def dt(self):
        return self.T / self.N

    @property
    def nodes(self):
        # k*T/N by multiplication, no accumulated drift; pin t_N to T
        t = np.arange(self.N + 1) * self.T / self.N
        t[-1] = self.T
        return t


def make_time_grid(T, N) -> TimeGrid:
    if not (isinstance(N, (int, np.integer)) and N >= MIN_GRID_STEPS):
        raise ConfigError([("grid_steps", f"must be an integer >= {MIN_GRID_STEPS}, got {N!r}")])
    if not (math.isfinite(T) and T > 0):
        raise ConfigError([("T", f"must be > 0, got {T!r}")])
    return TimeGrid(float(T), int(N))


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "I"
    params: MarketParams = field(default_factory=MarketParams)
    q1: QualitySchedule = field(default_factory=lambda: QualitySchedule.constant(BASE_Q))
    qM: QualitySchedule = field(default_factory=lambda: QualitySchedule.constant(BASE_Q))
    q2: QualitySchedule | None = None
    grid_steps: int = DEFAULT_GRID_STEPS
    theta: float | None = None

    @property
    def grid(self):
        return make_time_grid(self.params.T, self.grid_steps)

    def with_(self, **changes):
        """Copy with fields replaced; MarketParams names are accepted too."""
        pnames = set(MarketParams.__dataclass_fields__)
        pchanges = {k: changes.pop(k) for k in list(changes) if k in pnames}
        cfg = replace(self, **changes)
        if pchanges:
            cfg = replace(cfg, params=replace(cfg.params, **pchanges))
        return validate_config(cfg)

    def to_dict(self):
        d = {"scenario": self.scenario, **asdict(self.params)}
        d["q1"] = self.q1.to_dict()
        d["qM"] = self.qM.to_dict()
        if self.q2 is not None:
            d["q2"] = self.q2.to_dict()
        d["grid_steps"] = self.grid_steps
        if self.theta is not None:
            d["theta"] = self.theta
        return d


def base_config(scenario="I", **changes) -> ScenarioConfig:
    """Base-case configuration; Scenario II gets the base q2 as well."""
    raw = {"scenario": scenario}
    if scenario == "II":
        raw["q2"] = BASE_Q
    raw.update(changes)
    return validate_config(raw)


_KNOWN = {"scenario", "q1", "q2", "qM", "grid_steps", "theta"} | set(MarketParams.__dataclass_fields__)


def parse_schedule(value, name):
    """Schedule from a number (constant) or a ``{"kind": ...}`` mapping."""
    if isinstance(value, QualitySchedule):
        return value
    if isinstance(value, bool):
        raise ConfigError([(name, "expected a number or schedule object")])
    if isinstance(value, (int, float)):
        return QualitySchedule.constant(value)
    if not isinstance(value, Mapping):
        raise ConfigError([(name, "expected a number or schedule object")])
    kind = value.get("kind")
    try:
        if kind == "constant":
            return QualitySchedule.constant(value["q0"])
        if kind == "linear":
            return QualitySchedule.linear(value["start"], value["end"])
        if kind == "table":
            return QualitySchedule.table(value["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError([(name, f"malformed {kind} schedule: {exc}")]) from None
    raise ConfigError([(name, f"unknown schedule kind {kind!r}")])


def validate_theta(theta):
    if theta is None or isinstance(theta, bool) or not isinstance(theta, (int, float, np.floating)):
        raise ConfigError([("theta", f"must be a number, got {theta!r}")])
    if not (math.isfinite(theta) and 0.0 <= theta <= THETA_MAX):
        raise ConfigError([("theta", f"must lie in [0, {THETA_MAX}], got {theta!r}")])
    return float(theta)


def validate_config(raw: Any = None) -> ScenarioConfig:
    """Validate a raw mapping (or an existing ScenarioConfig).

    Omitted scalar fields and q1/qM fall back to the base case. q2 is
    required for Scenario II and dropped for Scenario I. All violations are
    collected and raised together as a :class:`ConfigError`.
    """
    if isinstance(raw, ScenarioConfig):
        raw = raw.to_dict()
    raw = dict(raw or {})
    errors = []

    unknown = sorted(set(raw) - _KNOWN)
    errors += [(k, "unknown field") for k in unknown]

    scenario = str(raw.get("scenario", "I"))
    if scenario not in ("I", "II"):
        errors.append(("scenario", f"must be 'I' or 'II', got {scenario!r}"))

    pvals = {}
    for name, fdef in MarketParams.__dataclass_fields__.items():
        v = raw.get(name, fdef.default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append((name, f"must be a number, got {v!r}"))
            v = fdef.default
        pvals[name] = float(v)
    params = MarketParams(**pvals)
    errors += params.violations()

    steps = raw.get("grid_steps", DEFAULT_GRID_STEPS)
    if isinstance(steps, float) and steps.is_integer():
        steps = int(steps)
    if isinstance(steps, bool) or not isinstance(steps, (int, np.integer)) or steps < MIN_GRID_STEPS:
        errors.append(("grid_steps", f"must be an integer >= {MIN_GRID_STEPS}, got {steps!r}"))
        steps = DEFAULT_GRID_STEPS

    scheds = {}
    for name in ("q1", "qM", "q2"):
        if name == "q2" and (scenario != "II" or raw.get("q2") is None):
            if scenario == "II":
                errors.append(("q2", "required for scenario II"))
            scheds[name] = None
            continue
        try:
            s = parse_schedule(raw.get(name, BASE_Q), name)
        except ConfigError as exc:
            errors += exc.violations
            continue
        errors += s.violations(name, params.T)
        scheds[name] = s

    theta = raw.get("theta")
    if theta is not None:
        try:
            theta = validate_theta(theta)
        except ConfigError as exc:
            errors += exc.violations

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        scenario=scenario,
        params=params,
        q1=scheds["q1"],
        qM=scheds["qM"],
        q2=scheds["q2"],
        grid_steps=int(steps),
        theta=theta,
    )

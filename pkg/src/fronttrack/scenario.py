"""Declarative scenario files: loading, validation and object construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .pipe import PipeProfile, pipe_source, stationary_profile
from .piecewise import PiecewiseConstant, polynomial_data
from .sources import (PolynomialProfile, SeparableSource, SourceError, ZeroSource, audit_domination,
                      make_profile)
from .systems import AdmissibilityError, IsentropicEuler, make_system

VERSION = 1


class ScenarioParseError(ValueError):
    """Unreadable file or malformed JSON."""


class ScenarioValidationError(ValueError):
    def __init__(self, issues):
        super().__init__("; ".join(issues))
        self.issues = list(issues)


def load_schema():
    return json.loads(resources.files("fronttrack").joinpath("scenario.schema.json").read_text())


def read_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


class TableSource(SeparableSource):
    """Piecewise polynomial g(x) * direction with an optional declared omega table."""

    def __init__(self, profile, direction, omega_profile=None):
        d = np.atleast_1d(np.asarray(direction, dtype=float))
        n = d.size
        super().__init__(profile, lambda u: d.copy(), lambda u: np.zeros((n, n)), np.linalg.norm(d), n=n,
                         name="custom_table")
        self.omega_profile = omega_profile
        if omega_profile is not None:
            lo = min(profile.support[0], omega_profile.support[0])
            hi = max(profile.support[1], omega_profile.support[1])
            self.support = (lo, hi)

    def omega(self, x):
        if self.omega_profile is None:
            return super().omega(x)
        return np.abs(self.omega_profile.density(x))

    def omega_antiderivative(self, x):
        if self.omega_profile is None:
            return super().omega_antiderivative(x)
        return self.omega_profile.abs_antiderivative(x)


@dataclass
class Scenario:
    raw: dict
    system: object
    source: object
    initial: object
    eps: float
    h: float
    T: float
    snapshot_times: list
    grid: np.ndarray
    seed: int = 0
    pipe: PipeProfile | None = None
    config_kw: dict = field(default_factory=dict)

    @property
    def name(self):
        return self.raw.get("name", "scenario")

    @property
    def study(self):
        return self.raw.get("study", {})


def _pieces(table):
    return PolynomialProfile([(p["a"], p["b"], p["coeffs"]) for p in table])


def build_source(spec, system):
    if spec is None or spec["name"] == "zero":
        return ZeroSource(system.n), None
    name, params = spec["name"], dict(spec.get("params", {}))
    direction = spec.get("direction", [1.0] * system.n)
    if len(direction) != system.n:
        raise ScenarioValidationError([f"source.direction: expected {system.n} components, got {len(direction)}"])
    if name == "pipe_profile":
        if not isinstance(system, IsentropicEuler):
            raise ScenarioValidationError(["source.name: pipe_profile requires the isentropic_euler system"])
        pipe = PipeProfile(params.get("a_minus", 1.0), params.get("a_plus", 1.0), params.get("l", 0.0),
                           params.get("connector", "smoothstep"))
        if pipe.l == 0:
            raise ScenarioValidationError(["source.params.l: a smooth profile needs l > 0 (use the l_sweep study "
                                           "for the discontinuous reference)"])
        return pipe_source(system, pipe), pipe
    if name == "custom_table":
        prof = _pieces(params["g"])
        omega = _pieces(params["omega"]) if "omega" in params else None
        return TableSource(prof, direction, omega), None
    return SeparableSource.constant(make_profile(name, **params), direction, name=name), None


def build_initial_data(spec, system, pipe=None):
    kind = spec["type"]
    if kind == "constant":
        return PiecewiseConstant.constant(spec["value"])
    if kind == "piecewise_constant":
        return PiecewiseConstant(spec["breaks"], spec["values"])
    if kind == "piecewise_polynomial":
        return polynomial_data(spec["breaks"], spec["pieces"])
    if kind == "stationary_profile":
        if pipe is None:
            raise ScenarioValidationError(["initial.type: stationary_profile requires a pipe_profile source"])
        data, _ = stationary_profile(system, pipe, spec["u_left"])
        return data
    raise ScenarioValidationError([f"initial.type: unknown kind {kind!r}"])


def _semantic_checks(raw):
    issues = []
    run = raw["run"]
    for key in ("eps", "h", "T"):
        if not run[key] > 0:
            issues.append(f"run.{key}: must be > 0 (got {run[key]})")
    for t in run.get("snapshot_times", []):
        if t > run["T"]:
            issues.append(f"run.snapshot_times: {t} exceeds T = {run['T']}")
    grid = run.get("grid")
    if grid and not grid["hi"] > grid["lo"]:
        issues.append("run.grid: hi must exceed lo")
    study = raw.get("study", {})
    for k, lvl in enumerate(study.get("refinement", [])):
        for key in ("eps", "h"):
            if not lvl[key] > 0:
                issues.append(f"study.refinement[{k}].{key}: must be > 0")
    dom = study.get("domain")
    if dom and not dom[1] > dom[0]:
        issues.append("study.domain: upper bound must exceed lower bound")
    init = raw["initial"]
    if init["type"] == "piecewise_constant":
        b, v = init.get("breaks"), init.get("values")
        if b is None or v is None or len(v) != len(b) + 1:
            issues.append("initial.values: need one more value than breaks")
        elif any(np.diff(b) < 0):
            issues.append("initial.breaks: must be sorted")
    if init["type"] == "constant" and "value" not in init:
        issues.append("initial.value: required for constant data")
    return issues


def validate(raw, audit_samples=1000, seed=None):
    """Full validation; returns a Scenario or raises ScenarioValidationError."""
    errors = sorted(jsonschema.Draft202012Validator(load_schema()).iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        issues = [f"{'.'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors]
        raise ScenarioValidationError(issues)
    issues = _semantic_checks(raw)
    if issues:
        raise ScenarioValidationError(issues)
    try:
        system = make_system(raw["system"]["name"], **raw["system"].get("params", {}))
    except (TypeError, ValueError, KeyError) as exc:
        raise ScenarioValidationError([f"system.params: {exc}"]) from exc
    try:
        source, pipe = build_source(raw.get("source"), system)
    except (TypeError, KeyError, SourceError, ValueError) as exc:
        if isinstance(exc, ScenarioValidationError):
            raise
        raise ScenarioValidationError([f"source.params: {exc}"]) from exc
    seed = raw.get("seed", 0) if seed is None else seed
    violations = audit_domination(system, source, samples=audit_samples, rng=np.random.default_rng(seed))
    if violations:
        v = violations[0]
        raise ScenarioValidationError([f"source: domination violated ({len(violations)} samples); first at "
                                       f"x={v.x!r}, u={list(v.u)!r}: {v.quantity} = {v.value:.6g} > omega = {v.bound:.6g}"])
    try:
        initial = build_initial_data(raw["initial"], system, pipe)
        for u in _probe_values(initial):
            system.check_admissible(u, "initial value")
    except AdmissibilityError as exc:
        raise ScenarioValidationError([f"initial: {exc}"]) from exc
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ScenarioValidationError):
            raise
        raise ScenarioValidationError([f"initial: {exc}"]) from exc
    run = raw["run"]
    grid_spec = run.get("grid")
    if grid_spec:
        grid = np.linspace(grid_spec["lo"], grid_spec["hi"], grid_spec["n"])
    else:
        lo, hi = initial.range()
        pad = 0.5 * max(hi - lo, 1.0)
        grid = np.linspace(lo - pad, hi + pad, 201)
    times = sorted(set(run.get("snapshot_times", [0.0, run["T"]])) | {run["T"]})
    config_kw = {k: run[k] for k in ("kappa", "tv_threshold", "max_events") if k in run}
    return Scenario(raw, system, source, initial, float(run["eps"]), float(run["h"]), float(run["T"]), times,
                    grid, seed, pipe, config_kw)


def _probe_values(data):
    if isinstance(data, PiecewiseConstant):
        return list(data.values)
    lo, hi = data.range()
    return list(data(np.linspace(lo, hi, 201)))


def load(path, seed=None, audit_samples=1000):
    return validate(read_file(path), audit_samples=audit_samples, seed=seed)

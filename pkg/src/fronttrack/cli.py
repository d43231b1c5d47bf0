"""Command-line scenario runner.

    fronttrack run scenario.json -o outdir [--threads N] [--seed S]
    fronttrack validate scenario.json [--seed S]

Exit codes: 0 success, 2 parse error, 3 validation error, 4 runtime abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (LinearLocalProblem, Trajectory, condition_i_curve, condition_ii_check, fit_constant,
                       halving_stability, semigroup_defect)
from .pipe import SonicBreakdown, limit_study
from .scenario import ScenarioParseError, ScenarioValidationError, load
from .sources import SeparableSource, ZeroSource
from .systems import AdmissibilityError, LinearScalar, RiemannError
from .tracking import FrontTrackingError, TrackerConfig

log = logging.getLogger("fronttrack")

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3, 4

CHECKS = {
    "np_budget": "total strength of non-physical fronts stays <= eps",
    "tv_blowup": "total variation stays below 10x the initial Glimm functional",
    "tv_threshold": "TV(u0) is within the admission threshold",
    "riemann": "every local Riemann or h-Riemann problem has an admissible solution",
    "max_events": "the event budget is not exhausted",
    "comb": "comb points are separated",
    "comb_consistency": "every zero front satisfies u+ = Phi_h(jh, u-) to 1e-9",
    "admissibility": "all states stay in the admissible region",
    "ordering": "front positions are nondecreasing",
    "sonic": "stationary flow stays subsonic",
    "runtime": "run completed",
}


def fmt(x):
    return f"{float(x):.17g}"


def _configure_logging():
    level = os.environ.get("FRONTTRACK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _config(sc, eps=None, h=None):
    return TrackerConfig(eps=sc.eps if eps is None else eps, h=sc.h if h is None else h, **sc.config_kw)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


# ---------------------------------------------------------------------------
# Run checks
# ---------------------------------------------------------------------------

def run_checks(system, fs):
    """Invariant checks on a front set; returns a list of check records."""
    eps = fs.config.eps
    npv = fs.np_strength()
    comb_err = 0.0
    for f in fs.fronts:
        if f.kind == "zero":
            comb_err = max(comb_err, float(np.linalg.norm(fs.comb.jump(f.key, f.ul) - f.ur)))
    admissible = all(system.is_admissible(u) for u in fs.states)
    pos = fs.positions
    ordered = bool(np.all(np.diff(pos) >= -1e-12)) if len(pos) > 1 else True
    return [
        {"name": "np_budget", "check": CHECKS["np_budget"], "value": npv, "bound": eps, "passed": npv <= eps * (1 + 1e-9)},
        {"name": "comb_consistency", "check": CHECKS["comb_consistency"], "value": comb_err, "bound": 1e-9,
         "passed": comb_err <= 1e-9},
        {"name": "admissibility", "check": CHECKS["admissibility"], "passed": admissible},
        {"name": "ordering", "check": CHECKS["ordering"], "passed": ordered},
    ]


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------

def exact_solution(sc):
    """Closed-form solution for linear transport with a state-independent source."""
    if not isinstance(sc.system, LinearScalar):
        return None
    if not isinstance(sc.source, (SeparableSource, ZeroSource)):
        return None
    if isinstance(sc.source, SeparableSource) and np.any(sc.source.dfield(np.zeros(1))):
        return None
    prob = LinearLocalProblem(sc.system, sc.source, np.zeros(1))
    return prob


def _run_member(sc, eps, h, t):
    traj = Trajectory(sc.system, sc.source, sc.initial, eps, h, config=_config(sc, eps, h))
    return traj.at(t)


def study_refinement(sc, out, threads, domain):
    levels = [(float(l["eps"]), float(l["h"])) for l in sc.study["refinement"]]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        runs = list(pool.map(lambda lv: _run_member(sc, lv[0], lv[1], sc.T), levels))
    prob = exact_solution(sc)
    a, b = domain
    rows = []
    if prob is not None:
        kinks = list(prob.kinks())
        shift = prob.lam[0] * sc.T
        brk = list(getattr(sc.initial, "breaks", getattr(sc.initial, "declared_breaks", ())))
        extra = kinks + [k + shift for k in kinks] + [x + shift for x in brk]
        exact = lambda x: prob.flat(sc.initial, sc.T, x)
        reference = "exact"
        for (eps, h), fs in zip(levels, runs):
            err = fs.to_piecewise().l1_distance_to(exact, a, b, extra_breaks=extra, pieces=8)
            rows.append((eps, h, err, fs.stats["events"], fs.stats["fronts"]))
    else:
        reference = "finest"
        finest = runs[-1].to_piecewise()
        for (eps, h), fs in zip(levels, runs):
            rows.append((eps, h, fs.to_piecewise().l1_distance(finest, a, b), fs.stats["events"], fs.stats["fronts"]))
    _write_csv(out / "convergence.csv", ["eps", "h", "l1_error", "events", "fronts"], rows)
    errs = [r[2] for r in rows]
    return {"reference": reference, "errors": errs,
            "monotone": bool(all(e2 <= e1 for e1, e2 in zip(errs, errs[1:])))}


def study_l_sweep(sc, out, threads, domain):
    spec = sc.study["l_sweep"]
    if sc.pipe is None:
        raise ScenarioValidationError(["study.l_sweep: requires a pipe_profile source"])
    ls = spec["l"]
    eps = spec.get("eps", sc.eps)
    t = spec.get("t", sc.T)
    hs = [l * spec.get("h_per_l", 1.0 / 16.0) for l in ls]
    res = limit_study(sc.system, sc.pipe.a_minus, sc.pipe.a_plus, sc.initial, ls, t, [eps] * len(ls), hs,
                      connector=sc.pipe.connector_name if sc.pipe.connector_name != "custom" else "smoothstep",
                      domain=domain, workers=threads, config=_config(sc, eps, hs[0]))
    (out / "limit_study.csv").write_text(res.to_csv(), encoding="utf-8")
    return {"distances": res.distances().tolist(), "monotone": res.is_monotone(),
            "junction_residual": res.junction_residual}


def study_condition_i(sc, out, traj):
    spec = sc.study["condition_i"]
    curve = condition_i_curve(traj, spec["tau"], spec["xi"], sorted(spec["theta"], reverse=True))
    _write_csv(out / "condition_i.csv", ["theta", "ratio"], curve)
    return {"curve": curve}


def study_condition_ii(sc, out, traj, domain):
    spec = sc.study["condition_ii"]
    rng = np.random.default_rng(sc.seed)
    lo, hi = domain
    t0, t1 = spec.get("tau_range", [0.0, 0.5 * sc.T])
    hw = spec.get("half_width", 0.25 * (hi - lo))
    rows, checks = [], []
    for _ in range(spec["probes"]):
        tau = float(rng.uniform(t0, t1))
        xi = float(rng.uniform(lo + hw, hi - hw))
        a, b = xi - hw, xi + hw
        theta = spec.get("theta", 0.25 * (b - a) / traj.lam_hat)
        theta = min(theta, 0.49 * (b - a) / traj.lam_hat)
        c = condition_ii_check(traj, tau, a, b, xi, theta)
        checks.append(c)
        rows.append((tau, xi, a, b, theta, c.lhs, c.bound_factor, c.ratio))
    _write_csv(out / "condition_ii.csv", ["tau", "xi", "a", "b", "theta", "lhs", "bound_factor", "ratio"], rows)
    C, spread = halving_stability(checks, rng=np.random.default_rng(sc.seed))
    return {"fitted_C": fit_constant(checks), "halving_spread": spread}


def study_semigroup(sc, out, domain):
    spec = sc.study["semigroup"]
    levels = [(float(l["eps"]), float(l["h"])) for l in sc.study.get("refinement", [])] or [(sc.eps, sc.h)]
    rows = []
    for eps, h in levels:
        d = semigroup_defect(sc.system, sc.source, sc.initial, eps, h, spec["t"], spec["s"], domain,
                             config=_config(sc, eps, h))
        rows.append((eps, h, float(spec["t"]), float(spec["s"]), d))
    _write_csv(out / "semigroup.csv", ["eps", "h", "t", "s", "defect"], rows)
    return {"defects": [r[-1] for r in rows]}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _domain(sc):
    if "domain" in sc.study:
        return tuple(sc.study["domain"])
    return float(sc.grid[0]), float(sc.grid[-1])


def cmd_run(args):
    try:
        sc = load(args.scenario, seed=args.seed)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        for issue in exc.issues:
            print(f"validation error: {issue}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    diag = {"status": "ok", "scenario": sc.name, "version": __version__, "seed": sc.seed,
            "eps": sc.eps, "h": sc.h, "T": sc.T}
    events_path = out / "fronts.jsonl"
    log_fronts = sc.raw["run"].get("log_fronts", True)
    try:
        with open(events_path, "w", encoding="utf-8") as fh:
            sink = (lambda ev: fh.write(json.dumps(ev, sort_keys=True, default=_jsonable) + "\n")) if log_fronts else None
            traj = Trajectory(sc.system, sc.source, sc.initial, sc.eps, sc.h, config=_config(sc))
            traj._engine.event_log = sink
            rows = []
            checks = []
            for t in sc.snapshot_times:
                fs = traj.at(t)
                vals = fs.snapshot(sc.grid)
                for x, u in zip(sc.grid, vals):
                    rows.append((fmt(t), fmt(x), *[fmt(c) for c in u]))
                for c in run_checks(sc.system, fs):
                    checks.append({"t": t, **c})
        with open(out / "snapshots.csv", "w", encoding="utf-8") as fh:
            fh.write("t,x," + ",".join(f"u{k + 1}" for k in range(sc.system.n)) + "\n")
            for r in rows:
                fh.write(",".join(r) + "\n")
        final = traj.at(sc.T)
        diag["stats"] = {k: v for k, v in final.stats.items()}
        diag["checks"] = checks
        diag["glimm_history"] = [list(hh) for hh in traj._engine.history]
        domain = _domain(sc)
        studies = {}
        if "refinement" in sc.study:
            studies["refinement"] = study_refinement(sc, out, args.threads, domain)
        if "l_sweep" in sc.study:
            studies["l_sweep"] = study_l_sweep(sc, out, args.threads, domain)
        if "condition_i" in sc.study:
            studies["condition_i"] = study_condition_i(sc, out, traj)
        if "condition_ii" in sc.study:
            studies["condition_ii"] = study_condition_ii(sc, out, traj, domain)
        if "semigroup" in sc.study:
            studies["semigroup"] = study_semigroup(sc, out, domain)
        diag["studies"] = studies
        failed = [c for c in checks if not c["passed"]]
        if failed:
            diag["status"] = "aborted"
            diag["error"] = {"invariant": failed[0]["name"], "check": failed[0]["check"], "t": failed[0]["t"],
                             "message": "invariant check failed"}
            _write_json(out / "diagnostics.json", diag)
            return EXIT_RUNTIME
    except FrontTrackingError as exc:
        diag["status"] = "aborted"
        diag["error"] = {"invariant": exc.invariant, "check": CHECKS.get(exc.invariant, exc.invariant),
                         "t": exc.t, "x": exc.x, "message": str(exc)}
        _write_json(out / "diagnostics.json", diag)
        print(f"runtime abort: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (SonicBreakdown, AdmissibilityError, RiemannError) as exc:
        inv = "sonic" if isinstance(exc, SonicBreakdown) else "riemann"
        diag["status"] = "aborted"
        diag["error"] = {"invariant": inv, "check": CHECKS[inv], "message": str(exc)}
        _write_json(out / "diagnostics.json", diag)
        print(f"runtime abort: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ScenarioValidationError as exc:
        for issue in exc.issues:
            print(f"validation error: {issue}", file=sys.stderr)
        return EXIT_VALIDATION
    _write_json(out / "diagnostics.json", diag)
    return EXIT_OK


def cmd_validate(args):
    try:
        load(args.scenario, seed=args.seed)
    except ScenarioParseError as exc:
        print(json.dumps({"valid": False, "issues": [str(exc)]}))
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(json.dumps({"valid": False, "issues": exc.issues}))
        return EXIT_VALIDATION
    print(json.dumps({"valid": True, "issues": []}))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fronttrack", description="Front tracking for balance laws with integrable sources.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario and write outputs")
    r.add_argument("scenario")
    r.add_argument("-o", "--output", required=True, help="output directory")
    r.add_argument("--threads", type=int, default=1, help="parallel study members")
    r.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="validate a scenario without running it")
    v.add_argument("scenario")
    v.add_argument("--seed", type=int, default=None)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

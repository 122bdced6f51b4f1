"""Command-line driver.

Exit codes: 0 all expectations met, 1 verification or convergence failure,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import verifier as V
from .algebra import DomainError
from .geomseries import ConvergenceError, GeomSeriesProblem, solve_commutator, solve_dilation_equation
from .instances import make_conical, make_instance, make_unipotent
from .report import DEFAULT_CONFIG, CampaignConfig, ConfigError, RunReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PROPERTY_KINDS = ("LIN", "COLIN", "SHUFFLE", "theorem2", "theorem3", "all")


class UsageError(Exception):
    pass


def _config(args) -> CampaignConfig:
    raw = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text()) if Path(args.config).exists() else None
        if raw is None:
            raise ConfigError(f"config file not found: {args.config}")
    raw = dict(raw)
    sample = dict(DEFAULT_CONFIG["sample"], **raw.get("sample", {}))
    if args.seed is not None:
        sample["seed"] = args.seed
    if args.samples is not None:
        sample["count"] = args.samples
    raw["sample"] = sample
    if args.tol is not None:
        raw["tolerances"] = dict(DEFAULT_CONFIG["tolerances"], **raw.get("tolerances", {}), **{"pass": args.tol})
    if args.instance:
        raw["instances"] = list(args.instance)
    raw.setdefault("schema", DEFAULT_CONFIG["schema"])
    return CampaignConfig.from_dict(raw)


def _record(report, descriptor, prop):
    report.results.setdefault(descriptor, {})[prop.property.split("[")[0]] = prop.to_dict()


def _expect(report, cfg, descriptor, law, prop):
    expected = cfg.expectation(descriptor, law)
    if expected is None:
        return True
    met = prop.verdict == expected
    report.expectations.append({"instance": descriptor, "property": law, "expected": expected,
                                "verdict": prop.verdict, "met": met})
    return met


def cmd_axioms(cfg: CampaignConfig) -> RunReport:
    report = RunReport("axioms", cfg.sample.seed, cfg.echo())
    ok = True
    for desc in cfg.instances:
        t0 = time.perf_counter()
        alg = make_instance(desc)
        ax = V.check_axioms(alg, cfg.sample_for(desc), cfg.pass_tol)
        _record(report, desc, ax)
        em_alg, em_count = alg, cfg.em.get("count", 50)
        kind, _, n = desc.partition(":")
        if kind == "unipotent" and int(n) >= 3 and cfg.em.get("exact_unipotent", True):
            em_alg, em_count = make_unipotent(int(n), exact=True), cfg.em.get("exact_count", 8)
        em = V.check_em(em_alg, cfg.schedule, cfg.sample_for(desc, em_count), cfg.limit_tol)
        _record(report, desc, em)
        ok = ok and ax.passed and em.passed
        report.timings[desc] = time.perf_counter() - t0
    report.exit_code = EXIT_OK if ok else EXIT_FAIL
    return report


def _conical_specs(cfg):
    for desc in cfg.instances:
        alg = make_instance(desc)
        if alg.group is not None:
            yield desc, alg


def cmd_property(cfg: CampaignConfig, kind: str) -> RunReport:
    if kind not in PROPERTY_KINDS:
        raise UsageError(f"unknown property {kind!r}; expected one of {', '.join(PROPERTY_KINDS)}")
    report = RunReport(f"property:{kind}", cfg.sample.seed, cfg.echo())
    ok = True
    wanted = cfg.properties if kind == "all" else [kind]
    laws = [k for k in ("LIN", "COLIN", "SHUFFLE") if k in wanted]
    for desc in cfg.instances:
        t0 = time.perf_counter()
        alg = make_instance(desc)
        for law in laws:
            prop = V.check_distributivity(alg, law, cfg.sample_for(desc), cfg.pass_tol, cfg.fail_tol)
            _record(report, desc, prop)
            ok = _expect(report, cfg, desc, law, prop) and ok
        report.timings[desc] = time.perf_counter() - t0
    if "theorem2" in wanted:
        for desc, alg in _conical_specs(cfg):
            s = cfg.sample_for(desc)
            prop = V.theorem2_dichotomy(alg.group, alg.metric, alg.sampler, s, cfg.pass_tol, cfg.fail_tol, desc)
            _record(report, desc, prop)
            ident = V.commutator_identity_campaign(alg.group, alg.metric, alg.sampler, s, cfg.pass_tol, desc)
            _record(report, desc, ident)
            ok = ok and prop.passed and ident.passed
    if "theorem3" in wanted:
        handles = [make_instance(d) for d in cfg.instances]
        prop = V.colin_implies_lin_witness(handles, cfg.sample, cfg.pass_tol, cfg.fail_tol)
        report.results.setdefault("*", {})["theorem3_witness"] = prop.to_dict()
        ok = ok and prop.passed
    report.exit_code = EXIT_OK if ok else EXIT_FAIL
    return report


def _point(text, alg, default):
    if text is None:
        return default
    try:
        return np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse point {text!r}: {exc}") from exc


def cmd_geomseries(cfg: CampaignConfig, instance: str, base, target, epsilon: float, tol: float) -> RunReport:
    if not 0 < epsilon < 1:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    alg = make_instance(instance)
    if alg.exact:
        raise UsageError("geomseries runs on floating-point instances")
    base = _point(base, alg, alg.neutral)
    if target is None:
        raise UsageError("geomseries needs --target")
    target = _point(target, alg, None)
    report = RunReport("geomseries", cfg.sample.seed, cfg.echo())
    t0 = time.perf_counter()
    try:
        rep = solve_dilation_equation(GeomSeriesProblem(alg, base, target, epsilon, tol))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    report.timings["solve"] = time.perf_counter() - t0
    report.solver.append({
        "instance": instance, "epsilon": epsilon, "tol": tol, "converged": rep.converged,
        "steps_used": rep.steps_used, "equation_residual": rep.equation_residual,
        "limit": np.asarray(rep.limit, dtype=float).tolist(),
    })
    report.tables["geomseries_residuals"] = {
        "columns": ["n", "residual"], "rows": [[n + 1, r] for n, r in enumerate(rep.residuals)]}
    ok = rep.converged
    if instance.startswith("unipotent") and np.array_equal(base, alg.neutral):
        try:
            y = solve_commutator(target, epsilon, tol)
            report.solver.append({"instance": instance, "method": "commutator", "converged": True,
                                  "limit": y.tolist()})
        except ConvergenceError as exc:
            report.solver.append({"instance": instance, "method": "commutator", "converged": False,
                                  "equation_residual": exc.report.equation_residual})
            ok = False
    report.exit_code = EXIT_OK if ok else EXIT_FAIL
    return report


def cmd_curvature(cfg: CampaignConfig, a_list, instance="sphere", v=None, w=None) -> RunReport:
    if a_list is None:
        a_list = cfg.curvature["a"]
    if len(a_list) < 4:
        raise UsageError("curvature needs at least four scale values")
    alg = make_instance(instance)
    if alg.exp is None:
        raise UsageError(f"{instance} has no exponential map")
    x = alg.neutral
    dim = np.shape(x)[0]
    if dim < 2:
        raise UsageError("curvature needs a carrier of dimension at least 2")
    v = _point(v, alg, np.eye(dim)[0])
    w = _point(w, alg, np.eye(dim)[1])
    if instance == "sphere" and (abs(np.dot(v, x)) > 1e-9 or abs(np.dot(w, x)) > 1e-9):
        raise UsageError("v and w must be tangent at the north pole")
    if abs(np.linalg.norm(v) - 1) > 1e-9 or abs(np.linalg.norm(w) - 1) > 1e-9 or abs(np.dot(v, w)) > 1e-9:
        raise UsageError("v and w must be orthonormal")
    report = RunReport("curvature", cfg.sample.seed, cfg.echo())
    t0 = time.perf_counter()
    try:
        fit = V.curvature_scaling(alg, x, v, w, a_list)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report.timings["curvature"] = time.perf_counter() - t0
    report.tables["curvature_gaps"] = {"columns": ["a", "gap"], "rows": [[a, g] for a, g in zip(fit.a_values, fit.gaps)]}
    lo, hi = cfg.curvature["slope"]
    ok = fit.slope is None or lo <= fit.slope <= hi
    report.results[instance] = {"curvature": {"slope": fit.slope, "verdict": fit.verdict,
                                              "excluded": fit.excluded, "expected_slope": [lo, hi],
                                              "passed": ok}}
    report.exit_code = EXIT_OK if ok else EXIT_FAIL
    return report


def format_report(report: RunReport) -> str:
    lines = [f"{report.command}  (seed {report.seed}, version {report.tool_version}, exit {report.exit_code})"]
    for inst, props in report.results.items():
        lines.append(f"  {inst}")
        for name, p in props.items():
            if "max_residual" in p:
                lines.append(f"    {name:<22} {p['verdict']:<13} max residual {p['max_residual']:.3e}"
                             f" over {p['count']} samples")
            else:
                lines.append(f"    {name:<22} {json.dumps(p, sort_keys=True)}")
    for e in report.expectations:
        mark = "ok" if e["met"] else "MISMATCH"
        lines.append(f"  expect {e['instance']} {e['property']} {e['expected']}: {e['verdict']} [{mark}]")
    for s in report.solver:
        lines.append(f"  solver {json.dumps({k: v for k, v in s.items() if k != 'limit'}, sort_keys=True)}")
        lines.append(f"    limit = {s.get('limit')}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON campaign config")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--tol", type=float, help="pass tolerance (or solver tolerance for geomseries)")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--tables", help="directory for CSV plot tables")
    common.add_argument("--instance", action="append", help="kind[:param], repeatable")

    p = argparse.ArgumentParser(prog="emergent", description="Emergent-algebra verification campaigns.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("axioms", parents=[common], help="axiom and convergence suites")
    prop = sub.add_parser("property", parents=[common], help="distributivity classification and theorems")
    prop.add_argument("kind", choices=PROPERTY_KINDS)
    gs = sub.add_parser("geomseries", parents=[common], help="solve the dilation equation")
    gs.add_argument("--base")
    gs.add_argument("--target")
    gs.add_argument("--epsilon", type=float, default=0.5)
    cv = sub.add_parser("curvature", parents=[common], help="ladder defect scaling")
    cv.add_argument("--a", type=float, nargs="+")
    cv.add_argument("--v")
    cv.add_argument("--w")
    rp = sub.add_parser("report", help="pretty-print a stored report")
    rp.add_argument("path")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "report":
            print(format_report(RunReport.loads(Path(args.path).read_text())))
            return EXIT_OK
        cfg = _config(args)
        if args.command == "axioms":
            report = cmd_axioms(cfg)
        elif args.command == "property":
            report = cmd_property(cfg, args.kind)
        elif args.command == "geomseries":
            instance = args.instance[-1] if args.instance else "vector:1"
            report = cmd_geomseries(cfg, instance, args.base, args.target, args.epsilon, args.tol or 1e-12)
        else:
            instance = args.instance[-1] if args.instance else "sphere"
            report = cmd_curvature(cfg, args.a, instance, args.v, args.w)
    except (ConfigError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(report.dumps())
    if args.tables:
        report.write_tables(args.tables)
    print(format_report(report))
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

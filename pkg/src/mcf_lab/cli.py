"""Command-line interface: ``mcf-lab <subcommand> [options]``.

Exit codes: 0 when every asserted tolerance holds, 1 on a failed check or a
runtime error, 2 on a configuration error.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import ScenarioConfig, parse_candidate, parse_metric
from .errors import ConfigError, MCFLabError
from .scenarios import BUILTIN_SCENARIOS, get_builtin, report_to_json, run_scenario

__all__ = ["main", "build_parser"]


def _global_flags(p, top=False):
    default = None if top else argparse.SUPPRESS
    p.add_argument("--config", default=default, help="scenario config (JSON file)")
    p.add_argument("--out", default=default, help="output directory (overridden by $MCF_LAB_OUT)")
    p.add_argument("--seed", type=int, default=default, help="RNG seed (unsigned)")
    p.add_argument("--json", action="store_true", default=False if top else argparse.SUPPRESS,
                   help="print the machine-readable report to stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcf-lab", description="Curve-shortening flow solitons on surfaces.")
    _global_flags(ap, top=True)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("soliton", help="integrate a soliton initial curve")
    _global_flags(s)
    s.add_argument("--metric", default="flat", help="metric name or JSON spec")
    s.add_argument("--field", default=None, help="field JSON spec (defaults to the family field)")
    s.add_argument("--u", type=float)
    s.add_argument("--v", type=float)
    s.add_argument("--angle", type=float, default=None, help="Euclidean heading in radians")
    s.add_argument("--w", type=float)
    s.add_argument("--z", type=float)
    s.add_argument("--arclength", type=float)
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--both-ways", action="store_true")

    f = sub.add_parser("flow", help="evolve a curve or graph by curve-shortening flow")
    _global_flags(f)
    f.add_argument("--metric", default="flat")
    f.add_argument("--initial", help="initial curve CSV (s,u,v,w,z)")
    f.add_argument("--closed", action="store_true", help="treat the initial curve as closed")
    f.add_argument("--T", type=float, default=0.1)
    f.add_argument("--dx", type=float, default=None, help="graph grid spacing")
    f.add_argument("--dt", type=float, default=None)
    f.add_argument("--bc", choices=["dirichlet", "periodic"], default="dirichlet")
    f.add_argument("--series", type=int, default=100, help="record the time series every N steps")
    f.add_argument("--out-csv", dest="out_csv", default=None, help="time-series CSV (t,length,max_k,hausdorff)")

    v = sub.add_parser("verify-symmetry", help="check a point symmetry of the graph flow")
    _global_flags(v)
    v.add_argument("--metric", default="flat-normal-gaussian")
    v.add_argument("--field", required=False, help='candidate JSON {"tau":..,"xi":..,"eta":..}')
    v.add_argument("--jets", type=int, default=100)

    a = sub.add_parser("affine", help="classify a one-parameter affine family")
    _global_flags(a)
    a.add_argument("--family", default=None, help='JSON spec {"n":2,"samples":[...]} or {"named":"shear"}')
    a.add_argument("--named", default=None, help="closed-form family name")
    a.add_argument("--time-scale", type=float, default=1.0)

    sc = sub.add_parser("scenario", help="run a built-in or configured scenario")
    _global_flags(sc)
    sc.add_argument("name", nargs="?", help="built-in scenario name")
    sc.add_argument("--list", action="store_true", help="list built-in scenarios")
    return ap


def _out_dir(args):
    return os.environ.get("MCF_LAB_OUT") or args.out


def _emit(report, args):
    if args.json:
        sys.stdout.write(report_to_json(report))
    else:
        print(f"{report.get('scenario', report.get('field', ''))}: {report['status']}")
        for c in report.get("checks", []):
            mark = "ok " if c["passed"] else "FAIL"
            print(f"  [{mark}] {c['name']} = {c['value']} ({c['op']} {c['tol']})")
    return 0 if report["status"] == "pass" else 1


def _with_seed(cfg, args):
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.validate()
    return cfg


def _soliton_cfg(args):
    initial = {}
    if args.u is not None or args.v is not None:
        if args.u is None or args.v is None:
            raise ConfigError("--u and --v go together")
        initial = {"u": args.u, "v": args.v}
        if args.w is not None:
            initial.update(w=args.w, z=args.z if args.z is not None else 0.0)
        else:
            initial["angle"] = args.angle if args.angle is not None else 0.0
        initial["arclength"] = args.arclength if args.arclength is not None else 1.0
        initial["both_ways"] = args.both_ways
    run = {"step": args.step}
    if args.arclength is not None and not initial:
        run["arclength"] = args.arclength
    field = json.loads(args.field) if args.field and args.field.lstrip().startswith("{") else \
        (json.load(open(args.field)) if args.field else {})
    return ScenarioConfig.from_dict({"name": "soliton", "kind": "soliton", "metric": _metric_arg(args.metric),
                                     "field": field, "initial": initial, "run": run})


def _metric_arg(text):
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid metric JSON: {exc}") from None
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return text


def _flow(args):
    from .curves import export_curve, hausdorff_distance, import_curve
    from .flow import BoundaryCondition, run_graph_flow, run_parametric_flow
    from .scenarios import _max_curvature, _write_series

    metric, _ = parse_metric(_metric_arg(args.metric))
    if not args.initial:
        raise ConfigError("flow needs --initial <csv> (or --config)")
    try:
        curve0 = import_curve(args.initial, closed=args.closed)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read initial curve: {exc}") from None
    out = _out_dir(args)
    report = {"scenario": "flow", "status": "pass", "checks": [], "metrics": {"residuals": {}, "distances": {},
                                                                              "runtimes": {}}}
    series = []
    if metric.is_isothermal:
        dt = args.dt or 0.1 * float(curve0.segment_lengths(metric).min()) ** 2

        def record(c):
            series.append((c.t, c.length(metric), _max_curvature(metric, c), hausdorff_distance(c, curve0, 512)))

        final = run_parametric_flow(metric, curve0, args.T, dt, callback=record, record_every=args.series)
    else:
        x, u = curve0.u, curve0.v
        dx = args.dx or float(np.mean(np.diff(x)))
        n = max(4, int(round((x[-1] - x[0]) / dx)))
        bc = BoundaryCondition.periodic() if args.bc == "periodic" else BoundaryCondition.dirichlet(
            None, float(u[0]), float(u[-1]))
        sol = run_graph_flow(metric, float(x[0]), float(x[-1]), n, lambda xx: np.interp(xx, x, u), args.T, bc,
                             args.dt)
        from .curves import Curve
        final = Curve(np.column_stack([sol.x, sol.u]), "graph", t=sol.t)
        series.append((sol.t, final.length(), float("nan"), hausdorff_distance(final, curve0, 512)))
    report["metrics"]["distances"]["hausdorff_to_initial"] = series[-1][3] if series else 0.0
    if out:
        os.makedirs(out, exist_ok=True)
        export_curve(final, os.path.join(out, "flow_final.csv"))
    if args.out_csv or out:
        _write_series(args.out_csv or os.path.join(out, "flow_series.csv"), series)
    return report


def _verify_symmetry(args):
    from .symmetry import determining_residuals, prolongation_residual, verdict

    metric, _ = parse_metric(_metric_arg(args.metric))
    if not args.field:
        raise ConfigError("verify-symmetry needs --field")
    cand, expect = parse_candidate(_metric_arg(args.field))
    seed = args.seed if args.seed is not None else 0
    if args.jets <= 0:
        raise ConfigError("--jets must be positive")
    res = prolongation_residual(metric, cand, args.jets, seed)
    det = determining_residuals(metric, cand)
    v = verdict(res).value
    return {"field": cand.name, "residual_max": res, "verdict": v, "determining": [float(d) for d in det],
            "status": "pass" if v == expect else "fail",
            "rng": {"generator": "numpy.random.PCG64 via default_rng(seed)", "seed": seed}}


def _affine(args):
    from .affine import AffineFamily, classify_family, infinitesimal_split

    if args.family:
        doc = _metric_arg(args.family)
    elif args.named:
        doc = {"named": args.named}
    else:
        raise ConfigError("affine needs --family or --named")
    if "named" in doc:
        doc = dict(doc, time_scale=args.time_scale * float(doc.get("time_scale", 1.0)))
    try:
        fam = AffineFamily.from_json(doc)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad affine family: {exc}") from None
    v, note = classify_family(fam)
    sp = infinitesimal_split(fam)
    return {"family": fam.name, "verdict": v.value, "note": note, "status": "pass",
            "split": {"skew": sp.skew.tolist(), "scalar": sp.scalar, "upper": sp.upper.tolist(),
                      "translation": sp.translation.tolist()}}


def _emit_plain(result, args):
    if args.json:
        sys.stdout.write(report_to_json(result))
    else:
        for k, val in result.items():
            print(f"{k}: {val}")
    return 0 if result.get("status", "pass") == "pass" else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = _with_seed(ScenarioConfig.from_dict(args.config), args)
            return _emit(run_scenario(cfg, _out_dir(args)), args)
        if args.command == "scenario":
            if args.list:
                for name in sorted(BUILTIN_SCENARIOS):
                    print(name)
                return 0
            if not args.name:
                raise ConfigError("scenario needs a name or --config")
            cfg = get_builtin(args.name, args.seed)
            return _emit(run_scenario(cfg, _out_dir(args)), args)
        if args.command == "soliton":
            cfg = _with_seed(_soliton_cfg(args), args)
            return _emit(run_scenario(cfg, _out_dir(args)), args)
        if args.command == "flow":
            return _emit(_flow(args), args)
        if args.command == "verify-symmetry":
            return _emit_plain(_verify_symmetry(args), args)
        if args.command == "affine":
            return _emit_plain(_affine(args), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MCFLabError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "arclength", None) is not None:
            diag["arclength"] = exc.arclength
        print(json.dumps(diag), file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())

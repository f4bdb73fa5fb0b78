"""Scenario runners and the built-in scenario catalogue.

``run_scenario`` dispatches a validated :class:`ScenarioConfig` to one of the
runners below and returns a JSON-ready report::

    {"scenario", "kind", "status", "checks", "metrics": {"residuals",
     "distances", "runtimes"}, "verdicts", "artifacts", "rng"}

``status`` is ``"pass"`` iff every check holds.  Runtimes are the only
non-deterministic entries.
"""

import copy
import csv
import math
import os
import time
from pathlib import Path

import numpy as np

from . import kernels
from .affine import AffineFamily, classify_family
from .config import ScenarioConfig, parse_candidate, parse_field, parse_metric
from .curves import Curve, circle, ellipse, export_curve, hausdorff_distance, import_curve
from .errors import ConfigError
from .flow import (BoundaryCondition, conformal_factor_check, metric_evolution_residual,
                   run_graph_flow, run_parametric_flow, self_similarity_check)
from .soliton import (SOLITON_FIXTURES, SolitonState, characterizing_residual, integrate_soliton,
                      soliton_arc, unit_speed_drift)
from .symmetry import (FLAT_NON_SYMMETRIES, FLAT_TABLE, HYPERBOLIC_CANDIDATES, FAIL_TOL, PASS_TOL,
                       determining_residuals, prolongation_residual, verdict)

__all__ = ["run_scenario", "BUILTIN_SCENARIOS", "get_builtin", "report_to_json", "strip_runtimes"]

RNG_NAME = "numpy.random.PCG64 via default_rng(seed)"


class _Report:
    def __init__(self, cfg):
        self.cfg = cfg
        self.checks = []
        self.residuals, self.distances, self.runtimes = {}, {}, {}
        self.verdicts, self.artifacts = [], []

    def check(self, name, value, tol, op="<="):
        value = float(value)
        ok = value <= tol if op == "<=" else value >= tol if op == ">=" else value == tol
        self.checks.append({"name": name, "value": value, "tol": tol, "op": op, "passed": bool(ok)})

    def expect(self, name, got, want):
        self.checks.append({"name": name, "value": got, "tol": want, "op": "==", "passed": got == want})

    def timed(self, key, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.runtimes[key] = time.perf_counter() - t0
        return out

    def finish(self):
        return {
            "scenario": self.cfg.name,
            "kind": self.cfg.kind,
            "status": "pass" if all(c["passed"] for c in self.checks) else "fail",
            "checks": self.checks,
            "metrics": {"residuals": self.residuals, "distances": self.distances, "runtimes": self.runtimes},
            "verdicts": self.verdicts,
            "artifacts": self.artifacts,
            "rng": {"generator": RNG_NAME, "seed": self.cfg.seed},
            "backend": kernels.BACKEND,
        }


def _fixture_name(cfg):
    m = cfg.metric
    if isinstance(m, str) and m in SOLITON_FIXTURES:
        return m
    if isinstance(m, dict) and m.get("fixture") in SOLITON_FIXTURES:
        return m["fixture"]
    return None


def _initial_state(cfg, metric):
    init = dict(cfg.initial)
    fx = _fixture_name(cfg)
    if not init and fx:
        (u, v), angle, length = SOLITON_FIXTURES[fx]
        return SolitonState.unit_speed(metric, u, v, angle), length, False
    allowed = {"u", "v", "angle", "w", "z", "arclength", "both_ways"}
    unknown = set(init) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in initial: {sorted(unknown)}")
    try:
        u, v = float(init["u"]), float(init["v"])
    except KeyError:
        raise ConfigError("initial needs u and v") from None
    if "w" in init:
        st = SolitonState(u, v, float(init["w"]), float(init.get("z", 0.0)))
    else:
        st = SolitonState.unit_speed(metric, u, v, float(init.get("angle", 0.0)))
    return st, float(init.get("arclength", 1.0)), bool(init.get("both_ways", False))


def _soliton_curve(cfg, metric, field, step=1e-3, project_every=100, arclength=None):
    st, length, both = _initial_state(cfg, metric)
    length = arclength or length
    if both:
        return soliton_arc(metric, field, st, 0.5 * length, step, project_every=project_every), length
    return integrate_soliton(metric, field, st, length, step, project_every), length


def _out_path(out_dir, name):
    if out_dir is None:
        return None
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    return str(Path(out_dir) / name)


def _run_soliton(cfg, rep, out_dir):
    metric, fam_field = parse_metric(cfg.metric)
    field = parse_field(cfg.field, fam_field)
    run = cfg.run
    curve, length = rep.timed("integrate", _soliton_curve, cfg, metric, field, run.get("step", 1e-3),
                              int(run.get("project_every", 100)), run.get("arclength"))
    res = characterizing_residual(metric, field, curve)
    drift = unit_speed_drift(metric, curve) / max(length, 1e-300)
    rep.residuals.update(characterizing=res, unit_speed_drift_per_arclength=drift)
    rep.check("characterizing_residual", res, cfg.tolerances.get("residual", 1e-6))
    rep.check("unit_speed_drift_per_arclength", drift, cfg.tolerances.get("drift", 1e-8))
    path = _out_path(out_dir, f"{cfg.name}_curve.csv")
    if path and run.get("export", True):
        export_curve(curve, path)
        rep.artifacts.append(os.path.basename(path))


def _initial_curve(spec):
    if "circle" in spec:
        c = spec["circle"]
        return circle(int(c.get("n", 256)), float(c.get("radius", 1.0)), tuple(c.get("center", (0.0, 0.0))))
    if "ellipse" in spec:
        c = spec["ellipse"]
        return ellipse(int(c.get("n", 256)), float(c["a"]), float(c["b"]))
    if "csv" in spec:
        return import_curve(spec["csv"], closed=bool(spec.get("closed", False)))
    raise ConfigError("parametric flow needs initial.circle, initial.ellipse or initial.csv")


def _max_curvature(metric, curve):
    pts = np.ascontiguousarray(curve.points)
    inner = pts if curve.closed else pts[1:-1]
    j = metric.jet(inner[:, 0], inner[:, 1])
    shp = inner[:, 0].shape
    kg, _ = kernels.polyline_velocity(pts, curve.closed, *(np.ascontiguousarray(np.broadcast_to(a, shp),
                                                                                dtype=float)
                                                           for a in (j.f, j.fp, j.fq)))
    return float(np.max(np.abs(kg)))


def _run_flow(cfg, rep, out_dir):
    metric, _ = parse_metric(cfg.metric)
    run = cfg.run
    mode = run.get("mode", "graph" if not metric.is_isothermal else "parametric")
    if mode == "parametric":
        curve0 = _initial_curve(cfg.initial)
        series = []

        def record(c):
            series.append((c.t, c.length(metric), _max_curvature(metric, c),
                           hausdorff_distance(c, curve0, 512)))

        every = int(run.get("record_every", 0))
        final = rep.timed("flow", run_parametric_flow, metric, curve0, float(run.get("T", 0.1)),
                          float(run.get("dt", 1e-5)), int(run.get("resample_every", 20)),
                          callback=record if every else None, record_every=every)
        radius = float(np.mean(np.hypot(final.u, final.v)))
        rep.distances["mean_radius"] = radius
        rep.distances["length"] = final.length(metric)
        if "radius" in cfg.initial.get("exact", {}):
            err = abs(radius - float(cfg.initial["exact"]["radius"]))
            rep.distances["radius_error"] = err
            rep.check("radius_error", err, cfg.tolerances.get("radius", 1e-3))
        path = _out_path(out_dir, f"{cfg.name}_final.csv")
        if path and run.get("export", True):
            export_curve(final, path)
            rep.artifacts.append(os.path.basename(path))
            if series:
                ts_path = _out_path(out_dir, f"{cfg.name}_series.csv")
                _write_series(ts_path, series)
                rep.artifacts.append(os.path.basename(ts_path))
        return
    if mode != "graph":
        raise ConfigError(f"unknown flow mode {mode!r}")
    init = cfg.initial
    try:
        x0, x1 = float(init["x0"]), float(init["x1"])
        u0 = _expr_fn(init["expr"], ("x",))
    except KeyError as exc:
        raise ConfigError(f"graph flow initial needs {exc}") from None
    n = int(run["n"]) if "n" in run else int(round((x1 - x0) / float(run.get("dx", (x1 - x0) / 256))))
    exact = _expr_fn(run["exact"], ("x", "t")) if "exact" in run else None
    bc_kind = run.get("bc", "dirichlet")
    if bc_kind == "periodic":
        bc = BoundaryCondition.periodic()
    elif bc_kind == "dirichlet":
        left, right = float(u0(np.array(x0))), float(u0(np.array(x1)))
        bc = BoundaryCondition.dirichlet(exact, left, right)
    else:
        raise ConfigError(f"bc must be dirichlet or periodic, got {bc_kind!r}")
    sol = rep.timed("flow", run_graph_flow, metric, x0, x1, n, u0, float(run.get("T", 0.1)), bc,
                    run.get("dt"))
    rep.residuals["metric_evolution"] = metric_evolution_residual(sol, metric)
    if exact is not None:
        err = float(np.max(np.abs(sol.u - exact(sol.x, sol.t))))
        rep.distances["sup_error"] = err
        rep.check("sup_error", err, cfg.tolerances.get("sup_error", 1e-3))
    path = _out_path(out_dir, f"{cfg.name}_final.csv")
    if path and run.get("export", True):
        export_curve(Curve(np.column_stack([sol.x, sol.u]), "graph", t=sol.t), path)
        rep.artifacts.append(os.path.basename(path))


def _expr_fn(expr, variables):
    import sympy as sp

    syms = sp.symbols(variables)
    syms = syms if isinstance(syms, tuple) else (syms,)
    try:
        e = sp.sympify(expr, locals={str(s): s for s in syms})
    except (sp.SympifyError, TypeError) as exc:
        raise ConfigError(f"bad expression {expr!r}: {exc}") from None
    fn = sp.lambdify(syms, e, "numpy")
    return lambda *a: np.asarray(fn(*a), dtype=float) + 0.0 * np.asarray(a[0], dtype=float)


def _write_series(path, series):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "length", "max_k", "hausdorff"])
        for row in series:
            w.writerow([repr(float(x)) for x in row])


def _run_self_similarity(cfg, rep, out_dir):
    metric, fam_field = parse_metric(cfg.metric)
    field = parse_field(cfg.field, fam_field)
    run = cfg.run
    curve, _ = _soliton_curve(cfg, metric, field)
    rep.residuals["characterizing"] = characterizing_residual(metric, field, curve)
    T = float(run.get("T", 0.1))
    n = int(run.get("n_points", 128))
    dt = run.get("dt")
    d = rep.timed("flow", self_similarity_check, metric, field, field.lam, curve, T, n, dt)
    rep.distances["hausdorff"] = d
    rep.check("hausdorff", d, cfg.tolerances.get("distance", 5e-3))
    if run.get("refine", False):
        dt_fine = None if dt is None else dt / 4
        d2 = rep.timed("flow_refined", self_similarity_check, metric, field, field.lam, curve, T, 2 * n, dt_fine)
        rep.distances["hausdorff_refined"] = d2
        rep.check("refinement_ratio", d2 / d if d > 0 else 0.0, cfg.tolerances.get("refine_ratio", 0.5))


def _run_conformal(cfg, rep, out_dir):
    metric, fam_field = parse_metric(cfg.metric)
    field = parse_field(cfg.field, fam_field)
    tol = cfg.tolerances.get("defect", 1e-5)
    for eps in cfg.run.get("eps", [0.1, 0.2, 0.3]):
        dev = rep.timed(f"eps={eps:g}", conformal_factor_check, metric, field, field.lam, float(eps),
                        int(cfg.run.get("n", 8)))
        rep.residuals[f"defect_eps={eps:g}"] = dev
        rep.check(f"defect_eps={eps:g}", dev, tol)


_CANDIDATE_TABLES = {
    "flat-table": {k: {"tau": t, "xi": x, "eta": e, "expect": "pass"} for k, (t, x, e) in FLAT_TABLE.items()},
    "flat-non-symmetries": {k: {"tau": t, "xi": x, "eta": e, "expect": "fail"}
                            for k, (t, x, e) in FLAT_NON_SYMMETRIES.items()},
    "hyperbolic": {k: {"tau": t, "xi": x, "eta": e, "expect": "pass" if ok else "fail"}
                   for k, ((t, x, e), ok) in HYPERBOLIC_CANDIDATES.items()},
}


def _run_symmetry(cfg, rep, out_dir):
    metric, _ = parse_metric(cfg.metric)
    cands = cfg.run.get("candidates", "flat-table")
    if isinstance(cands, str):
        if cands not in _CANDIDATE_TABLES:
            raise ConfigError(f"unknown candidate table {cands!r}; choose from {sorted(_CANDIDATE_TABLES)}")
        cands = [dict(v, name=k) for k, v in _CANDIDATE_TABLES[cands].items()]
    pass_tol = cfg.tolerances.get("pass", PASS_TOL)
    fail_tol = cfg.tolerances.get("fail", FAIL_TOL)
    n_jets = int(cfg.run.get("n_jets", 100))
    for spec in cands:
        cand, expect = parse_candidate(spec)
        res = rep.timed(cand.name, prolongation_residual, metric, cand, n_jets, cfg.seed)
        det = determining_residuals(metric, cand)
        v = verdict(res, pass_tol, fail_tol).value
        dv = verdict(float(det.max()), pass_tol, fail_tol).value
        rep.residuals[cand.name] = res
        rep.verdicts.append({"field": cand.name, "residual_max": res, "verdict": v,
                             "determining": [float(x) for x in det], "determining_verdict": dv})
        rep.expect(f"{cand.name}:verdict", v, expect)
        rep.expect(f"{cand.name}:determining_agrees", dv, v)


def _run_affine(cfg, rep, out_dir):
    fams = cfg.run.get("families")
    if not fams:
        raise ConfigError("affine scenario needs run.families")
    scales = cfg.run.get("time_scales", [1.0])
    for spec in fams:
        spec = dict(spec)
        expect = spec.pop("expect", None)
        verdicts = []
        for c in scales:
            s = dict(spec)
            if "named" in s:
                s["time_scale"] = float(c) * float(s.get("time_scale", 1.0))
            elif c != 1.0:
                continue
            try:
                fam = AffineFamily.from_json(s)
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"bad affine family: {exc}") from None
            verdicts.append(classify_family(fam)[0].value)
        name = spec.get("named", spec.get("name", "sampled"))
        rep.verdicts.append({"family": name, "verdict": verdicts[0], "time_scales": list(scales),
                             "verdicts_rescaled": verdicts})
        if expect is not None:
            rep.expect(f"{name}:verdict", verdicts[0], expect)
        rep.expect(f"{name}:rescaling_invariant", len(set(verdicts)), 1)


_RUNNERS = {
    "soliton": _run_soliton,
    "flow": _run_flow,
    "self_similarity": _run_self_similarity,
    "conformal_factor": _run_conformal,
    "symmetry": _run_symmetry,
    "affine": _run_affine,
}


def run_scenario(cfg, out_dir=None) -> dict:
    """Run a scenario (config object, dict, JSON string or path) and return its report.

    With ``out_dir`` the report and any curve artifacts are written there.
    """
    if not isinstance(cfg, ScenarioConfig):
        cfg = ScenarioConfig.from_dict(cfg)
    rep = _Report(cfg)
    _RUNNERS[cfg.kind](cfg, rep, out_dir)
    report = rep.finish()
    path = _out_path(out_dir, f"{cfg.name}_report.json")
    if path:
        with open(path, "w") as fh:
            fh.write(report_to_json(report))
    return report


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def report_to_json(report) -> str:
    import json

    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def strip_runtimes(report) -> dict:
    """Copy of a report without its runtime entries (for determinism checks)."""
    r = copy.deepcopy(report)
    r["metrics"]["runtimes"] = {}
    return r


_SHRINKER_FIELD = {"components": ["-u", "-v"], "lambda": -1.0}
_TRANSLATOR_FIELD = {"components": ["0", "1"], "lambda": 0.0}

BUILTIN_SCENARIOS = {
    "flat-shrinker": {
        "kind": "self_similarity", "metric": "flat", "field": _SHRINKER_FIELD,
        "initial": {"u": 1.0, "v": 0.0, "w": 0.0, "z": 1.0, "arclength": 2 * math.pi},
        "run": {"T": 0.125, "n_points": 128, "dt": 4e-5, "refine": True},
        "tolerances": {"distance": 5e-3},
        "description": "unit circle soliton vs its dilation at T=0.125",
    },
    "flat-translator": {
        "kind": "self_similarity", "metric": "flat", "field": _TRANSLATOR_FIELD,
        "initial": {"u": 0.0, "v": 0.0, "w": 1.0, "z": 0.0, "arclength": 2.0, "both_ways": True},
        "run": {"T": 0.1, "n_points": 64, "refine": True},
        "tolerances": {"distance": 5e-3},
        "description": "grim reaper arc vs its translate at T=0.1",
    },
    "family-I_i-self-similarity": {
        "kind": "self_similarity", "metric": "I_i",
        "initial": {"u": 0.0, "v": 0.0, "angle": 0.0, "arclength": 3.0, "both_ways": True},
        "run": {"T": 0.05, "n_points": 64, "refine": True},
        "tolerances": {"distance": 1e-2},
        "description": "non-flat family soliton vs its group image at T=0.05",
    },
    "shrinking-circle": {
        "kind": "flow", "metric": "flat",
        "initial": {"circle": {"n": 256, "radius": 1.0}, "exact": {"radius": math.sqrt(0.5)}},
        "run": {"mode": "parametric", "T": 0.25, "dt": 1e-5, "record_every": 2500},
        "tolerances": {"radius": 1e-3},
    },
    "grim-reaper": {
        "kind": "flow", "metric": "flat-normal-gaussian",
        "initial": {"expr": "-log(cos(x))", "x0": -1.2, "x1": 1.2},
        "run": {"mode": "graph", "n": 512, "T": 0.1, "bc": "dirichlet", "exact": "t - log(cos(x))"},
        "tolerances": {"sup_error": 1e-3},
    },
    "symmetry-table-flat": {
        "kind": "symmetry", "metric": "flat-normal-gaussian", "run": {"candidates": "flat-table"},
    },
    "symmetry-non-symmetries-flat": {
        "kind": "symmetry", "metric": "flat-normal-gaussian", "run": {"candidates": "flat-non-symmetries"},
    },
    "symmetry-hyperbolic": {
        "kind": "symmetry", "metric": "hyperbolic", "run": {"candidates": "hyperbolic"},
    },
    "affine-closed-forms": {
        "kind": "affine",
        "run": {"families": [{"named": "shrinker", "expect": "SelfSimilar"},
                             {"named": "shear", "expect": "ShearGenerator"},
                             {"named": "rotation", "omega": 2.5, "expect": "SelfSimilar"},
                             {"named": "spiral", "expect": "SelfSimilar"}],
                "time_scales": [1.0, 0.1, 7.0]},
    },
}
for _fx in SOLITON_FIXTURES:
    BUILTIN_SCENARIOS[f"soliton-{_fx}"] = {"kind": "soliton", "metric": _fx,
                                            "tolerances": {"residual": 1e-6, "drift": 1e-8}}
    BUILTIN_SCENARIOS[f"conformal-factor-{_fx}"] = {"kind": "conformal_factor", "metric": _fx,
                                                     "run": {"eps": [0.1, 0.2, 0.3]},
                                                     "tolerances": {"defect": 1e-5}}


def get_builtin(name: str, seed: int = None) -> ScenarioConfig:
    if name not in BUILTIN_SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(BUILTIN_SCENARIOS)}")
    doc = dict(copy.deepcopy(BUILTIN_SCENARIOS[name]), name=name)
    if seed is not None:
        doc["seed"] = seed
    return ScenarioConfig.from_dict(doc)

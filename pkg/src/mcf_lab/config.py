"""Scenario configuration: parsing and validation of JSON run descriptions.

A scenario is a JSON object::

    {"name": "...", "kind": "soliton" | "flow" | "self_similarity" |
     "conformal_factor" | "symmetry" | "affine",
     "metric": {...}, "field": {...}, "initial": {...},
     "run": {...}, "tolerances": {...}, "seed": 0}

Unknown keys are rejected at every level and every tolerance must be
positive.  Metric specs take one of the forms ``{"fixture": "I_i"}``,
``{"family": {...}}``, ``{"flat": "isothermal"}``, ``{"hyperbolic": true}``,
``{"isothermal": "<rho(u,v)>", "domain": [[..],[..]]}`` or
``{"normal_gaussian": "<A(x,u)>", "domain": [[..],[..]]}``.
"""

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .errors import ConfigError, MCFLabError
from .families import FIXTURES, family_from_config, make_conformal_family
from .fields import Domain, ScalarField
from .geometry import (SurfaceMetric, VectorFieldSpec, flat_isothermal, flat_normal_gaussian,
                       hyperbolic_normal_gaussian)

__all__ = ["ScenarioConfig", "KINDS", "load_json", "parse_metric", "parse_field", "parse_candidate"]

KINDS = ("soliton", "flow", "self_similarity", "conformal_factor", "symmetry", "affine")

_TOP_KEYS = {"name", "kind", "metric", "field", "initial", "run", "tolerances", "seed", "description"}

_RUN_KEYS = {
    "soliton": {"arclength", "step", "project_every", "export"},
    "flow": {"mode", "T", "dt", "dx", "n", "resample_every", "bc", "exact", "record_every", "export"},
    "self_similarity": {"T", "n_points", "dt", "refine"},
    "conformal_factor": {"eps", "n"},
    "symmetry": {"candidates", "n_jets"},
    "affine": {"families", "time_scales"},
}
_TOL_KEYS = {
    "soliton": {"residual", "drift"},
    "flow": {"sup_error", "radius"},
    "self_similarity": {"distance", "refine_ratio"},
    "conformal_factor": {"defect"},
    "symmetry": {"pass", "fail"},
    "affine": set(),
}
_POSITIVE_RUN = {"arclength", "step", "T", "dt", "dx", "n", "n_points", "n_jets", "resample_every",
                 "record_every"}


def load_json(src):
    """A dict from a dict, a JSON string or a path to a JSON file."""
    if isinstance(src, dict):
        return src
    if isinstance(src, (str, Path)):
        text = str(src)
        if text.lstrip().startswith("{"):
            try:
                return json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON: {exc}") from None
        try:
            with open(text) as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {text!r}: {exc}") from None
    raise ConfigError(f"unsupported config source {type(src).__name__}")


def _check_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass
class ScenarioConfig:
    name: str
    kind: str
    metric: object = dc_field(default_factory=dict)
    field: dict = dc_field(default_factory=dict)
    initial: dict = dc_field(default_factory=dict)
    run: dict = dc_field(default_factory=dict)
    tolerances: dict = dc_field(default_factory=dict)
    seed: int = 0
    description: str = ""

    @classmethod
    def from_dict(cls, doc) -> "ScenarioConfig":
        doc = load_json(doc)
        if not isinstance(doc, dict):
            raise ConfigError("scenario config must be a JSON object")
        _check_keys(doc, _TOP_KEYS, "scenario")
        if doc.get("kind") not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {doc.get('kind')!r}")
        cfg = cls(name=str(doc.get("name", doc["kind"])), kind=doc["kind"],
                  metric=doc.get("metric", {}), field=dict(doc.get("field", {})),
                  initial=dict(doc.get("initial", {})), run=dict(doc.get("run", {})),
                  tolerances=dict(doc.get("tolerances", {})), seed=doc.get("seed", 0),
                  description=str(doc.get("description", "")))
        cfg.validate()
        return cfg

    def validate(self):
        if not isinstance(self.metric, (dict, str)):
            raise ConfigError("metric must be a name or a JSON object")
        _check_keys(self.run, _RUN_KEYS[self.kind], "run")
        _check_keys(self.tolerances, _TOL_KEYS[self.kind], "tolerances")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for k, v in self.tolerances.items():
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                raise ConfigError(f"tolerance {k!r} must be positive, got {v!r}")
        for k in _POSITIVE_RUN & set(self.run):
            v = self.run[k]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v) or v <= 0:
                raise ConfigError(f"run parameter {k!r} must be positive, got {v!r}")
        eps = self.run.get("eps")
        if eps is not None and (not isinstance(eps, list) or not all(isinstance(e, (int, float)) for e in eps)):
            raise ConfigError("run.eps must be a list of numbers")

    def to_dict(self):
        return {"name": self.name, "kind": self.kind, "metric": self.metric, "field": self.field,
                "initial": self.initial, "run": self.run, "tolerances": self.tolerances,
                "seed": self.seed, "description": self.description}


def _domain(spec, default):
    if "domain" not in spec:
        return default
    try:
        return Domain.from_list(spec["domain"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad domain {spec['domain']!r}: {exc}") from None


_SHORT_METRICS = {
    "flat": {"flat": "isothermal"},
    "flat-isothermal": {"flat": "isothermal"},
    "flat-normal-gaussian": {"flat": "normal_gaussian"},
    "hyperbolic": {"hyperbolic": True},
}


def parse_metric(spec):
    """Return ``(metric, family_field_or_None)`` from a metric spec.

    Besides JSON specs, the short names of the shipped fixtures and
    ``flat``, ``flat-normal-gaussian`` and ``hyperbolic`` are accepted.
    """
    if isinstance(spec, str) and spec in FIXTURES:
        spec = {"fixture": spec}
    elif isinstance(spec, str) and spec in _SHORT_METRICS:
        spec = _SHORT_METRICS[spec]
    spec = load_json(spec)
    forms = {"fixture", "family", "flat", "hyperbolic", "isothermal", "normal_gaussian"}
    chosen = forms & set(spec)
    if len(chosen) != 1:
        raise ConfigError(f"metric spec needs exactly one of {sorted(forms)}")
    _check_keys(spec, forms | {"domain"}, "metric")
    form = chosen.pop()
    try:
        if form == "fixture":
            if spec["fixture"] not in FIXTURES:
                raise ConfigError(f"unknown fixture {spec['fixture']!r}; choose from {sorted(FIXTURES)}")
            return make_conformal_family(FIXTURES[spec["fixture"]])
        if form == "family":
            return make_conformal_family(family_from_config(spec["family"]))
        if form == "flat":
            kind = spec["flat"]
            if kind in (True, "isothermal"):
                return flat_isothermal(_domain(spec, None)), None
            if kind == "normal_gaussian":
                return flat_normal_gaussian(_domain(spec, None)), None
            raise ConfigError("flat must be 'isothermal' or 'normal_gaussian'")
        if form == "hyperbolic":
            return hyperbolic_normal_gaussian(_domain(spec, None)), None
        dom = _domain(spec, Domain((-10.0, 10.0), (-10.0, 10.0)))
        if form == "isothermal":
            return SurfaceMetric.isothermal(ScalarField.from_expression(spec["isothermal"], ("u", "v")), dom), None
        return SurfaceMetric.normal_gaussian(ScalarField.from_expression(spec["normal_gaussian"], ("x", "u")),
                                             dom), None
    except ConfigError:
        raise
    except (MCFLabError, ValueError, TypeError, SyntaxError) as exc:
        raise ConfigError(f"bad metric spec: {exc}") from None


def parse_field(spec, default=None, variables=("u", "v")) -> VectorFieldSpec:
    """``{"components": ["-u", "-v"], "lambda": -1}``; empty spec falls back to ``default``."""
    spec = load_json(spec) if spec else {}
    if not spec:
        if default is None:
            raise ConfigError("a field spec is required")
        return default
    _check_keys(spec, {"components", "lambda", "name"}, "field")
    comps = spec.get("components")
    if not isinstance(comps, list) or len(comps) != 2:
        raise ConfigError("field.components must be a list of two expressions")
    try:
        return VectorFieldSpec.from_expressions(str(comps[0]), str(comps[1]), float(spec.get("lambda", 0.0)),
                                                variables, spec.get("name"))
    except (ValueError, TypeError, SyntaxError) as exc:
        raise ConfigError(f"bad field spec: {exc}") from None


def parse_candidate(spec):
    """``{"tau": "2*t", "xi": "x", "eta": "u", "expect": "pass"}`` to ``(candidate, expect)``."""
    from .symmetry import SymmetryCandidate

    spec = load_json(spec)
    _check_keys(spec, {"tau", "xi", "eta", "name", "expect", "lambda"}, "candidate")
    expect = spec.get("expect", "pass")
    if expect not in ("pass", "fail"):
        raise ConfigError("candidate expect must be 'pass' or 'fail'")
    try:
        cand = SymmetryCandidate.from_expressions(str(spec.get("tau", "0")), str(spec.get("xi", "0")),
                                                  str(spec.get("eta", "0")), spec.get("lambda"), spec.get("name"))
    except (ValueError, TypeError, SyntaxError) as exc:
        raise ConfigError(f"bad candidate: {exc}") from None
    return cand, expect

"""Closed-form conformal factors admitting homothetic fields ``L_X g = 2 lambda g``.

Metrics are isothermal, ``g = exp(2 rho)(du^2 + dv^2)``.  For a holomorphic-type
field ``X = phi d_u + psi d_v`` (``phi_u = psi_v``, ``phi_v = -psi_u``) the
homothety condition is the first-order linear PDE

    phi rho_u + psi rho_v = lambda - phi_u,

whose general solution is a particular solution plus ``Q(I)`` for any first
integral ``I`` of ``X``.  Four families are provided:

``I_i``    ``phi = c1, psi = c2``
``I_ii``   ``phi = a u + c1, psi = a v + c2``
``I_iii``  ``phi = b v + c1, psi = -b u + c2``
``II``     ``phi = u^2 - v^2, psi = 2 u v``
"""

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, ParamError
from .fields import Q_LIBRARY, Domain, OneVarFunction, ScalarField
from .geometry import SurfaceMetric, VectorFieldSpec

__all__ = [
    "CaseId",
    "ConformalFamily",
    "make_conformal_family",
    "family_from_config",
    "rational_log_case_ii_rho",
    "FIXTURES",
]


class CaseId(str, Enum):
    I_i = "I_i"
    I_ii = "I_ii"
    I_iii = "I_iii"
    II = "II"


@dataclass(frozen=True)
class ConformalFamily:
    """Parameters of one conformal-factor family.

    ``form`` selects between the two first-integral forms of case ``I_i``:
    ``"u"`` gives ``rho = (lambda/c1) u + Q(c2 u - c1 v)`` and ``"v"`` gives
    ``rho = (lambda/c2) v + Q(c2 u - c1 v)``.
    """

    case_id: CaseId
    lam: float = 1.0
    a: float = 0.0
    b: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    C: float = 1.0
    D: float = 0.0
    Q: OneVarFunction = field(default_factory=lambda: Q_LIBRARY["zero"])
    form: str = "u"
    domain: Domain = field(default_factory=lambda: Domain((-1.0, 1.0), (-1.0, 1.0)))

    def __post_init__(self):
        object.__setattr__(self, "case_id", CaseId(self.case_id))

    def validate(self):
        c = self.case_id
        if c is CaseId.I_i:
            if self.form not in ("u", "v"):
                raise ParamError(f"case I_i form must be 'u' or 'v', got {self.form!r}")
            if self.form == "u" and self.c1 == 0:
                raise ParamError("case I_i (u-form) requires c1 != 0")
            if self.form == "v" and self.c2 == 0:
                raise ParamError("case I_i (v-form) requires c2 != 0")
        elif c is CaseId.I_ii and self.a == 0:
            raise ParamError("case I_ii requires a != 0")
        elif c is CaseId.I_iii and self.b == 0:
            raise ParamError("case I_iii requires b != 0")
        elif c is CaseId.II and not self.C > 0:
            raise ParamError("case II requires C > 0")

    def singular_loci(self):
        c = self.case_id
        if c is CaseId.I_ii:
            return (("p", -self.c1 / self.a), ("q", -self.c2 / self.a))
        if c is CaseId.I_iii:
            return (("p", self.c2 / self.b), ("q", -self.c1 / self.b))
        if c is CaseId.II:
            return (("point", 0.0, 0.0), ("diag",))
        return ()


def _compose(Q: OneVarFunction, I):
    """Jet of ``Q(I(u, v))`` from the jet of ``I``."""
    f, fu, fv, fuu, fuv, fvv = I
    q0, q1, q2 = Q.f(f), Q.df(f), Q.d2f(f)
    return (q0, q1 * fu, q1 * fv,
            q2 * fu * fu + q1 * fuu, q2 * fu * fv + q1 * fuv, q2 * fv * fv + q1 * fvv)


def _add(j1, j2):
    return tuple(x + y for x, y in zip(j1, j2))


def _linear(cu, cv, c0=0.0):
    def jet(u, v):
        z = 0.0 * u * v
        return (cu * u + cv * v + c0 + z, cu + z, cv + z, z, z, z)
    return jet


def _rho_I_i(fam):
    lam, c1, c2 = fam.lam, fam.c1, fam.c2
    base = _linear(lam / c1, 0.0) if fam.form == "u" else _linear(0.0, lam / c2)
    first_integral = _linear(c2, -c1)

    def rho(u, v):
        return _add(base(u, v), _compose(fam.Q, first_integral(u, v)))
    return rho


def _rho_I_ii(fam):
    lam, a, c1, c2 = fam.lam, fam.a, fam.c1, fam.c2
    k = (lam - a) / a

    def rho(u, v):
        P = a * u + c1
        R = a * v + c2
        z = 0.0 * P * R
        base = (k * np.log(np.abs(P)) + z, k * a / P + z, z, -k * a * a / P**2 + z, z, z)
        I = np.abs(P) ** a * np.abs(R) ** (-a)
        I_jet = (I, a * a * I / P, -a * a * I / R,
                 a**3 * (a - 1) * I / P**2, -(a**4) * I / (P * R), a**3 * (a + 1) * I / R**2)
        return _add(base, _compose(fam.Q, I_jet))
    return rho


def _rho_I_iii(fam):
    lam, b, c1, c2 = fam.lam, fam.b, fam.c1, fam.c2

    def rho(u, v):
        P = b * v + c1
        R = b * u - c2
        S = P * P + R * R
        z = 0.0 * S
        th = np.arctan(P / R)
        th_u, th_v = -b * P / S, b * R / S
        th_uu = 2 * b * b * P * R / S**2
        th_vv = -th_uu
        th_uv = -b * b * (R * R - P * P) / S**2
        m = -lam / b
        base = (m * th, m * th_u, m * th_v, m * th_uu, m * th_uv, m * th_vv)
        I_jet = (S, 2 * b * R, 2 * b * P, 2 * b * b + z, z, 2 * b * b + z)
        return _add(base, _compose(fam.Q, I_jet))
    return rho


def _rho_II(fam):
    lam, D = fam.lam, fam.D

    def rho(u, v):
        r2 = u * u + v * v
        r4, r6 = r2 * r2, r2 * r2 * r2
        # -log(r^2)
        log_jet = (-np.log(r2), -2 * u / r2, -2 * v / r2,
                   -2 * (v * v - u * u) / r4, 4 * u * v / r4, -2 * (u * u - v * v) / r4)
        # -lambda * u / r^2  (real part of 1/w, harmonic)
        m_uu = (2 * u**3 - 6 * u * v * v) / r6
        m_jet = (u / r2, (v * v - u * u) / r4, -2 * u * v / r4,
                 m_uu, (6 * u * u * v - 2 * v**3) / r6, -m_uu)
        # first integral v / r^2
        n_uu = (6 * u * u * v - 2 * v**3) / r6
        n_jet = (v / r2, -2 * u * v / r4, (u * u - v * v) / r4,
                 n_uu, (6 * u * v * v - 2 * u**3) / r6, -n_uu)
        base = _add(log_jet, tuple(-lam * x for x in m_jet))
        base = (base[0] + D,) + base[1:]
        return _add(base, _compose(fam.Q, n_jet))
    return rho


def rational_log_case_ii_rho(u, v, lam, C, D=0.0):
    """Closed form ``4 lam/(C(z+1)) + 4 ln((z+1)^2/(z^2+1)) + D`` with ``z = (u+v)/(v-u)``.

    Kept for reference only.  As a function on the plane it does *not* solve
    ``phi rho_u + psi rho_v = lambda - 2u``; :func:`make_conformal_family`
    uses the general solution instead.
    """
    z = (u + v) / (v - u)
    return 4 * lam / (C * (z + 1)) + 4 * np.log((z + 1) ** 2 / (z * z + 1)) + D


def _field(fam) -> VectorFieldSpec:
    c = fam.case_id
    if c is CaseId.II:
        phi = ScalarField(lambda u, v: (u * u - v * v, 2 * u, -2 * v, 2.0, 0.0, -2.0), "u^2-v^2")
        psi = ScalarField(lambda u, v: (2 * u * v, 2 * v, 2 * u, 0.0, 2.0, 0.0), "2uv")
        return VectorFieldSpec(phi, psi, fam.lam, "(u^2-v^2)d_u + 2uv d_v")
    a, b = (fam.a, 0.0) if c is CaseId.I_ii else (0.0, fam.b) if c is CaseId.I_iii else (0.0, 0.0)
    c1, c2 = fam.c1, fam.c2
    phi = ScalarField(lambda u, v: (a * u + b * v + c1, a, b, 0.0, 0.0, 0.0), "au+bv+c1")
    psi = ScalarField(lambda u, v: (-b * u + a * v + c2, -b, a, 0.0, 0.0, 0.0), "-bu+av+c2")
    return VectorFieldSpec(phi, psi, fam.lam, f"({a:g}u+{b:g}v+{c1:g})d_u + ({-b:g}u+{a:g}v+{c2:g})d_v")


_RHO_BUILDERS = {CaseId.I_i: _rho_I_i, CaseId.I_ii: _rho_I_ii, CaseId.I_iii: _rho_I_iii, CaseId.II: _rho_II}


def make_conformal_family(spec: ConformalFamily, margin: float = None):
    """Build the isothermal metric and homothetic field of a family.

    Returns
    -------
    metric : SurfaceMetric
    field : VectorFieldSpec
        Satisfies ``L_X g = 2 lambda g`` on the domain.

    Raises
    ------
    ParamError
        Degenerate parameters.
    SingularDomainError
        The domain touches a singular locus (within ``margin``).
    """
    spec.validate()
    margin = spec.domain.margin if margin is None else margin
    domain = Domain(spec.domain.p_range, spec.domain.q_range, spec.singular_loci(), margin)
    domain.check_clear_of_singular()
    rho = ScalarField(_RHO_BUILDERS[spec.case_id](spec), f"rho[{spec.case_id.value}]")
    metric = SurfaceMetric.isothermal(rho, domain, f"family {spec.case_id.value}")
    return metric, _field(spec)


_CONFIG_KEYS = {"case", "lambda", "a", "b", "c1", "c2", "C", "D", "Q", "form", "domain", "margin"}


def family_from_config(cfg) -> ConformalFamily:
    """Parse ``{"case": "I_i", "lambda": 1.0, "c1": 1.0, ..., "domain": [[u0,u1],[v0,v1]]}``.

    ``cfg`` may be a dict, a JSON string, or a path to a JSON file.
    """
    if isinstance(cfg, str):
        cfg = json.loads(cfg) if cfg.lstrip().startswith("{") else json.load(open(cfg))
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown family keys: {sorted(unknown)}")
    if "case" not in cfg:
        raise ConfigError("family config needs 'case'")
    q_name = cfg.get("Q", "zero")
    if q_name not in Q_LIBRARY:
        raise ConfigError(f"unknown Q {q_name!r}; choose from {sorted(Q_LIBRARY)}")
    try:
        case = CaseId(cfg["case"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    domain = Domain.from_list(cfg.get("domain", [[-1, 1], [-1, 1]]), margin=float(cfg.get("margin", 1e-3)))
    return ConformalFamily(case, lam=float(cfg.get("lambda", 1.0)), a=float(cfg.get("a", 0.0)),
                           b=float(cfg.get("b", 0.0)), c1=float(cfg.get("c1", 0.0)),
                           c2=float(cfg.get("c2", 0.0)), C=float(cfg.get("C", 1.0)),
                           D=float(cfg.get("D", 0.0)), Q=Q_LIBRARY[q_name],
                           form=cfg.get("form", "u"), domain=domain)


# Shipped fixtures.  Domains avoid the singular loci with room to spare.
FIXTURES = {
    "I_i": ConformalFamily(CaseId.I_i, lam=1.0, c1=0.0, c2=1.0, Q=Q_LIBRARY["quadratic"], form="v",
                           domain=Domain((-2.0, 2.0), (-2.0, 2.0))),
    "I_ii": ConformalFamily(CaseId.I_ii, lam=2.0, a=1.0, c1=0.0, c2=0.0, Q=Q_LIBRARY["quadratic"],
                            domain=Domain((0.5, 2.5), (0.5, 2.5))),
    "I_iii": ConformalFamily(CaseId.I_iii, lam=1.0, b=1.0, c1=0.0, c2=0.0, Q=Q_LIBRARY["quadratic"],
                             domain=Domain((0.5, 1.5), (0.5, 1.5))),
    "II": ConformalFamily(CaseId.II, lam=1.0, C=1.0, D=0.0, Q=Q_LIBRARY["quadratic"],
                          domain=Domain((-0.5, 0.5), (0.6, 1.6))),
}

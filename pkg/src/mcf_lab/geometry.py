"""Surface metrics, geodesic curvature, conformal fields and Lie-derivative residuals.

Two metric forms are supported:

* normal Gaussian ``A(x, u) dx^2 + du^2`` (graph flow, symmetry analysis), and
* isothermal ``exp(2 rho(u, v)) (du^2 + dv^2)`` (solitons, parametric flow).

Orientation conventions are fixed: a graph ``u(x)`` carries the unit normal
``(-u_x d_x + A d_u) / (sqrt(A) L)`` with ``L^2 = A + u_x^2``, and a
parametric curve carries the left-ward normal ``-v' d_u + u' d_v``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import MetricError, SpeedError
from .fields import Domain, Jet2, ScalarField

__all__ = [
    "MetricForm",
    "SurfaceMetric",
    "VectorFieldSpec",
    "geodesic_curvature_graph",
    "geodesic_curvature_parametric",
    "lie_derivative_residual",
    "gauss_curvature",
    "flat_isothermal",
    "flat_normal_gaussian",
    "hyperbolic_normal_gaussian",
]


class MetricForm(str, Enum):
    NORMAL_GAUSSIAN = "normal_gaussian"
    ISOTHERMAL = "isothermal"


@dataclass(frozen=True)
class SurfaceMetric:
    """A 2-D Riemannian metric on a rectangular coordinate patch.

    ``scalar`` is ``A(x, u)`` for :attr:`MetricForm.NORMAL_GAUSSIAN` and
    ``rho(u, v)`` for :attr:`MetricForm.ISOTHERMAL`.
    """

    form: MetricForm
    scalar: ScalarField
    domain: Domain
    name: str = "metric"

    @classmethod
    def normal_gaussian(cls, A: ScalarField, domain: Domain, name="normal_gaussian"):
        return cls(MetricForm.NORMAL_GAUSSIAN, A, domain, name)

    @classmethod
    def isothermal(cls, rho: ScalarField, domain: Domain, name="isothermal"):
        return cls(MetricForm.ISOTHERMAL, rho, domain, name)

    @property
    def is_isothermal(self):
        return self.form is MetricForm.ISOTHERMAL

    def jet(self, p, q, check: bool = True) -> Jet2:
        """Scalar (``A`` or ``rho``) and partials at ``(p, q)``."""
        if check:
            self.domain.check(p, q)
        j = self.scalar(p, q)
        if self.form is MetricForm.NORMAL_GAUSSIAN and np.any(np.asarray(j.f) <= 0):
            raise MetricError(f"A <= 0 in metric {self.name}")
        return j

    def tensor(self, p, q, check: bool = True):
        """Components ``(g11, g12, g22)``."""
        j = self.jet(p, q, check)
        if self.is_isothermal:
            e2 = np.exp(2 * j.f)
            return e2, 0.0 * e2, e2
        return j.f, 0.0 * j.f, 1.0 + 0.0 * j.f

    def validate(self, n: int = 20) -> None:
        """Check positivity of ``A`` on an ``n x n`` grid (normal Gaussian only)."""
        pts = self.domain.grid(n)
        self.jet(pts[:, 0], pts[:, 1])


@dataclass(frozen=True)
class VectorFieldSpec:
    """A vector field ``first * d_p + second * d_q`` with homothety constant.

    In isothermal charts the components are ``(phi, psi)``; in normal
    Gaussian charts they are ``(xi, eta)``.
    """

    first: ScalarField
    second: ScalarField
    lam: float = 0.0
    name: str = "X"

    phi = property(lambda self: self.first)
    psi = property(lambda self: self.second)
    xi = property(lambda self: self.first)
    eta = property(lambda self: self.second)

    @classmethod
    def from_expressions(cls, first: str, second: str, lam: float = 0.0,
                         variables=("u", "v"), name=None):
        return cls(ScalarField.from_expression(first, variables),
                   ScalarField.from_expression(second, variables), float(lam),
                   name or f"({first})d_{variables[0]} + ({second})d_{variables[1]}")

    def __call__(self, p, q):
        """Component values ``(X^p, X^q)``."""
        return self.first.value(p, q), self.second.value(p, q)


def flat_isothermal(domain=None) -> SurfaceMetric:
    domain = domain or Domain((-10.0, 10.0), (-10.0, 10.0))
    return SurfaceMetric.isothermal(ScalarField.constant(0.0, "rho=0"), domain, "flat")


def flat_normal_gaussian(domain=None) -> SurfaceMetric:
    domain = domain or Domain((-10.0, 10.0), (-10.0, 10.0))
    return SurfaceMetric.normal_gaussian(ScalarField.constant(1.0, "A=1"), domain, "flat")


def hyperbolic_normal_gaussian(domain=None) -> SurfaceMetric:
    """``exp(-2u) dx^2 + du^2``, the hyperbolic plane with ``y = exp(u)``."""
    domain = domain or Domain((-3.0, 3.0), (-2.0, 2.0))

    def A(x, u):
        e = np.exp(-2.0 * np.asarray(u, dtype=float)) + 0.0 * np.asarray(x, dtype=float)
        return e, 0.0 * e, -2.0 * e, 0.0 * e, 0.0 * e, 4.0 * e

    return SurfaceMetric.normal_gaussian(ScalarField(A, "A=exp(-2u)"), domain, "hyperbolic")


def geodesic_curvature_graph(metric: SurfaceMetric, x, u, u_x, u_xx):
    """Geodesic curvature of the graph ``u(x)`` in ``A dx^2 + du^2``.

    ``k = sqrt(A)/L^3 * (u_xx - (A_u/A) u_x^2 - (A_x/2A) u_x - A_u/2)``.
    """
    if metric.is_isothermal:
        raise MetricError("graph curvature needs a normal Gaussian metric")
    j = metric.jet(x, u)
    A, Ax, Au = j.f, j.fp, j.fq
    u_x = np.asarray(u_x, dtype=float)
    L2 = A + u_x * u_x
    bracket = u_xx - (Au / A) * u_x**2 - (Ax / (2 * A)) * u_x - 0.5 * Au
    return np.sqrt(A) / L2**1.5 * bracket


def geodesic_acceleration(rho_jet: Jet2, up, vp, upp, vpp):
    """Covariant acceleration ``(f1, f2)`` of a curve in an isothermal chart."""
    ru, rv = rho_jet.fp, rho_jet.fq
    f1 = upp + (up * up - vp * vp) * ru + 2 * up * vp * rv
    f2 = vpp - (up * up - vp * vp) * rv + 2 * up * vp * ru
    return f1, f2


def geodesic_curvature_parametric(metric: SurfaceMetric, state, speed_tol: float = 1e-6):
    """Geodesic curvature of a unit-speed curve w.r.t. the left-ward normal.

    Parameters
    ----------
    metric : SurfaceMetric
        Isothermal metric.
    state : sequence
        ``(u, v, u', v', u'', v'')`` with derivatives in metric arclength.
    speed_tol : float
        Allowed deviation of ``u'^2 + v'^2`` from ``exp(-2 rho)``.

    Returns
    -------
    k_g : float or ndarray
        ``exp(2 rho) * (-v' f1 + u' f2)``.
    """
    if not metric.is_isothermal:
        raise MetricError("parametric curvature needs an isothermal metric")
    u, v, up, vp, upp, vpp = (np.asarray(s, dtype=float) for s in state)
    j = metric.jet(u, v)
    e2 = np.exp(2 * j.f)
    defect = np.abs(up * up + vp * vp - 1.0 / e2)
    if np.any(defect > speed_tol * np.maximum(1.0, 1.0 / e2)):
        raise SpeedError(f"unit-speed constraint violated by {float(np.max(defect)):.3e}")
    f1, f2 = geodesic_acceleration(j, up, vp, upp, vpp)
    return e2 * (-vp * f1 + up * f2)


def lie_derivative_residual(metric: SurfaceMetric, field: VectorFieldSpec, points=None, n: int = 20):
    """Componentwise ``L_X g - 2 lambda g`` at sample points.

    Parameters
    ----------
    points : (N, 2) array, optional
        Evaluation points; defaults to an ``n x n`` grid on the metric domain.

    Returns
    -------
    residual : (N, 2, 2) ndarray
    max_norm : float
        Largest absolute entry.
    """
    if points is None:
        points = metric.domain.grid(n)
    points = np.asarray(points, dtype=float)
    p, q = points[:, 0], points[:, 1]
    s = metric.jet(p, q)
    X1, X2 = field.first(p, q), field.second(p, q)
    lam = field.lam
    res = np.empty((len(p), 2, 2))
    if metric.is_isothermal:
        e2 = np.exp(2 * s.f)
        drift = X1.f * s.fp + X2.f * s.fq
        res[:, 0, 0] = 2 * e2 * (X1.fp + drift - lam)
        res[:, 1, 1] = 2 * e2 * (X2.fq + drift - lam)
        res[:, 0, 1] = res[:, 1, 0] = e2 * (X1.fq + X2.fp)
    else:
        A, Ax, Au = s.f, s.fp, s.fq
        res[:, 0, 0] = 2 * A * X1.fp + Ax * X1.f + Au * X2.f - 2 * A * lam
        res[:, 0, 1] = res[:, 1, 0] = A * X1.fq + X2.fp
        res[:, 1, 1] = 2 * X2.fq - 2 * lam
    return res, float(np.max(np.abs(res))) if len(res) else 0.0


def gauss_curvature(metric: SurfaceMetric, u, v):
    """``K = -exp(-2 rho) (rho_uu + rho_vv)`` for an isothermal metric."""
    if not metric.is_isothermal:
        raise MetricError("gauss_curvature is implemented for isothermal metrics")
    j = metric.jet(u, v)
    return -np.exp(-2 * j.f) * (j.fpp + j.fqq)

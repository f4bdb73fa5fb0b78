"""Numeric jet-space checks of point symmetries of the graph curve-shortening flow.

For a normal Gaussian metric ``A(x, u) dx^2 + du^2`` the flow of a graph
``u(x, t)`` is the pair

    Phi1 = L^2 u_t - u_xx + (A_u/A) u_x^2 + (A_x/2A) u_x + A_u/2 = 0,
    Phi2 = u_x u_xt + L^2 k^2 = 0,          L^2 = A + u_x^2.

A vector field ``v = tau d_t + xi d_x + eta d_u`` is an infinitesimal symmetry
iff its second prolongation annihilates ``Phi1`` on the solution manifold.
This module evaluates that condition at sampled jets, the equivalent
determining equations on a grid, and the reduced homothety system.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np
import sympy as sp

from .errors import ManifoldError, MetricError
from .geometry import SurfaceMetric, VectorFieldSpec, geodesic_curvature_graph

__all__ = [
    "JetPoint", "TXUJet", "SymmetryCandidate", "Verdict", "phi1", "phi2", "prolongation_coeffs",
    "apply_prolongation", "sample_manifold_jets", "prolongation_residual", "determining_residuals",
    "homothetic_system_residual", "verdict", "verify_symmetry", "FLAT_TABLE", "FLAT_NON_SYMMETRIES",
    "HYPERBOLIC_CANDIDATES", "PASS_TOL", "FAIL_TOL",
]

PASS_TOL = 1e-8
FAIL_TOL = 1e-2


@dataclass(frozen=True)
class JetPoint:
    x: float
    t: float
    u: float
    u_x: float
    u_t: float
    u_xx: float
    u_xt: float
    u_tt: float = 0.0
    on_solution_manifold: bool = False


class TXUJet(NamedTuple):
    """A function of ``(t, x, u)`` with all partials up to order two."""
    f: float
    t: float
    x: float
    u: float
    tt: float
    tx: float
    tu: float
    xx: float
    xu: float
    uu: float


_T, _X, _U = sp.symbols("t x u")
_ORDERS = [(), (_T,), (_X,), (_U,), (_T, _T), (_T, _X), (_T, _U), (_X, _X), (_X, _U), (_U, _U)]


def _compile(expr) -> Callable:
    expr = sp.sympify(expr, locals={"t": _T, "x": _X, "u": _U})
    unknown = expr.free_symbols - {_T, _X, _U}
    if unknown:
        raise ValueError(f"unknown symbols {sorted(map(str, unknown))} in {expr}")
    parts = [sp.diff(expr, *o) if o else expr for o in _ORDERS]
    fn = sp.lambdify((_T, _X, _U), parts, "numpy")

    def jet(t, x, u):
        t, x, u = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, x, u)))
        return TXUJet(*(np.asarray(v, dtype=float) + 0.0 * t for v in fn(t, x, u)))
    return jet


def _from_scalar_field(field):
    def jet(t, x, u):
        j = field(x, u)
        z = 0.0 * np.asarray(t, dtype=float) + 0.0 * j.f
        return TXUJet(j.f + z, z, j.fp + z, j.fq + z, z, z, z, j.fpp + z, j.fpq + z, j.fqq + z)
    return jet


@dataclass(frozen=True)
class SymmetryCandidate:
    """``v = tau d_t + xi d_x + eta d_u``; each component maps ``(t, x, u)`` to a :class:`TXUJet`."""

    tau: Callable
    xi: Callable
    eta: Callable
    lam: Optional[float] = None
    name: str = "v"

    @classmethod
    def from_expressions(cls, tau="0", xi="0", eta="0", lam=None, name=None):
        """Build from sympy-parsable strings in ``t, x, u``."""
        return cls(_compile(tau), _compile(xi), _compile(eta), lam,
                   name or f"({tau})d_t + ({xi})d_x + ({eta})d_u")

    @classmethod
    def from_field(cls, field: VectorFieldSpec, c1: float = 0.0, name=None):
        """``X + (2 lam t + c1) d_t`` for a field ``X = xi d_x + eta d_u`` with constant ``lam``."""
        lam = float(field.lam)
        return cls(_compile(f"{2 * lam!r}*t + {float(c1)!r}"), _from_scalar_field(field.xi),
                   _from_scalar_field(field.eta), lam, name or f"{field.name} + ({2 * lam:g}t+{c1:g})d_t")

    def __call__(self, t, x, u):
        return self.tau(t, x, u), self.xi(t, x, u), self.eta(t, x, u)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


def verdict(residual: float, pass_tol: float = PASS_TOL, fail_tol: float = FAIL_TOL) -> Verdict:
    """Classify a residual with a dead zone between ``pass_tol`` and ``fail_tol``."""
    if residual <= pass_tol:
        return Verdict.PASS
    if residual >= fail_tol:
        return Verdict.FAIL
    return Verdict.INDETERMINATE


def _metric_terms(metric, x, u):
    if metric.is_isothermal:
        raise MetricError("symmetry checks need a normal Gaussian metric")
    return metric.jet(x, u)


def phi1(metric: SurfaceMetric, jet: JetPoint):
    j = _metric_terms(metric, jet.x, jet.u)
    A, Ax, Au = j.f, j.fp, j.fq
    L2 = A + jet.u_x ** 2
    return L2 * jet.u_t - jet.u_xx + (Au / A) * jet.u_x ** 2 + (Ax / (2 * A)) * jet.u_x + 0.5 * Au


def phi2(metric: SurfaceMetric, jet: JetPoint):
    j = _metric_terms(metric, jet.x, jet.u)
    L2 = j.f + jet.u_x ** 2
    k = geodesic_curvature_graph(metric, jet.x, jet.u, jet.u_x, jet.u_xx)
    return jet.u_x * jet.u_xt + L2 * k * k


def prolongation_coeffs(cand: SymmetryCandidate, jet: JetPoint):
    """``(phi^x, phi^t, phi^xx, phi^xt)`` of the second prolongation."""
    tau, xi, eta = cand(jet.t, jet.x, jet.u)
    ux, ut, uxx, uxt, utt = jet.u_x, jet.u_t, jet.u_xx, jet.u_xt, jet.u_tt
    px = eta.x + (eta.u - xi.x) * ux - tau.x * ut - xi.u * ux ** 2 - tau.u * ux * ut
    pt = eta.t - xi.t * ux + (eta.u - tau.t) * ut - xi.u * ux * ut - tau.u * ut ** 2
    pxx = (eta.xx + 2 * eta.xu * ux - xi.xx * ux - tau.xx * ut + eta.uu * ux ** 2
           - 2 * xi.xu * ux ** 2 - 2 * tau.xu * ux * ut - xi.uu * ux ** 3
           - tau.uu * ux ** 2 * ut + eta.u * uxx - 2 * xi.x * uxx - 2 * tau.x * uxt
           - 3 * xi.u * ux * uxx - tau.u * ut * uxx - 2 * tau.u * ux * uxt)
    pxt = (eta.tx + eta.tu * ux + eta.xu * ut - xi.tx * ux - tau.tx * ut + eta.uu * ux * ut
           - xi.tu * ux ** 2 - xi.xu * ut * ux
           - tau.tu * ux * ut + eta.u * uxt - xi.t * uxx - xi.x * uxt - tau.t * uxt - xi.uu * ut * ux ** 2
           - tau.xu * ut ** 2
           - 2 * xi.u * uxt * ux - xi.u * ut * uxx - tau.uu * ux * ut ** 2 - 2 * tau.u * ut * uxt
           - tau.x * utt - tau.u * ux * utt)
    return px, pt, pxx, pxt


def _manifold_scale(metric, jet):
    j = _metric_terms(metric, jet.x, jet.u)
    return max(1.0, abs(j.f * jet.u_t), abs(jet.u_xx), abs(jet.u_x * jet.u_xt))


def apply_prolongation(metric: SurfaceMetric, cand: SymmetryCandidate, jet: JetPoint,
                       manifold_tol: float = 1e-10) -> float:
    """``pr v [Phi1]`` at a jet on the solution manifold.

    Raises
    ------
    ManifoldError
        ``Phi1 != 0``, or ``Phi2 != 0`` with ``|u_x| >= 0.1`` (relative ``manifold_tol``).
    """
    scale = _manifold_scale(metric, jet)
    if abs(phi1(metric, jet)) > manifold_tol * scale:
        raise ManifoldError(f"Phi1 = {float(phi1(metric, jet)):.3e} at jet {jet}")
    if abs(jet.u_x) >= 0.1 and abs(phi2(metric, jet)) > manifold_tol * scale:
        raise ManifoldError(f"Phi2 = {float(phi2(metric, jet)):.3e} at jet {jet}")
    j = _metric_terms(metric, jet.x, jet.u)
    A, Ax, Au, Axx, Axu, Auu = j
    ux, ut = jet.u_x, jet.u_t
    # quotients and their partials
    q_u, q_x = Au / A, Ax / (2 * A)
    q_u_x = Axu / A - Au * Ax / A ** 2
    q_u_u = Auu / A - Au * Au / A ** 2
    q_x_x = 0.5 * (Axx / A - Ax * Ax / A ** 2)
    q_x_u = 0.5 * (Axu / A - Ax * Au / A ** 2)
    d_x = Ax * ut + q_u_x * ux ** 2 + q_x_x * ux + 0.5 * Axu
    d_u = Au * ut + q_u_u * ux ** 2 + q_x_u * ux + 0.5 * Auu
    d_ux = 2 * ux * ut + 2 * q_u * ux + q_x
    d_ut = A + ux * ux
    d_uxx = -1.0
    tau, xi, eta = cand(jet.t, jet.x, jet.u)
    px, pt, pxx, _ = prolongation_coeffs(cand, jet)
    return float(xi.f * d_x + eta.f * d_u + px * d_ux + pt * d_ut + pxx * d_uxx)


def sample_manifold_jets(metric: SurfaceMetric, n: int, rng=None, t_range=(0.0, 1.0)):
    """Random jets on the solution manifold.

    ``x, u`` are uniform on the metric domain, ``|u_x|`` uniform on
    ``[0.1, 2]`` with random sign, ``u_xx`` on ``[-2, 2]`` and ``u_tt`` on
    ``[-1, 1]``; ``u_t`` and ``u_xt`` then solve ``Phi1 = 0`` and ``Phi2 = 0``.
    """
    rng = np.random.default_rng(rng)
    pts = metric.domain.sample(n, rng)
    t = rng.uniform(*t_range, n)
    ux = rng.uniform(0.1, 2.0, n) * rng.choice([-1.0, 1.0], n)
    uxx = rng.uniform(-2.0, 2.0, n)
    utt = rng.uniform(-1.0, 1.0, n)
    j = _metric_terms(metric, pts[:, 0], pts[:, 1])
    A, Ax, Au = (np.broadcast_to(a, t.shape) for a in (j.f, j.fp, j.fq))
    L2 = A + ux * ux
    ut = (uxx - (Au / A) * ux ** 2 - (Ax / (2 * A)) * ux - 0.5 * Au) / L2
    k = geodesic_curvature_graph(metric, pts[:, 0], pts[:, 1], ux, uxx)
    uxt = -L2 * k * k / ux
    return [JetPoint(float(pts[i, 0]), float(t[i]), float(pts[i, 1]), float(ux[i]), float(ut[i]),
                     float(uxx[i]), float(uxt[i]), float(utt[i]), True) for i in range(n)]


def prolongation_residual(metric: SurfaceMetric, cand: SymmetryCandidate, n_jets: int = 100,
                          seed: int = 0) -> float:
    """Largest ``|pr v [Phi1]|`` over ``n_jets`` random manifold jets."""
    jets = sample_manifold_jets(metric, n_jets, seed)
    return max(abs(apply_prolongation(metric, cand, j)) for j in jets)


def _grid_eval(metric, cand, n, times):
    pts = metric.domain.grid(n)
    x = np.tile(pts[:, 0], len(times))
    u = np.tile(pts[:, 1], len(times))
    t = np.repeat(np.asarray(times, dtype=float), len(pts))
    j = _metric_terms(metric, x, u)
    A, Ax, Au, Axx, Axu, Auu = (np.broadcast_to(a, x.shape) for a in j)
    return (A, Ax, Au, Axx, Axu, Auu), cand(t, x, u)


def determining_residuals(metric: SurfaceMetric, cand: SymmetryCandidate, n: int = 20,
                          times=(0.0, 0.5, 1.0)):
    """Max-norms of the eight determining equations over an ``n x n`` grid.

    The grid is repeated at each of ``times``.  The last entry encodes the
    constraint ``tau = tau(t)`` as ``max(|tau_x| + |tau_u|)``.
    """
    (A, Ax, Au, Axx, Axu, Auu), (tau, xi, eta) = _grid_eval(metric, cand, n, times)
    qu, qx = Au / A, Ax / A
    qu_u = Auu / A - Au * Au / A ** 2
    qu_x = Axu / A - Au * Ax / A ** 2
    qx_u = Axu / A - Ax * Au / A ** 2
    qx_x = Axx / A - Ax * Ax / A ** 2
    eqs = [
        2 * A * xi.x + Ax * xi.f + Au * eta.f - A * tau.t,
        A * xi.u + eta.x,
        2 * eta.u - tau.t,
        Au * xi.u + A * xi.uu - A * xi.t,
        qu_u * eta.f + qu_x * xi.f + qx * xi.u + 2 * xi.xu + eta.t + qu * eta.u,
        qx_u * eta.f + qx_x * xi.f - 2 * A * xi.t + qu * eta.x + qx * xi.x + 2 * xi.xx,
        Auu * eta.f + Axu * xi.f + 2 * Au * xi.x + 2 * A * eta.t - Au * eta.u + qx * eta.x - 2 * eta.xx,
        np.abs(tau.x) + np.abs(tau.u),
    ]
    return np.array([float(np.max(np.abs(e))) for e in eqs])


def homothetic_system_residual(metric: SurfaceMetric, cand: SymmetryCandidate, lam: float,
                               n: int = 20, t: float = 0.0):
    """Max-norms of ``2A xi_x + A_x xi + A_u eta - 2A lam``, ``A xi_u + eta_x``, ``eta_u - lam``."""
    (A, Ax, Au, *_), (_, xi, eta) = _grid_eval(metric, cand, n, (t,))
    eqs = [2 * A * xi.x + Ax * xi.f + Au * eta.f - 2 * A * lam, A * xi.u + eta.x, eta.u - lam]
    return np.array([float(np.max(np.abs(e))) for e in eqs])


def verify_symmetry(metric: SurfaceMetric, cand: SymmetryCandidate, n_jets: int = 100, seed: int = 0) -> dict:
    """Report ``{field, residual_max, verdict, determining}`` for one candidate."""
    res = prolongation_residual(metric, cand, n_jets, seed)
    det = determining_residuals(metric, cand)
    return {"field": cand.name, "residual_max": res, "verdict": verdict(res).value,
            "determining": [float(d) for d in det], "determining_verdict": verdict(float(det.max())).value}


# (tau, xi, eta) for the flat plane
FLAT_TABLE = {
    "time_translation": ("1", "0", "0"),
    "x_translation": ("0", "1", "0"),
    "u_translation": ("0", "0", "1"),
    "rotation": ("0", "-u", "x"),
    "parabolic_rescaling": ("2*t", "x", "u"),
}
FLAT_NON_SYMMETRIES = {
    "x2_dx": ("0", "x**2", "0"),
    "u_dx": ("0", "u", "0"),
}
# A = exp(-2u): the upper half-plane model with y = exp(u)
HYPERBOLIC_CANDIDATES = {
    "x_translation": (("0", "1", "0"), True),
    "hyperbolic_dilation": (("0", "x", "1"), True),
    "hyperbolic_inversion": (("0", "(x**2 - exp(2*u))/2", "x"), True),
    "flat_rescaling": (("2*t", "x", "u"), False),
}

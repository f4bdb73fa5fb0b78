"""Curve-shortening flow on surfaces, homothetic group flows and self-similarity.

Two discretisations are provided:

* the graph form ``u_t = (1/L^2)(u_xx - (A_u/A) u_x^2 - (A_x/2A) u_x - A_u/2)``
  for a normal Gaussian metric ``A dx^2 + du^2`` (explicit Euler in time,
  central differences in space);
* front tracking of a polyline in an isothermal chart, each vertex moving
  with velocity ``k_g nu`` and periodic reparametrisation by arclength.
"""

import math
from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import kernels
from .curves import Curve, CurveParam, hausdorff_distance, resample
from .errors import (BlowUp, CFLViolation, CollapseError, DomainExit,
                     SelfIntersection, TooFewTimeLevels)
from .geometry import SurfaceMetric, VectorFieldSpec, geodesic_curvature_graph
from .fields import Domain

__all__ = [
    "BoundaryKind", "BoundaryCondition", "GraphSolution", "graph_flow_step", "run_graph_flow",
    "metric_evolution_residual", "parametric_flow_step", "run_parametric_flow", "GroupFlow",
    "flow_conformal_field", "map_curve", "conformal_factor_check", "self_similarity_time",
    "self_similarity_check", "isoperimetric_ratio",
]

BLOWUP_SLOPE = 1e6


# ---------------------------------------------------------------------------
# graph flow

class BoundaryKind(str, Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet data ``exact(x, t)`` at both grid ends, or periodicity."""

    kind: BoundaryKind
    exact: Optional[Callable] = None

    @classmethod
    def dirichlet(cls, exact: Callable = None, left: float = 0.0, right: float = 0.0):
        if exact is None:
            exact = lambda x, t: np.where(np.asarray(x) <= 0.5 * (np.min(x) + np.max(x)), left, right)  # noqa: E731
        return cls(BoundaryKind.DIRICHLET, exact)

    @classmethod
    def periodic(cls):
        return cls(BoundaryKind.PERIODIC)


@dataclass(frozen=True, eq=False)
class GraphSolution:
    """State of a graph-flow run.

    ``x`` holds the grid (both end nodes for Dirichlet, the left end only for
    periodic grids) and ``u`` the current values.  ``levels`` keeps the most
    recent ``(t, u)`` pairs, oldest first, for time differencing.
    """

    x: np.ndarray
    u: np.ndarray
    t: float
    dt: float
    dx: float
    bc: BoundaryCondition
    levels: tuple = dc_field(default=())
    keep: int = 3

    @classmethod
    def initial(cls, x0: float, x1: float, n: int, u0: Callable, dt: float,
                bc: BoundaryCondition, keep: int = 3) -> "GraphSolution":
        """Grid of ``n`` cells on ``[x0, x1]`` with ``u = u0(x)``."""
        dx = (x1 - x0) / n
        m = n if bc.kind is BoundaryKind.PERIODIC else n + 1
        x = x0 + dx * np.arange(m)
        u = np.asarray(u0(x), dtype=float) + 0.0 * x
        return cls(x, u, 0.0, float(dt), dx, bc, ((0.0, u),), keep)

    def values(self, level: int = -1):
        return self.levels[level][1]


def _padded(sol: GraphSolution):
    if sol.bc.kind is BoundaryKind.PERIODIC:
        return np.concatenate([sol.u[-1:], sol.u, sol.u[:1]]), sol.x
    return sol.u, sol.x[1:-1]


def _graph_terms(metric, sol):
    upad, xi = _padded(sol)
    ui = upad[1:-1]
    j = metric.jet(xi, ui)
    A = np.broadcast_to(j.f, xi.shape).astype(float)
    Ax = np.broadcast_to(j.fp, xi.shape).astype(float)
    Au = np.broadcast_to(j.fq, xi.shape).astype(float)
    ut, ux = kernels.graph_rhs(np.ascontiguousarray(upad), sol.dx, A, Ax, Au)
    return ut, ux, A


def graph_flow_step(metric: SurfaceMetric, sol: GraphSolution, cfl: float = 0.4) -> GraphSolution:
    """One explicit Euler step of the method-of-lines graph flow.

    Raises
    ------
    CFLViolation
        ``dt > cfl * dx^2 * min(L^2)`` on the current state.
    BlowUp
        ``max |u_x|`` exceeds ``1e6`` or the update is not finite.
    """
    ut, ux, A = _graph_terms(metric, sol)
    if not np.all(np.isfinite(ux)) or np.max(np.abs(ux), initial=0.0) > BLOWUP_SLOPE:
        raise BlowUp(f"|u_x| exceeded {BLOWUP_SLOPE:g} at t={sol.t:.6g}")
    L2min = float(np.min(A + ux * ux))
    if sol.dt > cfl * sol.dx ** 2 * L2min:
        raise CFLViolation(f"dt={sol.dt:.3e} > {cfl}*dx^2*min(L^2)={cfl * sol.dx ** 2 * L2min:.3e}")
    t_new = sol.t + sol.dt
    if sol.bc.kind is BoundaryKind.PERIODIC:
        u_new = sol.u + sol.dt * ut
    else:
        u_new = np.empty_like(sol.u)
        u_new[1:-1] = sol.u[1:-1] + sol.dt * ut
        ends = np.asarray(sol.bc.exact(sol.x[[0, -1]], t_new), dtype=float) + np.zeros(2)
        u_new[0], u_new[-1] = ends
    if not np.all(np.isfinite(u_new)):
        raise BlowUp(f"non-finite values at t={t_new:.6g}")
    levels = (sol.levels + ((t_new, u_new),))[-sol.keep:]
    return replace(sol, u=u_new, t=t_new, levels=levels)


def run_graph_flow(metric: SurfaceMetric, x0: float, x1: float, n: int, u0: Callable, T: float,
                   bc: BoundaryCondition, dt: float = None, cfl: float = 0.4, keep: int = 3) -> GraphSolution:
    """Evolve ``u0`` to time ``T``.

    Without ``dt`` the step is ``0.9 * cfl * dx^2 * min(L^2(0))``, shrunk so an
    integer number of steps lands on ``T``.
    """
    sol = GraphSolution.initial(x0, x1, n, u0, 1.0, bc, keep)
    if dt is None:
        _, ux, A = _graph_terms(metric, sol)
        dt = 0.9 * cfl * sol.dx ** 2 * float(np.min(A + ux * ux))
    steps = max(1, int(math.ceil(T / dt - 1e-9)))
    sol = replace(sol, dt=T / steps)
    for _ in range(steps):
        sol = graph_flow_step(metric, sol, cfl)
    return sol


def metric_evolution_residual(sol: GraphSolution, metric: SurfaceMetric, level: int = -2) -> float:
    """``max |u_x u_xt + L^2 k^2|`` over interior nodes at a stored level.

    ``u_xt`` is the central time difference of ``u_x`` between the levels
    adjacent to ``level`` (default: the middle of the last three).  Stored
    levels are assumed equally spaced in time.
    """
    if len(sol.levels) < 3:
        raise TooFewTimeLevels(f"need 3 stored time levels, have {len(sol.levels)}")
    idx = level % len(sol.levels)
    if idx == 0 or idx == len(sol.levels) - 1:
        raise TooFewTimeLevels("central level needs a neighbour on each side")
    (t0, um), (t1, uc), (t2, up) = sol.levels[idx - 1:idx + 2]
    s = replace(sol, u=uc)
    upad_c, xi = _padded(s)
    upad_m, _ = _padded(replace(sol, u=um))
    upad_p, _ = _padded(replace(sol, u=up))
    dx = sol.dx
    ux = lambda w: (w[2:] - w[:-2]) / (2 * dx)  # noqa: E731
    ux_c = ux(upad_c)
    uxx_c = (upad_c[2:] - 2 * upad_c[1:-1] + upad_c[:-2]) / dx ** 2
    uxt = (ux(upad_p) - ux(upad_m)) / (t2 - t0)
    ui = upad_c[1:-1]
    A = metric.jet(xi, ui).f
    k = geodesic_curvature_graph(metric, xi, ui, ux_c, uxx_c)
    return float(np.max(np.abs(ux_c * uxt + (A + ux_c ** 2) * k ** 2)))


# ---------------------------------------------------------------------------
# parametric (front-tracking) flow

def _vertex_rho(metric, pts):
    j = metric.jet(pts[:, 0], pts[:, 1])
    shape = pts[:, 0].shape
    return tuple(np.ascontiguousarray(np.broadcast_to(a, shape), dtype=float) for a in (j.f, j.fp, j.fq))


def parametric_flow_step(metric: SurfaceMetric, curve: Curve, dt: float, resample_every: int = 20,
                         boundary: Callable = None, collapse_length: float = 0.0,
                         cfl: float = 0.4) -> Curve:
    """Move every vertex by ``dt * k_g * nu`` (purely normal motion).

    Closed curves move all vertices; open curves move interior vertices and
    place the endpoints at ``boundary(t + dt)`` (an ``(2, 2)`` array) or keep
    them fixed.  Every ``resample_every`` steps the curve is resampled to
    uniform metric arclength and checked for self-intersection and collapse.

    Raises
    ------
    CFLViolation
        ``dt > cfl * (min metric segment length)^2``.
    SelfIntersection, CollapseError, DomainError
    """
    if not metric.is_isothermal:
        raise ValueError("parametric flow needs an isothermal metric")
    seg = curve.segment_lengths(metric)
    hmin = float(seg.min())
    if dt > cfl * hmin * hmin:
        raise CFLViolation(f"dt={dt:.3e} > {cfl}*h_min^2={cfl * hmin * hmin:.3e}")
    pts = np.ascontiguousarray(curve.points)
    inner = pts if curve.closed else pts[1:-1]
    rho, ru, rv = _vertex_rho(metric, inner)
    _, vel = kernels.polyline_velocity(pts, curve.closed, rho, ru, rv)
    new = pts.copy()
    if curve.closed:
        new += dt * vel
    else:
        new[1:-1] += dt * vel
        if boundary is not None:
            new[[0, -1]] = np.asarray(boundary(curve.t + dt), dtype=float)
    metric.domain.check(new[:, 0], new[:, 1])
    count = curve.steps_since_resample + 1
    out = Curve(new, CurveParam.GENERAL, curve.closed, t=curve.t + dt, steps_since_resample=count)
    if resample_every and count >= resample_every:
        out = _maintain(metric, out, len(curve), collapse_length)
    return out


def _maintain(metric, curve, n, collapse_length):
    if kernels.self_intersects(np.ascontiguousarray(curve.points), curve.closed):
        raise SelfIntersection(f"curve self-intersects at t={curve.t:.6g}")
    if curve.length(metric) < collapse_length:
        raise CollapseError(f"curve length {curve.length(metric):.3e} below {collapse_length:.3e}")
    return replace(resample(curve, n, metric), t=curve.t, steps_since_resample=0)


def run_parametric_flow(metric: SurfaceMetric, curve: Curve, T: float, dt: float,
                        resample_every: int = 20, boundary: Callable = None, callback=None,
                        record_every: int = 0) -> Curve:
    """Flow ``curve`` (resampled first) to time ``T`` with step ``<= dt``.

    ``callback(curve)`` is called every ``record_every`` steps (and at the end).
    Collapse is declared when the length falls below ten initial spacings.
    """
    n = len(curve)
    curve = replace(resample(curve, n, metric), t=0.0)
    collapse = 10.0 * curve.length(metric) / n
    steps = max(1, int(math.ceil(T / dt - 1e-9))) if T > 0 else 0
    h = T / steps if steps else 0.0
    for i in range(steps):
        curve = parametric_flow_step(metric, curve, h, resample_every, boundary, collapse)
        if callback is not None and record_every and (i + 1) % record_every == 0:
            callback(curve)
    curve = replace(curve, t=T)
    if callback is not None and (not record_every or steps % record_every):
        callback(curve)
    return curve


def isoperimetric_ratio(curve: Curve) -> float:
    """``L^2 / A`` of a closed planar curve (``4 pi`` for a circle)."""
    return curve.length() ** 2 / abs(curve.enclosed_area())


# ---------------------------------------------------------------------------
# one-parameter groups generated by homothetic fields

@dataclass(frozen=True)
class GroupFlow:
    """The local group ``omega_eps`` of a homothetic field."""

    field: VectorFieldSpec
    lam: float
    epsilon_max: float = 1.0
    domain: Optional[Domain] = None

    def __call__(self, p, eps):
        if abs(eps) > self.epsilon_max:
            raise ValueError(f"|eps| > epsilon_max={self.epsilon_max}")
        return flow_conformal_field(self.field, p, eps, domain=self.domain)


def flow_conformal_field(field: VectorFieldSpec, p, eps: float, step: float = 1e-3,
                         domain: Domain = None):
    """``omega_eps(p)``: RK4 integration of ``d omega / d s = X(omega)``.

    ``p`` may be a single point or an ``(N, 2)`` array.  With ``domain`` given,
    each stage is checked and :class:`DomainExit` raised on leaving it.
    """
    y = np.array(p, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    n = int(math.ceil(abs(eps) / step - 1e-12)) if eps else 0
    h = eps / n if n else 0.0

    def X(q):
        if domain is not None and not np.all(domain.contains(q[:, 0], q[:, 1])):
            raise DomainExit("group orbit left the domain", None, None)
        a, b = field(q[:, 0], q[:, 1])
        return np.column_stack([np.broadcast_to(a, q[:, 0].shape), np.broadcast_to(b, q[:, 0].shape)])

    for _ in range(n):
        k1 = X(y)
        k2 = X(y + 0.5 * h * k1)
        k3 = X(y + 0.5 * h * k2)
        k4 = X(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[0] if single else y


def map_curve(field: VectorFieldSpec, curve: Curve, eps: float, domain: Domain = None) -> Curve:
    """Image of a curve under ``omega_eps`` (tangents dropped)."""
    pts = flow_conformal_field(field, curve.points, eps, domain=domain)
    return Curve(pts, CurveParam.GENERAL, curve.closed, t=curve.t)


def conformal_factor_check(metric: SurfaceMetric, field: VectorFieldSpec, lam: float, eps: float,
                           n: int = 8, directions: int = 4, h: float = 1e-5, return_count: bool = False):
    """Largest ``|(omega_eps^* g)(V, V) / g(V, V) - exp(2 lam eps)|``.

    Base points form an ``n x n`` grid on the metric domain; points whose
    orbit (or difference stencil) leaves the domain are skipped.  The
    differential of ``omega_eps`` is taken by central differences of flowed
    points with spacing ``h`` along ``directions`` unit vectors.

    Raises
    ------
    DomainExit
        No base point keeps its orbit inside the domain.
    """
    dom = metric.domain
    base = dom.grid(n)
    angles = np.pi * np.arange(directions) / directions
    V = np.column_stack([np.cos(angles), np.sin(angles)])
    worst, used = 0.0, 0
    target = math.exp(2 * lam * eps)
    for p in base:
        stencil = np.vstack([p, p + h * V, p - h * V])
        try:
            img = flow_conformal_field(field, stencil, eps, domain=dom)
        except DomainExit:
            continue
        if not np.all(dom.contains(img[:, 0], img[:, 1])):
            continue
        dV = (img[1:1 + directions] - img[1 + directions:]) / (2 * h)
        rho_p = float(metric.scalar.value(p[0], p[1]))
        rho_q = float(metric.scalar.value(img[0, 0], img[0, 1]))
        ratio = np.exp(2 * (rho_q - rho_p)) * np.sum(dV * dV, axis=1)
        worst = max(worst, float(np.max(np.abs(ratio - target))))
        used += 1
    if used == 0:
        raise DomainExit("every sampled orbit left the domain", None, None)
    return (worst, used) if return_count else worst


def self_similarity_time(lam: float, T: float) -> float:
    """Group parameter ``s(T) = ln(1 + 2 lam T) / (2 lam)`` (``T`` when ``lam = 0``).

    It solves ``s' = exp(-2 lam s)``, ``s(0) = 0``: the mapped curve moves with
    normal speed ``exp(-lam s) k_g`` after the curvature rescales by
    ``exp(-lam s)`` under ``omega_s``.
    """
    if 1 + 2 * lam * T <= 0:
        raise ValueError("1 + 2 lam T must be positive")
    if lam == 0:
        return float(T)
    return math.log1p(2 * lam * T) / (2 * lam)


class _OrbitTracker:
    """Endpoints ``omega_{s(t)}(p)`` advanced incrementally as ``t`` grows."""

    def __init__(self, field, lam, points):
        self.field, self.lam = field, lam
        self.s, self.pos = 0.0, np.array(points, dtype=float)

    def __call__(self, t):
        s_new = self_similarity_time(self.lam, t)
        self.pos = flow_conformal_field(self.field, self.pos, s_new - self.s)
        self.s = s_new
        return self.pos


def _close_if_periodic(curve: Curve, tol: float = 1e-6) -> Curve:
    pts = curve.points
    if curve.closed or len(pts) < 3:
        return curve
    gap = float(np.hypot(*(pts[-1] - pts[0])))
    if gap <= tol * max(curve.length(), 1.0):
        return Curve(pts[:-1], curve.param, True, t=curve.t)
    return curve


def self_similarity_check(metric: SurfaceMetric, field: VectorFieldSpec, lam: float,
                          soliton_curve: Curve, T: float, n_points: int = 128, dt: float = None,
                          resample_every: int = 20, n_dense: int = 2048) -> float:
    """Hausdorff distance between the flowed curve and its group image at ``T``.

    The soliton curve (closed automatically if its ends meet) is resampled to
    ``n_points`` and evolved by the parametric flow; open curves have their
    endpoints carried along by ``omega_{s(t)}``.  The comparison curve is
    ``omega_{s(T)}`` applied to the full-resolution soliton curve.
    """
    s_T = self_similarity_time(lam, T)
    if T == 0:
        return 0.0
    curve = _close_if_periodic(soliton_curve)
    work = resample(curve, n_points, metric)
    if dt is None:
        hmin = float(work.segment_lengths(metric).min())
        dt = 0.1 * hmin * hmin
    boundary = None
    if not curve.closed:
        boundary = _OrbitTracker(field, lam, work.points[[0, -1]])
    flowed = run_parametric_flow(metric, work, T, dt, resample_every, boundary)
    mapped = map_curve(field, curve, s_T)
    return hausdorff_distance(flowed, mapped, n_dense)

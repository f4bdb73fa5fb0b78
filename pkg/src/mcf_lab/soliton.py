"""Soliton initial curves on isothermal surfaces.

A unit-speed curve ``(u(s), v(s))`` with ``(w, z) = (u', v')`` is the initial
datum of a soliton generated by the homothetic field ``X = phi d_u + psi d_v``
iff it satisfies the characterizing equation

    (phi - f1) z + (f2 - psi) w = 0,

where ``(f1, f2)`` is the covariant acceleration.  Together with the derivative
of the unit-speed relation ``w^2 + z^2 = exp(-2 rho)`` this is a first-order
system for ``(u, v, w, z)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .curves import Curve, CurveParam, central_derivatives
from .errors import DomainError, DomainExit, SingularError, SpeedError, TooFewPoints
from .geometry import SurfaceMetric, VectorFieldSpec, geodesic_acceleration

__all__ = [
    "SolitonState",
    "soliton_rhs",
    "integrate_soliton",
    "soliton_arc",
    "characterizing_residual",
    "euclidean_homothetic_residual",
    "unit_speed_drift",
    "SOLITON_FIXTURES",
    "fixture_soliton",
]


@dataclass(frozen=True)
class SolitonState:
    u: float
    v: float
    w: float
    z: float

    @classmethod
    def unit_speed(cls, metric: SurfaceMetric, u: float, v: float, angle: float) -> "SolitonState":
        """State at ``(u, v)`` heading at Euclidean ``angle`` with unit metric speed."""
        speed = math.exp(-float(metric.scalar.value(u, v)))
        return cls(u, v, speed * math.cos(angle), speed * math.sin(angle))

    def as_array(self):
        return np.array([self.u, self.v, self.w, self.z], dtype=float)


def _closure(w, z, ru, rv, e_m2r, phi, psi, w_min):
    """Resolve ``(w', z')`` in the chart that divides by ``w``.

    ``z'`` follows from eliminating ``w'`` between the differentiated unit-speed
    relation and the characterizing equation; ``w'`` then follows from
    ``h1 = -(z z' + exp(-2 rho)(w rho_u + z rho_v)) / w``.
    """
    if abs(w) < w_min:
        raise SingularError(f"|w| = {abs(w):.3e} < {w_min:g}")
    G1 = (w * w - z * z) * ru + 2 * w * z * rv
    G2 = (z * z - w * w) * rv + 2 * w * z * ru
    b1 = -e_m2r * (w * ru + z * rv)
    b2 = (G1 - phi) * z + (psi - G2) * w
    zp = (z * b1 + w * b2) / (w * w + z * z)
    wp = -(z * zp - b1) / w
    return wp, zp


def _local(metric, field, u, v):
    j = metric.jet(u, v)
    return float(j.fp), float(j.fq), math.exp(-2.0 * float(j.f)), float(field.phi.value(u, v)), \
        float(field.psi.value(u, v))


def soliton_rhs(metric: SurfaceMetric, field: VectorFieldSpec, state, w_min: float = 1e-6,
                chart: str = "direct"):
    """Right-hand side ``(w, z, h1, h2)`` of the soliton curve system.

    ``chart="swapped"`` evaluates the mirrored system with the roles of
    ``u`` and ``v`` exchanged (dividing by ``z`` instead of ``w``) and maps
    the result back.

    Raises
    ------
    SingularError
        If the divisor (``w``, or ``z`` in the swapped chart) is below ``w_min``.
    """
    u, v, w, z = (state.u, state.v, state.w, state.z) if isinstance(state, SolitonState) else state
    ru, rv, e, phi, psi = _local(metric, field, u, v)
    if chart == "direct":
        wp, zp = _closure(w, z, ru, rv, e, phi, psi, w_min)
    elif chart == "swapped":
        zp, wp = _closure(z, w, rv, ru, e, psi, phi, w_min)
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return np.array([w, z, wp, zp])


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _partial_curve(s, ys):
    ys = np.asarray(ys)
    return Curve(ys[:, :2], CurveParam.ARCLENGTH, s=np.asarray(s), tangents=ys[:, 2:])


def integrate_soliton(metric: SurfaceMetric, field: VectorFieldSpec, initial: SolitonState,
                      arclength: float, step: float = 1e-3, project_every: int = 100,
                      chart: str = "auto", w_min: float = 1e-6, speed_tol: float = 1e-10) -> Curve:
    """Integrate the soliton system with fixed-step classical RK4.

    The step is shrunk so that an integer number of steps covers
    ``arclength`` exactly.  With ``chart="auto"`` each step runs in the chart
    whose divisor is larger (``|w| >= |z|`` keeps the direct chart).  Every
    ``project_every`` steps ``(w, z)`` is rescaled onto the unit-speed
    constraint; ``0`` disables the projection.

    Raises
    ------
    SpeedError
        Initial state off the unit-speed constraint by more than ``speed_tol``.
    DomainExit, SingularError
        Carry ``arclength`` reached and the partial ``curve``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    y = initial.as_array()
    e0 = math.exp(-2.0 * float(metric.jet(y[0], y[1]).f))
    if abs(y[2] ** 2 + y[3] ** 2 - e0) > speed_tol * max(1.0, e0):
        raise SpeedError("initial state violates the unit-speed constraint")
    n = int(math.ceil(arclength / step - 1e-12)) if arclength > 0 else 0
    h = arclength / n if n else 0.0
    s_out, ys = [0.0], [y.copy()]
    for i in range(n):
        c = chart
        if c == "auto":
            c = "direct" if abs(y[2]) >= abs(y[3]) else "swapped"
        rhs = lambda yy, c=c: soliton_rhs(metric, field, yy, w_min, c)  # noqa: E731
        try:
            y = _rk4_step(rhs, y, h)
            metric.domain.check(y[0], y[1])
        except DomainError as exc:
            raise DomainExit(f"left domain at s={i * h:.6g}: {exc}", i * h, _partial_curve(s_out, ys)) from None
        except SingularError as exc:
            raise SingularError(f"singular at s={i * h:.6g}: {exc}", i * h, _partial_curve(s_out, ys)) from None
        if project_every and (i + 1) % project_every == 0:
            target = math.exp(-float(metric.scalar.value(y[0], y[1])))
            y[2:] *= target / math.hypot(y[2], y[3])
        s_out.append((i + 1) * h)
        ys.append(y.copy())
    return _partial_curve(s_out, ys)


def soliton_arc(metric, field, initial: SolitonState, half_length: float, step: float = 1e-3,
                **kw) -> Curve:
    """Soliton curve through ``initial`` extending ``half_length`` both ways.

    The backward half is integrated from the reversed tangent; the
    characterizing equation is invariant under orientation reversal.
    """
    fwd = integrate_soliton(metric, field, initial, half_length, step, **kw)
    back_init = SolitonState(initial.u, initial.v, -initial.w, -initial.z)
    back = integrate_soliton(metric, field, back_init, half_length, step, **kw)
    pts = np.vstack([back.points[::-1], fwd.points[1:]])
    tg = np.vstack([-back.tangents[::-1], fwd.tangents[1:]])
    s = np.concatenate([-back.s[::-1], fwd.s[1:]])
    return Curve(pts, CurveParam.ARCLENGTH, s=s, tangents=tg)


def unit_speed_drift(metric: SurfaceMetric, curve: Curve) -> float:
    """``max |w^2 + z^2 - exp(-2 rho)|`` along a curve carrying tangents."""
    w, z = curve.tangents[:, 0], curve.tangents[:, 1]
    rho = metric.scalar.value(curve.u, curve.v)
    return float(np.max(np.abs(w * w + z * z - np.exp(-2 * rho))))


def _uniform_step(curve: Curve) -> float:
    if curve.s is None:
        raise ValueError("curve must carry its arclength parameter")
    ds = np.diff(curve.s)
    h = float(np.mean(ds)) if len(ds) else 0.0
    if len(ds) and np.max(np.abs(ds - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("curve is not uniformly parametrised")
    return h


def characterizing_residual(metric: SurfaceMetric, field: VectorFieldSpec, curve: Curve,
                            signed: bool = False):
    """Largest ``|(phi - f1) v' + (f2 - psi) u'|`` over the curve.

    Derivatives come from 5-point central differences in the arclength
    parameter (interior points only for open curves).  With ``signed=True``
    the pointwise signed residuals are returned instead of the maximum.
    """
    if len(curve) < 5:
        raise TooFewPoints(f"need at least 5 points, got {len(curve)}")
    h = _uniform_step(curve) if not curve.closed else curve.length(metric) / len(curve)
    idx, d1, d2 = central_derivatives(curve.points, h, curve.closed)
    u, v = curve.u[idx], curve.v[idx]
    j = metric.jet(u, v)
    f1, f2 = geodesic_acceleration(j, d1[:, 0], d1[:, 1], d2[:, 0], d2[:, 1])
    phi, psi = field.phi.value(u, v), field.psi.value(u, v)
    res = (phi - f1) * d1[:, 1] + (f2 - psi) * d1[:, 0]
    return res if signed else float(np.max(np.abs(res)))


def euclidean_homothetic_residual(curve: Curve, cc_prime: float) -> float:
    """Largest ``|k nu - c c' F0_perp|`` for a planar arclength-parametrised curve.

    ``k nu`` is the curvature vector ``r''`` and ``F0_perp`` the normal part
    of the position vector.  The step is taken from ``curve.s`` when present,
    otherwise (closed curves only) from the polygon length.
    """
    if len(curve) < 5:
        raise TooFewPoints(f"need at least 5 points, got {len(curve)}")
    if curve.closed and curve.s is None:
        h = curve.length() / len(curve)
    else:
        h = _uniform_step(curve)
    idx, d1, d2 = central_derivatives(curve.points, h, curve.closed)
    T = d1 / np.hypot(d1[:, 0], d1[:, 1])[:, None]
    F0 = curve.points[idx]
    F0_perp = F0 - np.sum(F0 * T, axis=1)[:, None] * T
    diff = d2 - cc_prime * F0_perp
    return float(np.max(np.hypot(diff[:, 0], diff[:, 1])))


# start point, Euclidean heading and arclength for each shipped family; the
# arcs stay inside the fixture domains
SOLITON_FIXTURES = {
    "I_i": ((0.0, 0.0), 0.0, 5.0),
    "I_ii": ((1.5, 1.5), 0.0, 2.0),
    "I_iii": ((1.0, 1.0), 1.6, 0.8),
    "II": ((0.0, 1.1), 0.0, 0.5),
}


def fixture_soliton(name: str, step: float = 1e-3, **kw):
    """``(metric, field, curve)`` for a shipped conformal family fixture."""
    from .families import FIXTURES, make_conformal_family

    metric, field = make_conformal_family(FIXTURES[name])
    (u0, v0), angle, length = SOLITON_FIXTURES[name]
    init = SolitonState.unit_speed(metric, u0, v0, angle)
    return metric, field, integrate_soliton(metric, field, init, length, step, **kw)

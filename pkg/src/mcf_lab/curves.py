"""Discrete curves on a coordinate patch: resampling, distances and I/O."""

import csv
import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import TooFewPoints

__all__ = ["CurveParam", "Curve", "resample", "hausdorff_distance", "export_curve",
           "import_curve", "circle", "ellipse", "central_derivatives"]


class CurveParam(str, Enum):
    ARCLENGTH = "arclength"
    GRAPH = "graph"
    GENERAL = "general"


def _frozen(a, shape_tail=None):
    if a is None:
        return None
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Curve:
    """Ordered points ``(u, v)`` with optional arclength and unit-speed tangents.

    ``s`` is the (metric) arclength parameter of each point and ``tangents``
    holds ``(w, z) = (u', v')`` when the curve comes from an ODE integration.
    ``t`` and ``steps_since_resample`` are bookkeeping for curve evolution.
    """

    points: np.ndarray
    param: CurveParam = CurveParam.GENERAL
    closed: bool = False
    s: Optional[np.ndarray] = None
    tangents: Optional[np.ndarray] = None
    t: float = 0.0
    steps_since_resample: int = 0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "param", CurveParam(self.param))
        object.__setattr__(self, "s", _frozen(self.s))
        if self.tangents is not None:
            tg = np.array(self.tangents, dtype=float).reshape(-1, 2)
            tg.setflags(write=False)
            object.__setattr__(self, "tangents", tg)
        if len(pts) > 1:
            step = np.hypot(*np.diff(pts, axis=0).T)
            if np.any(step == 0.0):
                raise ValueError("consecutive curve points must be distinct")

    def __len__(self):
        return len(self.points)

    @property
    def u(self):
        return self.points[:, 0]

    @property
    def v(self):
        return self.points[:, 1]

    def with_points(self, points, **kw):
        return replace(self, points=points, s=kw.pop("s", None), tangents=kw.pop("tangents", None), **kw)

    def segment_lengths(self, metric=None):
        """Lengths of consecutive segments (closing segment included if closed).

        With an isothermal ``metric`` each chord is weighted by ``exp(rho)``
        at its midpoint.
        """
        pts = self.points
        nxt = np.roll(pts, -1, axis=0) if self.closed else pts[1:]
        cur = pts if self.closed else pts[:-1]
        chord = np.hypot(*(nxt - cur).T)
        if metric is not None and metric.is_isothermal:
            mid = 0.5 * (cur + nxt)
            chord = chord * np.exp(metric.scalar.value(mid[:, 0], mid[:, 1]))
        return chord

    def length(self, metric=None) -> float:
        return float(np.sum(self.segment_lengths(metric)))

    def is_uniform(self, metric=None, tol: float = 0.05) -> bool:
        seg = self.segment_lengths(metric)
        return bool(np.all(np.abs(seg - seg.mean()) <= tol * seg.mean()))

    def enclosed_area(self) -> float:
        u, v = self.u, self.v
        return 0.5 * float(np.sum(u * np.roll(v, -1) - np.roll(u, -1) * v))


def circle(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> Curve:
    th = phase + 2 * np.pi * np.arange(n) / n
    pts = np.column_stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)])
    return Curve(pts, CurveParam.ARCLENGTH, closed=True, s=radius * (th - phase))


def ellipse(n: int, a: float, b: float) -> Curve:
    th = 2 * np.pi * np.arange(n) / n
    return resample(Curve(np.column_stack([a * np.cos(th), b * np.sin(th)]), closed=True), n)


def _spline(points, closed):
    pts = points
    if closed:
        pts = np.vstack([points, points[:1]])
    chord = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    bc = "periodic" if closed else "not-a-knot"
    return CubicSpline(chord, pts, axis=0, bc_type=bc), chord[-1]


def resample(curve: Curve, n: int, metric=None, oversample: int = 8) -> Curve:
    """Resample to ``n`` points equally spaced in (metric) arclength.

    A cubic spline through the points (periodic for closed curves) is
    parametrised by chord length, arclength is accumulated on an
    ``oversample``-times finer grid, and new points are placed at equal
    arclength.  Open curves keep both endpoints.
    """
    if len(curve) < 4:
        raise TooFewPoints("resampling needs at least 4 points")
    sp, total = _spline(curve.points, curve.closed)
    m = max(oversample * max(n, len(curve)), 64)
    sig = np.linspace(0.0, total, m + 1)
    fine = sp(sig)
    step = np.hypot(*np.diff(fine, axis=0).T)
    if metric is not None and metric.is_isothermal:
        mid = 0.5 * (fine[1:] + fine[:-1])
        step = step * np.exp(metric.scalar.value(mid[:, 0], mid[:, 1]))
    arc = np.concatenate([[0.0], np.cumsum(step)])
    if curve.closed:
        targets = arc[-1] * np.arange(n) / n
    else:
        targets = np.linspace(0.0, arc[-1], n)
    new_sig = np.interp(targets, arc, sig)
    pts = sp(new_sig)
    if not curve.closed:
        pts[0], pts[-1] = curve.points[0], curve.points[-1]
    return Curve(pts, CurveParam.ARCLENGTH, curve.closed, s=targets, t=curve.t)


def hausdorff_distance(a: Curve, b: Curve, n_dense: int = 2048) -> float:
    """Symmetric Hausdorff distance between two curves (coordinate metric).

    Both curves are densely resampled; distances are measured from the
    sample points of one curve to the polyline of the other.
    """
    da = resample(a, max(n_dense, len(a))).points
    db = resample(b, max(n_dense, len(b))).points
    d1 = kernels.point_polyline_distance(np.ascontiguousarray(da), np.ascontiguousarray(db), b.closed)
    d2 = kernels.point_polyline_distance(np.ascontiguousarray(db), np.ascontiguousarray(da), a.closed)
    return float(max(d1.max(), d2.max()))


# five-point central stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def central_derivatives(values, h, closed=False):
    """First and second derivatives by 5-point central differences.

    ``values`` is ``(N, ...)`` sampled at uniform spacing ``h``.  For open
    curves only the ``N - 4`` interior points are returned; the returned
    ``index`` array tells which.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < 5:
        raise TooFewPoints(f"need at least 5 points, got {n}")
    if closed:
        idx = np.arange(n)
        shifted = [np.roll(values, -k, axis=0) for k in (-2, -1, 0, 1, 2)]
    else:
        idx = np.arange(2, n - 2)
        shifted = [values[2 + k:n - 2 + k] for k in (-2, -1, 0, 1, 2)]
    d1 = sum(c * s for c, s in zip(_D1, shifted)) / h
    d2 = sum(c * s for c, s in zip(_D2, shifted)) / (h * h)
    return idx, d1, d2


_CSV_HEADER = ["s", "u", "v", "w", "z"]


def _columns(curve: Curve):
    n = len(curve)
    s = curve.s if curve.s is not None else np.concatenate([[0.0], np.cumsum(curve.segment_lengths())])[:n]
    tg = curve.tangents if curve.tangents is not None else np.full((n, 2), np.nan)
    return s, curve.u, curve.v, tg[:, 0], tg[:, 1]


def export_curve(curve: Curve, path, fmt: str = "csv") -> None:
    """Write a curve as CSV (columns ``s,u,v,w,z``) or JSON.

    Floats are written with ``repr`` so finite values round-trip exactly.
    Missing tangents are written as ``nan``.
    """
    fmt = fmt.lower()
    cols = _columns(curve) if len(curve) else [np.empty(0)] * 5
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_CSV_HEADER)
            for row in zip(*cols):
                w.writerow([repr(float(x)) for x in row])
    elif fmt == "json":
        doc = {"param": curve.param.value, "closed": curve.closed, "t": curve.t,
               "has_tangents": curve.tangents is not None}
        doc.update({k: [float(x) for x in c] for k, c in zip(_CSV_HEADER, cols)})
        with open(path, "w") as fh:
            json.dump(doc, fh)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def import_curve(path, fmt: str = None, closed: bool = False, param=CurveParam.ARCLENGTH) -> Curve:
    """Read a curve written by :func:`export_curve`."""
    fmt = (fmt or str(path).rsplit(".", 1)[-1]).lower()
    if fmt == "json":
        with open(path) as fh:
            doc = json.load(fh)
        cols = [np.array(doc[k], dtype=float) for k in _CSV_HEADER]
        closed, param, t = doc["closed"], doc["param"], doc.get("t", 0.0)
        has_tg = doc.get("has_tangents", True)
    else:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if rows[0] != _CSV_HEADER:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, 5)
        cols = list(data.T)
        t = 0.0
        has_tg = not np.all(np.isnan(cols[3]))
    tg = np.column_stack([cols[3], cols[4]]) if has_tg else None
    return Curve(np.column_stack([cols[1], cols[2]]), param, closed, s=cols[0], tangents=tg, t=t)

"""Pure-numpy implementations of the hot kernels.

Every function here has a loop-based twin in ``_numba`` with an identical
signature; the test-suite checks that both agree.
"""

import numpy as np


def graph_rhs(u, dx, A, Ax, Au):
    """Method-of-lines right-hand side of the graph flow at interior nodes.

    ``u`` has length ``M`` (boundary/ghost values included); ``A, Ax, Au`` are
    evaluated at the ``M - 2`` interior nodes.  Returns ``(u_t, u_x)`` there.
    """
    ux = (u[2:] - u[:-2]) / (2.0 * dx)
    uxx = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
    ut = (uxx - (Au / A) * ux * ux - (Ax / (2.0 * A)) * ux - 0.5 * Au) / (A + ux * ux)
    return ut, ux


def _neighbours(pts, closed):
    if closed:
        return np.roll(pts, 1, axis=0), pts, np.roll(pts, -1, axis=0)
    return pts[:-2], pts[1:-1], pts[2:]


def polyline_velocity(pts, closed, rho, rho_u, rho_v):
    """Geodesic curvature and normal velocity at polyline vertices.

    For an isothermal metric the geodesic curvature w.r.t. the left normal is
    ``exp(-rho) (kappa - d rho / d n)`` where ``kappa`` is the Euclidean
    (Menger) curvature and ``n`` the Euclidean left unit normal; the velocity
    ``k_g nu`` in coordinates is ``exp(-2 rho) (kappa - d rho/d n) n``.

    ``rho, rho_u, rho_v`` are given at the vertices that receive a velocity:
    all ``N`` vertices for closed curves, the ``N - 2`` interior ones otherwise.
    Returns ``(k_g, velocity)``.
    """
    prev, cur, nxt = _neighbours(pts, closed)
    a = cur - prev
    b = nxt - cur
    c = nxt - prev
    la = np.hypot(a[:, 0], a[:, 1])
    lb = np.hypot(b[:, 0], b[:, 1])
    lc = np.hypot(c[:, 0], c[:, 1])
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    kappa = 2.0 * cross / (la * lb * lc)
    nx = -c[:, 1] / lc
    ny = c[:, 0] / lc
    bracket = kappa - (rho_u * nx + rho_v * ny)
    kg = np.exp(-rho) * bracket
    scale = np.exp(-2.0 * rho) * bracket
    vel = np.column_stack([scale * nx, scale * ny])
    return kg, vel


def _segments(pts, closed):
    if closed:
        return pts, np.roll(pts, -1, axis=0)
    return pts[:-1], pts[1:]


def self_intersects(pts, closed):
    """True if any two non-adjacent segments cross."""
    p0, p1 = _segments(pts, closed)
    m = len(p0)
    if m < 3:
        return False
    d = p1 - p0

    def orient(q):
        # [i, j]: side of point q[j] relative to the line of segment i
        return d[:, None, 0] * (q[None, :, 1] - p0[:, None, 1]) - d[:, None, 1] * (q[None, :, 0] - p0[:, None, 0])

    straddle = orient(p0) * orient(p1) < 0
    cross = straddle & straddle.T
    idx = np.arange(m)
    gap = np.abs(idx[:, None] - idx[None, :])
    if closed:
        gap = np.minimum(gap, m - gap)
    cross &= gap > 1
    return bool(cross.any())


def point_polyline_distance(points, poly, closed):
    """Distance from each point to the nearest segment of ``poly``."""
    s0, s1 = _segments(poly, closed)
    d = s1 - s0
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd > 0, dd, 1.0)
    out = np.empty(len(points))
    chunk = max(1, 2_000_000 // max(len(s0), 1))
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk]
        rel = p[:, None, :] - s0[None, :, :]
        t = np.clip(np.einsum("ijk,jk->ij", rel, d) / dd, 0.0, 1.0)
        diff = rel - t[:, :, None] * d[None, :, :]
        out[start:start + chunk] = np.sqrt(np.min(np.einsum("ijk,ijk->ij", diff, diff), axis=1))
    return out

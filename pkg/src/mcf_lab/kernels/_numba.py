"""Numba-compiled kernels; loop twins of :mod:`mcf_lab.kernels._numpy`.

``error_model="numpy"`` makes degenerate vertices yield nan/inf as in the
numpy path instead of raising ZeroDivisionError.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, error_model="numpy")
def graph_rhs(u, dx, A, Ax, Au):
    m = u.shape[0] - 2
    ut = np.empty(m)
    ux = np.empty(m)
    inv2dx = 1.0 / (2.0 * dx)
    invdx2 = 1.0 / (dx * dx)
    for i in range(m):
        d1 = (u[i + 2] - u[i]) * inv2dx
        d2 = (u[i + 2] - 2.0 * u[i + 1] + u[i]) * invdx2
        a = A[i]
        ut[i] = (d2 - (Au[i] / a) * d1 * d1 - (Ax[i] / (2.0 * a)) * d1 - 0.5 * Au[i]) / (a + d1 * d1)
        ux[i] = d1
    return ut, ux


@njit(cache=True, error_model="numpy")
def polyline_velocity(pts, closed, rho, rho_u, rho_v):
    n = pts.shape[0]
    if closed:
        m = n
        off = 0
    else:
        m = n - 2
        off = 1
    kg = np.empty(m)
    vel = np.empty((m, 2))
    for k in range(m):
        i = k + off
        ip = (i - 1) % n
        inx = (i + 1) % n
        ax = pts[i, 0] - pts[ip, 0]
        ay = pts[i, 1] - pts[ip, 1]
        bx = pts[inx, 0] - pts[i, 0]
        by = pts[inx, 1] - pts[i, 1]
        cx = pts[inx, 0] - pts[ip, 0]
        cy = pts[inx, 1] - pts[ip, 1]
        la = math.hypot(ax, ay)
        lb = math.hypot(bx, by)
        lc = math.hypot(cx, cy)
        kappa = 2.0 * (ax * by - ay * bx) / (la * lb * lc)
        nx = -cy / lc
        ny = cx / lc
        bracket = kappa - (rho_u[k] * nx + rho_v[k] * ny)
        kg[k] = math.exp(-rho[k]) * bracket
        s = math.exp(-2.0 * rho[k]) * bracket
        vel[k, 0] = s * nx
        vel[k, 1] = s * ny
    return kg, vel


@njit(cache=True, error_model="numpy")
def _orient(ax, ay, bx, by, px, py):
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


@njit(cache=True, error_model="numpy")
def self_intersects(pts, closed):
    n = pts.shape[0]
    m = n if closed else n - 1
    if m < 3:
        return False
    for i in range(m):
        ax, ay = pts[i, 0], pts[i, 1]
        bx, by = pts[(i + 1) % n, 0], pts[(i + 1) % n, 1]
        for j in range(i + 2, m):
            if closed and i == 0 and j == m - 1:
                continue
            cx, cy = pts[j, 0], pts[j, 1]
            dx, dy = pts[(j + 1) % n, 0], pts[(j + 1) % n, 1]
            if (_orient(ax, ay, bx, by, cx, cy) * _orient(ax, ay, bx, by, dx, dy) < 0.0
                    and _orient(cx, cy, dx, dy, ax, ay) * _orient(cx, cy, dx, dy, bx, by) < 0.0):
                return True
    return False


@njit(cache=True, error_model="numpy")
def point_polyline_distance(points, poly, closed):
    n = poly.shape[0]
    m = n if closed else n - 1
    out = np.empty(points.shape[0])
    for k in range(points.shape[0]):
        px, py = points[k, 0], points[k, 1]
        best = np.inf
        for i in range(m):
            ax, ay = poly[i, 0], poly[i, 1]
            dx = poly[(i + 1) % n, 0] - ax
            dy = poly[(i + 1) % n, 1] - ay
            dd = dx * dx + dy * dy
            t = 0.0
            if dd > 0.0:
                t = ((px - ax) * dx + (py - ay) * dy) / dd
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            ex = px - ax - t * dx
            ey = py - ay - t * dy
            e = ex * ex + ey * ey
            if e < best:
                best = e
        out[k] = math.sqrt(best)
    return out

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mcf_lab import kernels

NP = kernels.get_backend("numpy")
NB = kernels.get_backend("numba")

coords = arrays(np.float64, st.tuples(st.integers(5, 40), st.just(2)),
                elements=st.floats(-3, 3, allow_nan=False, width=64))


def _distinct(pts):
    return np.all(np.hypot(*np.diff(pts, axis=0).T) > 1e-3) and np.hypot(*(pts[0] - pts[-1])) > 1e-3


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")


def test_active_backend_is_named():
    assert kernels.BACKEND in ("numba", "numpy")


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(4, 50), elements=st.floats(-2, 2, width=64)),
       st.floats(0.01, 0.5))
def test_graph_rhs_backends_agree(u, dx):
    n = len(u) - 2
    x = np.linspace(0, 1, n)
    A, Ax, Au = 1 + x ** 2, 2 * x, 0.3 * np.ones(n)
    for a, b in zip(NP.graph_rhs(u, dx, A, Ax, Au), NB.graph_rhs(u, dx, A, Ax, Au)):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_graph_rhs_flat_parabola():
    x = np.linspace(-1, 1, 21)
    dx = x[1] - x[0]
    u = x ** 2
    ones, zeros = np.ones(19), np.zeros(19)
    expected = 2.0 / (1 + (2 * x[1:-1]) ** 2)
    assert np.allclose(kernels.graph_rhs(u, dx, ones, zeros, zeros)[0], expected, atol=1e-12)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@settings(max_examples=40, deadline=None)
@given(coords, st.booleans())
def test_polyline_velocity_backends_agree(pts, closed):
    if not _distinct(pts):
        return
    pts = np.ascontiguousarray(pts)
    m = len(pts) if closed else len(pts) - 2
    r = np.linspace(-0.5, 0.5, m)
    a = NP.polyline_velocity(pts, closed, r, 0.2 * r, -r)
    b = NB.polyline_velocity(pts, closed, r, 0.2 * r, -r)
    assert np.allclose(a[0], b[0], rtol=1e-10, atol=1e-10, equal_nan=True)
    assert np.allclose(a[1], b[1], rtol=1e-10, atol=1e-10, equal_nan=True)


def test_polyline_curvature_of_circle():
    th = 2 * np.pi * np.arange(64) / 64
    pts = np.ascontiguousarray(np.column_stack([2 * np.cos(th), 2 * np.sin(th)]))
    z = np.zeros(64)
    kg, vel = kernels.polyline_velocity(pts, True, z, z, z)
    assert np.allclose(kg, 0.5, rtol=1e-12)
    assert np.allclose(vel, -0.25 * pts, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(coords, st.booleans())
def test_self_intersects_backends_agree(pts, closed):
    pts = np.ascontiguousarray(pts)
    assert NP.self_intersects(pts, closed) == NB.self_intersects(pts, closed)


def test_self_intersection_figure_eight():
    th = 2 * np.pi * np.arange(100) / 100
    eight = np.ascontiguousarray(np.column_stack([np.sin(th), np.sin(th) * np.cos(th)]))
    ring = np.ascontiguousarray(np.column_stack([np.cos(th), np.sin(th)]))
    for mod in (NP, NB):
        assert mod.self_intersects(eight, True)
        assert not mod.self_intersects(ring, True)


@settings(max_examples=40, deadline=None)
@given(coords, coords, st.booleans())
def test_point_polyline_distance_backends_agree(p, poly, closed):
    p, poly = np.ascontiguousarray(p), np.ascontiguousarray(poly)
    assert np.allclose(NP.point_polyline_distance(p, poly, closed), NB.point_polyline_distance(p, poly, closed),
                       atol=1e-12)


def test_point_polyline_distance_segment():
    poly = np.array([[0.0, 0.0], [1.0, 0.0]])
    p = np.array([[0.5, 2.0], [-3.0, 4.0], [2.0, 0.0]])
    assert np.allclose(kernels.point_polyline_distance(p, poly, False), [2.0, 5.0, 1.0])


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", kernels.BACKEND)])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys
    env = dict(os.environ, MCF_LAB_DISABLE_JIT=flag)
    out = subprocess.run([sys.executable, "-c", "import mcf_lab.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == expected

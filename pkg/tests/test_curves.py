import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mcf_lab.curves import (Curve, CurveParam, circle, ellipse, export_curve, hausdorff_distance,
                            import_curve, resample)
from mcf_lab.errors import TooFewPoints


def test_empty_curve_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    export_curve(Curve(np.empty((0, 2))), path)
    assert path.read_text().splitlines() == ["s,u,v,w,z"]


def test_three_point_curve_four_lines(tmp_path):
    path = tmp_path / "three.csv"
    export_curve(Curve(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]])), path)
    assert len(path.read_text().splitlines()) == 4


finite = st.floats(-1e150, 1e150, allow_nan=False, width=64)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(0, 30), st.just(2)), elements=finite),
       st.sampled_from(["csv", "json"]), st.booleans())
def test_round_trip_bit_exact(tmp_path_factory, pts, fmt, closed):
    assume(len(pts) < 2 or np.all(np.any(np.diff(pts, axis=0) != 0, axis=1)))
    path = tmp_path_factory.mktemp("rt") / f"c.{fmt}"
    s = np.arange(len(pts), dtype=float) / 3.0
    tg = pts[::-1].copy()
    c = Curve(pts, CurveParam.ARCLENGTH, closed=closed, s=s, tangents=tg)
    export_curve(c, path, fmt)
    back = import_curve(path, closed=closed)
    assert np.array_equal(back.points, c.points)
    assert np.array_equal(back.s, c.s)
    if len(pts):
        assert np.array_equal(back.tangents, c.tangents)


def test_resample_uniform_in_metric_length(flat_iso):
    c = resample(ellipse(200, 2.0, 0.5), 300, flat_iso)
    seg = c.segment_lengths(flat_iso)
    assert np.ptp(seg) / seg.mean() < 5e-3
    assert c.is_uniform(flat_iso)


def test_resample_open_keeps_endpoints():
    x = np.linspace(0, 1, 30)
    c = Curve(np.column_stack([x, x ** 2]))
    r = resample(c, 50)
    assert np.array_equal(r.points[0], c.points[0])
    assert np.allclose(r.points[-1], c.points[-1], atol=1e-14)


def test_resample_needs_points():
    with pytest.raises(TooFewPoints):
        resample(Curve(np.zeros((3, 2)) + np.arange(3)[:, None]), 10)


def test_circle_length_and_area():
    c = circle(2000, 1.5)
    assert c.length() == pytest.approx(3 * np.pi, rel=1e-5)
    assert c.enclosed_area() == pytest.approx(np.pi * 2.25, rel=1e-5)


def test_hausdorff_concentric_circles():
    assert hausdorff_distance(circle(300, 1.0), circle(257, 1.1, phase=0.3)) == pytest.approx(0.1, abs=1e-5)


def test_hausdorff_ignores_parametrisation():
    a = circle(300, 1.0)
    b = circle(311, 1.0, phase=1.234)
    assert hausdorff_distance(a, b) < 1e-5
    assert hausdorff_distance(a, a) == 0.0

import dataclasses

import numpy as np
import pytest

from mcf_lab.curves import Curve, circle, ellipse, hausdorff_distance
from mcf_lab.errors import BlowUp, CFLViolation, TooFewTimeLevels
from mcf_lab.families import FIXTURES, make_conformal_family
from mcf_lab.flow import (BoundaryCondition, GraphSolution, conformal_factor_check, flow_conformal_field,
                          graph_flow_step, isoperimetric_ratio, map_curve, metric_evolution_residual,
                          run_graph_flow, run_parametric_flow, self_similarity_check, self_similarity_time)
from mcf_lab.fields import Domain
from mcf_lab.geometry import VectorFieldSpec, flat_normal_gaussian
from mcf_lab.soliton import SolitonState, integrate_soliton

GRIM = lambda x, t: t - np.log(np.cos(x))  # noqa: E731


def grim_error(metric, n, T=0.1):
    bc = BoundaryCondition.dirichlet(GRIM)
    sol = run_graph_flow(metric, -1.2, 1.2, n, lambda x: GRIM(x, 0.0), T, bc)
    return float(np.max(np.abs(sol.u - GRIM(sol.x, sol.t)))), sol


def test_stationary_constant(flat_ng):
    bc = BoundaryCondition.dirichlet(None, 0.7, 0.7)
    sol = GraphSolution.initial(0.0, 1.0, 32, lambda x: 0.7 + 0 * x, 1e-5, bc)
    out = graph_flow_step(flat_ng, sol)
    assert np.array_equal(out.u, sol.u)
    assert out.t == pytest.approx(1e-5)


def test_grim_reaper_accuracy(flat_ng):
    err, sol = grim_error(flat_ng, 512)
    assert sol.t == pytest.approx(0.1)
    assert err <= 1e-3


def test_grim_reaper_second_order(flat_ng):
    coarse, _ = grim_error(flat_ng, 64, T=0.05)
    fine, _ = grim_error(flat_ng, 128, T=0.05)
    assert 3.0 < coarse / fine < 5.0


def test_sine_decay_linear_rate(flat_ng):
    eps, T = 1e-3, 0.1
    bc = BoundaryCondition.dirichlet(None, 0.0, 0.0)
    sol = run_graph_flow(flat_ng, 0.0, 1.0, 64, lambda x: eps * np.sin(np.pi * x), T, bc)
    rate = np.max(np.abs(sol.u)) / eps
    assert rate == pytest.approx(np.exp(-np.pi ** 2 * T), rel=0.05)


def test_periodic_bc_conserves_mean(flat_ng):
    sol = run_graph_flow(flat_ng, 0.0, 2 * np.pi, 64, lambda x: 0.1 * np.sin(x) + 0.3, 0.05,
                         BoundaryCondition.periodic())
    assert np.mean(sol.u) == pytest.approx(0.3, abs=1e-6)


def test_cfl_guard(flat_ng):
    sol = GraphSolution.initial(0.0, 1.0, 16, np.sin, 1.0, BoundaryCondition.dirichlet(None, 0.0, np.sin(1.0)))
    with pytest.raises(CFLViolation):
        graph_flow_step(flat_ng, sol)


def test_blowup_guard():
    metric = flat_normal_gaussian(Domain((-1.0, 2.0), (-1e8, 1e8)))
    bc = BoundaryCondition.dirichlet(None, 0.0, 0.0)
    sol = GraphSolution.initial(0.0, 1.0, 8, lambda x: 1e7 * (x > 0.5), 1e-12, bc)
    with pytest.raises(BlowUp):
        graph_flow_step(metric, sol)


def test_metric_evolution_needs_levels(flat_ng):
    sol = GraphSolution.initial(0.0, 1.0, 16, lambda x: 0 * x, 1e-4, BoundaryCondition.dirichlet())
    with pytest.raises(TooFewTimeLevels):
        metric_evolution_residual(sol, flat_ng)


def test_metric_evolution_stationary_geodesic(flat_ng):
    bc = BoundaryCondition.dirichlet(lambda x, t: 0.5 * x)
    sol = run_graph_flow(flat_ng, 0.0, 1.0, 32, lambda x: 0.5 * x, 1e-3, bc)
    assert metric_evolution_residual(sol, flat_ng) == pytest.approx(0.0, abs=1e-12)


def test_metric_evolution_separates_corruption(flat_ng):
    _, sol = grim_error(flat_ng, 128, T=0.01)
    clean = metric_evolution_residual(sol, flat_ng)
    lv = list(sol.levels)
    lv[-1] = (lv[-1][0], 1.1 * lv[-1][1])
    bad = metric_evolution_residual(dataclasses.replace(sol, levels=tuple(lv)), flat_ng)
    assert bad > 100 * clean


def test_circle_shrinks_at_exact_rate(flat_iso):
    c = run_parametric_flow(flat_iso, circle(128), 0.2, 4e-5)
    r = np.hypot(c.u, c.v)
    assert np.max(np.abs(r - np.sqrt(0.6))) <= 2e-3


def test_straight_line_unchanged(flat_iso):
    x = np.linspace(-1, 1, 41)
    line = Curve(np.column_stack([x, 0.5 * x]))
    out = run_parametric_flow(flat_iso, line, 0.01, 1e-4)
    assert np.max(np.abs(out.v - 0.5 * out.u)) <= 1e-12


def test_ellipse_rounds_off_and_shortens(flat_iso):
    ratios, lengths = [], []

    def record(c):
        ratios.append(isoperimetric_ratio(c))
        lengths.append(c.length())

    run_parametric_flow(flat_iso, ellipse(128, 1.0, 0.5), 0.1, 5e-5, callback=record, record_every=100)
    assert len(ratios) >= 10
    assert np.all(np.diff(ratios) < 0) and np.all(np.diff(lengths) < 0)
    assert ratios[-1] > 4 * np.pi


def test_group_flow_examples():
    assert flow_conformal_field(VectorFieldSpec.from_expressions("1", "0"), (0.0, 0.0), 1.0) == \
        pytest.approx([1.0, 0.0], abs=1e-12)
    assert flow_conformal_field(VectorFieldSpec.from_expressions("u", "v", 1.0), (1.0, 0.0), np.log(2)) == \
        pytest.approx([2.0, 0.0], abs=1e-10)
    assert flow_conformal_field(VectorFieldSpec.from_expressions("v", "-u"), (1.0, 0.0), np.pi / 2) == \
        pytest.approx([0.0, -1.0], abs=1e-10)


def test_map_curve_rotates_circle():
    c = circle(64, 1.0, (1.0, 0.0))
    out = map_curve(VectorFieldSpec.from_expressions("v", "-u"), c, np.pi)
    assert hausdorff_distance(out, circle(64, 1.0, (-1.0, 0.0)), 512) <= 1e-6


def test_conformal_factor_flat_dilation(flat_iso):
    X = VectorFieldSpec.from_expressions("u", "v", 1.0)
    assert conformal_factor_check(flat_iso, X, 1.0, 0.3) <= 1e-6


def test_conformal_factor_family_i_i():
    metric, field = make_conformal_family(FIXTURES["I_i"])
    assert conformal_factor_check(metric, field, 1.0, 0.2) <= 1e-5


def test_conformal_factor_detects_wrong_lambda():
    metric, field = make_conformal_family(FIXTURES["I_i"])
    assert conformal_factor_check(metric, field, 0.5, 0.2) > 0.1


@pytest.mark.parametrize("lam, T, s", [(0.0, 0.3, 0.3), (-1.0, 0.125, -0.5 * np.log(0.75)),
                                       (1.0, 0.5, 0.5 * np.log(2.0))])
def test_self_similarity_time(lam, T, s):
    assert self_similarity_time(lam, T) == pytest.approx(s, rel=1e-14)


def test_self_similarity_time_law():
    # s' = exp(-2 lam s)
    for lam in (-1.0, 0.4, 2.0):
        T, h = 0.1, 1e-6
        ds = (self_similarity_time(lam, T + h) - self_similarity_time(lam, T - h)) / (2 * h)
        assert ds == pytest.approx(np.exp(-2 * lam * self_similarity_time(lam, T)), rel=1e-8)


def test_shrinker_mapped_radius():
    X = VectorFieldSpec.from_expressions("-u", "-v", -1.0)
    img = flow_conformal_field(X, (1.0, 0.0), self_similarity_time(-1.0, 0.125))
    assert img == pytest.approx([np.sqrt(0.75), 0.0], abs=1e-10)


def test_self_similarity_zero_time(flat_iso):
    X = VectorFieldSpec.from_expressions("-u", "-v", -1.0)
    c = integrate_soliton(flat_iso, X, SolitonState(1.0, 0.0, 0.0, 1.0), 2 * np.pi, step=1e-2)
    assert self_similarity_check(flat_iso, X, -1.0, c, 0.0, n_points=64) == 0.0


def test_metric_evolution_residual_on_grim_reaper_is_one(flat_ng):
    # u_x = tan x is time independent and L^2 k^2 = sec^2 x cos^2 x = 1,
    # so |u_x u_xt + L^2 k^2| is 1 at every node for the exact translator
    _, sol = grim_error(flat_ng, 256, T=0.02)
    assert metric_evolution_residual(sol, flat_ng) == pytest.approx(1.0, abs=5e-3)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcf_lab.errors import ManifoldError
from mcf_lab.geometry import flat_normal_gaussian
from mcf_lab.symmetry import (FAIL_TOL, FLAT_NON_SYMMETRIES, FLAT_TABLE, HYPERBOLIC_CANDIDATES, PASS_TOL,
                              JetPoint, SymmetryCandidate, Verdict, apply_prolongation,
                              determining_residuals, homothetic_system_residual, phi1, phi2,
                              prolongation_coeffs, prolongation_residual, sample_manifold_jets, verdict,
                              verify_symmetry)

FLAT = flat_normal_gaussian()
ALL_FLAT = {**{k: (v, True) for k, v in FLAT_TABLE.items()},
            **{k: (v, False) for k, v in FLAT_NON_SYMMETRIES.items()}}


def cand(exprs, name=None):
    tau, xi, eta = exprs
    return SymmetryCandidate.from_expressions(tau, xi, eta, name=name)


def jet(x=0.0, t=0.0, u=0.0, u_x=0.0, u_t=0.0, u_xx=0.0, u_xt=0.0):
    return JetPoint(x, t, u, u_x, u_t, u_xx, u_xt)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_phi1_vanishes_for_flat_graph_flow(u_x, u_xx):
    assert phi1(FLAT, jet(u_x=u_x, u_xx=u_xx, u_t=u_xx / (1 + u_x ** 2))) == pytest.approx(0.0, abs=1e-12)


def test_phi1_examples(flat_ng):
    assert phi1(flat_ng, jet()) == 0.0
    assert phi1(flat_ng, jet(u_t=1.0)) == 1.0


def test_phi2_examples(flat_ng):
    assert phi2(flat_ng, jet(u_x=0.5)) == 0.0
    # u_x = 1, u_xx = 2: L^2 = 2, k^2 = 1/2, so the manifold needs u_xt = -1
    assert phi2(flat_ng, jet(u_x=1.0, u_xx=2.0, u_xt=-1.0)) == pytest.approx(0.0, abs=1e-15)
    assert phi2(flat_ng, jet(u_x=0.0, u_xx=2.0)) == pytest.approx(4.0)


def test_phi_on_hyperbolic(hyperbolic):
    # A = exp(-2u): at u = 0 a horizontal line has k = 1
    assert phi1(hyperbolic, jet()) == pytest.approx(-1.0)
    assert phi2(hyperbolic, jet()) == pytest.approx(1.0)


def test_time_translation_coefficients_vanish():
    assert prolongation_coeffs(cand(("1", "0", "0")), jet(0.1, 0.2, 0.3, 1, 2, 3, 4)) == (0, 0, 0, 0)


def test_dilation_coefficients():
    # pr v for x d_x + u d_u + 2t d_t scales u_x by 0, u_t and u_xx by -1
    j = jet(0.3, 0.1, 0.2, 1.5, 0.7, -2.0, 0.4)
    cx, ct, cxx, cxt = prolongation_coeffs(cand(FLAT_TABLE["parabolic_rescaling"]), j)
    assert (cx, ct, cxx, cxt) == pytest.approx((0.0, -0.7, 2.0, -0.8))


def test_sampled_jets_on_manifold(flat_ng, rng):
    for j in sample_manifold_jets(flat_ng, 50, rng):
        assert j.on_solution_manifold
        assert abs(phi1(flat_ng, j)) <= 1e-12 and abs(phi2(flat_ng, j)) <= 1e-12
        assert 0.1 <= abs(j.u_x) <= 2.0


def test_off_manifold_jet_rejected(flat_ng):
    with pytest.raises(ManifoldError):
        apply_prolongation(flat_ng, cand(FLAT_TABLE["x_translation"]), jet(u_t=1.0))


@pytest.mark.parametrize("name", sorted(FLAT_TABLE))
def test_flat_table_passes(flat_ng, name):
    assert prolongation_residual(flat_ng, cand(FLAT_TABLE[name]), 100, seed=7) <= 1e-8


@pytest.mark.parametrize("name", sorted(FLAT_NON_SYMMETRIES))
def test_flat_non_symmetries_fail(flat_ng, name):
    assert prolongation_residual(flat_ng, cand(FLAT_NON_SYMMETRIES[name]), 100, seed=7) >= 1e-2


def test_time_translation_on_static_metric(hyperbolic, rng):
    c = cand(("1", "0", "0"))
    for j in sample_manifold_jets(hyperbolic, 20, rng):
        assert apply_prolongation(hyperbolic, c, j) == 0.0


@pytest.mark.parametrize("name", sorted(HYPERBOLIC_CANDIDATES))
def test_hyperbolic_candidates(hyperbolic, name):
    exprs, expected = HYPERBOLIC_CANDIDATES[name]
    res = prolongation_residual(hyperbolic, cand(exprs), 100, seed=3)
    assert (res <= 1e-8) if expected else (res >= 1e-2)


def test_determining_examples(flat_ng):
    assert np.all(determining_residuals(flat_ng, cand(FLAT_TABLE["x_translation"])) == 0.0)
    assert np.max(determining_residuals(flat_ng, cand(FLAT_TABLE["parabolic_rescaling"]))) <= 1e-10
    r = determining_residuals(flat_ng, cand(FLAT_NON_SYMMETRIES["u_dx"]))
    assert r[1] == pytest.approx(1.0)


def test_time_dependent_tau_flagged(flat_ng):
    r = determining_residuals(flat_ng, SymmetryCandidate.from_expressions("x", "0", "0"))
    assert r[7] == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(ALL_FLAT))
def test_determining_agrees_with_prolongation(flat_ng, name):
    exprs, _ = ALL_FLAT[name]
    c = cand(exprs)
    det_ok = np.max(determining_residuals(flat_ng, c)) <= 1e-9
    pro_ok = prolongation_residual(flat_ng, c, 100, seed=11) <= 1e-7
    assert det_ok == pro_ok


def test_homothetic_system_examples(flat_ng):
    assert np.all(homothetic_system_residual(flat_ng, cand(("0", "x", "u")), 1.0) <= 1e-12)
    assert np.all(homothetic_system_residual(flat_ng, cand(("0", "-u", "x")), 0.0) <= 1e-12)
    r0 = homothetic_system_residual(flat_ng, cand(("0", "x**2", "0")), 0.0)
    r1 = homothetic_system_residual(flat_ng, cand(("0", "x**2", "0")), 1.0)
    assert r0[0] > 1.0
    # max |4x - 2 lam| over a grid symmetric in x
    assert r1[0] - r0[0] == pytest.approx(2.0)


@pytest.mark.parametrize("value, expected", [(0.0, Verdict.PASS), (PASS_TOL, Verdict.PASS),
                                             (1e-5, Verdict.INDETERMINATE), (FAIL_TOL, Verdict.FAIL),
                                             (3.0, Verdict.FAIL)])
def test_verdict_dead_zone(value, expected):
    assert verdict(value) is expected


def test_prolongation_residual_reproducible(flat_ng):
    c = cand(FLAT_NON_SYMMETRIES["x2_dx"])
    assert prolongation_residual(flat_ng, c, 30, seed=5) == prolongation_residual(flat_ng, c, 30, seed=5)


def test_verify_symmetry_report(flat_ng):
    rep = verify_symmetry(flat_ng, cand(FLAT_TABLE["rotation"], "rotation"))
    assert rep["verdict"] == "pass" and rep["determining_verdict"] == "pass"
    assert len(rep["determining"]) == 8

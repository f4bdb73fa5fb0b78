import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcf_lab.errors import ParamError, SingularDomainError
from mcf_lab.families import (CaseId, ConformalFamily, FIXTURES, make_conformal_family,
                              rational_log_case_ii_rho)
from mcf_lab.fields import Domain, Q_LIBRARY, ScalarField
from mcf_lab.geometry import VectorFieldSpec, lie_derivative_residual


def test_expression_partials_exact():
    f = ScalarField.from_expression("sin(u)*exp(v)")
    j = f(0.3, 0.7)
    assert j.f == pytest.approx(np.sin(0.3) * np.exp(0.7), rel=1e-15)
    assert j.fp == pytest.approx(np.cos(0.3) * np.exp(0.7), rel=1e-15)
    assert j.fqq == pytest.approx(j.f, rel=1e-15)
    assert j.fpq == pytest.approx(j.fp, rel=1e-15)


def test_fd_adapter_matches_analytic():
    exact = ScalarField.from_expression("u**3 + u*v**2")
    fd = ScalarField.from_values(lambda u, v: u ** 3 + u * v ** 2)
    a, b = exact(0.4, -0.8), fd(0.4, -0.8)
    for x, y in zip(a, b):
        assert y == pytest.approx(x, rel=1e-6, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_declared_partials_self_consistent(u, v):
    f = ScalarField.from_expression("v + u**2/10 + cos(u*v)")
    assert f.check_partials(u, v) <= 1e-6


def test_domain_sampling_stays_inside(rng):
    dom = Domain((0.0, 1.0), (-2.0, -1.0))
    p, q = dom.sample(500, rng).T
    assert np.all(dom.contains(p, q))
    assert dom.shrink(0.1).p_range == pytest.approx((0.1, 0.9))


def test_q_library_derivatives():
    q = Q_LIBRARY["quadratic"]
    assert q.f(3.0) == pytest.approx(0.9)
    assert q.df(3.0) == pytest.approx(0.6)
    assert q.d2f(3.0) == pytest.approx(0.2)


def test_case_i_i_linear_gives_rho_u():
    spec = ConformalFamily(CaseId.I_i, lam=1.0, c1=1.0, c2=0.0, Q=Q_LIBRARY["zero"],
                           domain=Domain((-1, 1), (-1, 1)))
    metric, field = make_conformal_family(spec)
    for u, v in [(0.2, -0.5), (-0.7, 0.9)]:
        assert metric.jet(u, v).f == pytest.approx(u, abs=1e-14)
        assert field.phi(u, v).f == pytest.approx(1.0)
        assert field.psi(u, v).f == pytest.approx(0.0)


def test_case_i_iii_killing_rotation():
    spec = ConformalFamily(CaseId.I_iii, lam=0.0, b=1.0, Q=Q_LIBRARY["zero"],
                           domain=Domain((0.5, 1.5), (0.5, 1.5)))
    metric, field = make_conformal_family(spec)
    u, v = 0.8, 1.3
    assert metric.jet(u, v).f == pytest.approx(0.0, abs=1e-14)
    assert field.phi(u, v).f == pytest.approx(v)
    assert field.psi(u, v).f == pytest.approx(-u)


def test_rational_log_case_ii_value_and_defect():
    # closed form evaluated at (0, 1) with lambda = C = 1, D = 0
    assert rational_log_case_ii_rho(0.0, 1.0, 1.0, 1.0) == pytest.approx(2 + 4 * np.log(2), rel=1e-14)
    metric, field = make_conformal_family(FIXTURES["II"])
    from mcf_lab.geometry import SurfaceMetric
    closed_form = SurfaceMetric.isothermal(ScalarField.from_values(lambda u, v: rational_log_case_ii_rho(u, v, 1.0, 1.0)),
                                       metric.domain)
    assert lie_derivative_residual(closed_form, field)[1] > 1e-2


def test_every_fixture_is_homothetic(family, rng):
    _, metric, field = family
    pts = metric.domain.sample(200, rng)
    assert lie_derivative_residual(metric, field, points=pts)[1] <= 1e-9


@pytest.mark.parametrize("kw, err", [
    (dict(case_id=CaseId.I_ii, a=0.0), ParamError),
    (dict(case_id=CaseId.I_iii, b=0.0), ParamError),
    (dict(case_id=CaseId.II, C=-1.0), ParamError),
])
def test_degenerate_parameters(kw, err):
    with pytest.raises(err):
        make_conformal_family(ConformalFamily(**kw))


@pytest.mark.parametrize("spec", [
    ConformalFamily(CaseId.I_ii, a=1.0, c1=0.0, c2=0.0, domain=Domain((-1, 1), (0.5, 1))),
    ConformalFamily(CaseId.I_iii, b=1.0, c1=0.0, c2=0.0, domain=Domain((-1, 1), (-1, 1))),
    ConformalFamily(CaseId.II, C=1.0, domain=Domain((-1, 1), (-1, 1))),
])
def test_singular_loci_rejected(spec):
    with pytest.raises(SingularDomainError):
        make_conformal_family(spec)


def test_field_aliases():
    X = VectorFieldSpec.from_expressions("-u", "-v", -1.0)
    assert X.phi(2.0, 3.0).f == -2.0 and X.xi(2.0, 3.0).f == -2.0
    assert X.psi(2.0, 3.0).f == -3.0 and X.eta(2.0, 3.0).f == -3.0
    assert X.lam == -1.0

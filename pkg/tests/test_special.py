import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel
from oracles.values import VALUES
from qconv.errors import DomainError, PoleError
from qconv.lattice import LatticePoint
from qconv.qcore import QContext
from qconv.special import (E_q, E_q_series, Kind, SpecialFunction, e_q, eval_special, hermite_II,
                           kernel_K, log_special, make_function, parse_function_name,
                           rodrigues_gaussian_derivative, scaled_hermite_logs, taylor_series)

GAUSS = SpecialFunction(Kind.GAUSS_SMALL)


@pytest.mark.parametrize("q", [0.5, 0.7])
def test_values_against_product_oracle(q):
    ctx = QContext(q)
    assert rel(e_q(0.3, ctx), VALUES[f"eq_0.3_{q}"].real) < 1e-13
    assert rel(E_q(-2.5 + 0.5j, ctx), VALUES[f"Eq_m2.5+0.5i_{q}"]) < 1e-12
    assert rel(eval_special(GAUSS, 1.7, ctx), VALUES[f"gauss_e_1.7_{q}"].real) < 1e-13
    assert rel(eval_special(SpecialFunction(Kind.GAUSS_BIG), 3.1, ctx),
               VALUES[f"gauss_E_3.1_{q}"].real) < 1e-13
    assert rel(eval_special(SpecialFunction(Kind.STRIP_EXAMPLE, 0.4), 1.3, ctx),
               VALUES[f"strip_1.3_{q}"].real) < 1e-14


def test_cancelling_series_far_out():
    """The alternating Gaussian series loses hundreds of digits at large |x|."""
    ctx = QContext(0.5)
    f = make_function(SpecialFunction(Kind.GAUSS_CAL), 1.0, ctx)
    assert rel(f(LatticePoint(1, -6, 1.0, 0.5)), VALUES["gauss_cal_k-6_0.5"].real) < 1e-12
    assert rel(f(LatticePoint(-1, -12, 1.0, 0.5)), VALUES["gauss_cal_k-12_0.5"].real) < 1e-12
    # a plain float on the lattice is snapped to the exact point
    assert rel(f(0.5 ** -6), VALUES["gauss_cal_k-6_0.5"].real) < 1e-12
    ctx7 = QContext(0.7)
    f7 = make_function(SpecialFunction(Kind.GAUSS_CAL), 1.0, ctx7)
    assert rel(f7(LatticePoint(1, -8, 1.0, 0.7)), VALUES["gauss_cal_k-8_0.7"].real) < 1e-12


def test_gm_values():
    ctx = QContext(0.5)
    g2 = make_function(SpecialFunction(Kind.G_M, 2), 1.0, ctx)
    g0 = make_function(SpecialFunction(Kind.G_M, 0), 1.0, ctx)
    assert rel(g2(LatticePoint(1, -3, 1.0, 0.5)), VALUES["gm2_k-3_0.5"].real) < 1e-12
    assert rel(g0(1.0), VALUES["gm0_k0_0.5"].real) < 1e-12


def test_E_q_product_and_series_agree(ctx5):
    for x in (0.3, -1.7, 2.0 + 1.0j, 5.0):
        assert rel(E_q(x, ctx5), E_q_series(x, ctx5)) < 1e-12


def test_lattice_zeros_are_exact(ctx5):
    big = make_function(SpecialFunction(Kind.GAUSS_BIG), 1.0, ctx5)
    eq = make_function(SpecialFunction(Kind.E_Q_BIG), 1.0, ctx5)
    assert big(LatticePoint(1, -3, 1.0, 0.5)) == 0
    assert eq(-4.0) == 0
    assert log_special(SpecialFunction(Kind.GAUSS_BIG), 2.0, ctx5).real == float("-inf")


def test_poles_raise(ctx5):
    with pytest.raises(PoleError):
        e_q(2.0, ctx5)
    with pytest.raises(PoleError):
        eval_special(GAUSS, 1j, ctx5)


def test_alt_lives_on_L1(ctx5):
    with pytest.raises(DomainError):
        make_function(SpecialFunction(Kind.ALT_EXAMPLE), 0.5, ctx5)
    a = make_function(SpecialFunction(Kind.ALT_EXAMPLE), 1.0, ctx5)
    assert a(0.25) > 0 and a(0.5) < 0 and a(-0.5) < 0
    with pytest.raises(DomainError):
        a(0.3)


def test_parse_function_name():
    assert parse_function_name("gm:2") == SpecialFunction(Kind.G_M, 2)
    assert parse_function_name("strip:0.5") == SpecialFunction(Kind.STRIP_EXAMPLE, 0.5)
    for bad in ("nope", "gm", "gm:x", "gauss_e:3", "strip"):
        with pytest.raises(DomainError):
            parse_function_name(bad)


@pytest.mark.parametrize("q", [0.5, 0.7])
def test_hermite_at_i(q):
    ctx = QContext(q)
    for k in range(13):
        assert rel(hermite_II(k, 1j, ctx), 1j ** k * q ** (-k * (k - 1) / 2)) < 1e-12


def test_hermite_recurrence_matches_explicit_sum(ctx7):
    logs = scaled_hermite_logs(0.37, 10, ctx7)
    for n in range(11):
        s = hermite_II(n, 0.37, ctx7) * 0.7 ** ((n * n - n) / 2)
        assert rel(cmath.exp(logs[n]), s) < 1e-11


def test_kernel_at_i(qg):
    ctx, _ = qg
    for t in (0.3, -0.7, 1.0, 2.5):
        assert rel(kernel_K(t, 1j, ctx), E_q(1j * ctx.q * t, ctx)) < 1e-10


def test_rodrigues_against_stencil(qg):
    ctx, gamma = qg
    g = make_function(GAUSS, gamma, ctx, closed_form_derivatives=False)
    for k_idx in (-1, 0, 2):
        x = LatticePoint(1, k_idx, gamma, ctx.q)
        d = g.derivatives(x, 5, ctx, method="stencil")
        for k in (1, 3, 5):
            assert rel(d[k], rodrigues_gaussian_derivative(k, x.value, ctx)) < 1e-8


@pytest.mark.parametrize("kind,param", [(Kind.GAUSS_SMALL, None), (Kind.E_Q_BIG, None),
                                        (Kind.E_Q_SMALL, None), (Kind.GAUSS_BIG, None),
                                        (Kind.GAUSS_CAL, None), (Kind.G_M, 2),
                                        (Kind.STRIP_EXAMPLE, 0.3)])
def test_taylor_series_matches_evaluation(kind, param, ctx7):
    sf = SpecialFunction(kind, param)
    ps = taylor_series(sf, ctx7)
    for x in (0.3, -0.6, 0.5j):
        assert abs(ps(x) - complex(eval_special(sf, x, ctx7))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(x=st.floats(min_value=-0.9, max_value=0.9))
def test_exponentials_are_reciprocal(x):
    """e_q(x) E_q(-x) = 1 inside the disc of e_q."""
    ctx = QContext(0.6)
    assert abs(e_q(x, ctx) * E_q(-x, ctx) - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(x=st.floats(min_value=-0.9, max_value=0.9))
def test_small_exponential_functional_equation(x):
    """e_q(x) - e_q(qx) = x e_q(x)."""
    ctx = QContext(0.55)
    lhs = e_q(x, ctx) - e_q(0.55 * x, ctx)
    assert abs(lhs - x * e_q(x, ctx)) < 1e-12 * max(1.0, abs(e_q(x, ctx)))


def test_series_coefficients_are_finite(ctx5):
    for sf in (GAUSS, SpecialFunction(Kind.GAUSS_CAL)):
        assert np.all(np.isfinite(taylor_series(sf, ctx5).coefficients))


@pytest.mark.parametrize("t,x", [(0.3, 0.7), (-1.2, 0.4), (2.0, -1.5), (0.5, 0.25 + 0.5j)])
def test_kernel_against_basic_hypergeometric_form(t, x):
    """K(t, x) = (iqt; q)_inf 1phi1(ix; iqt; q, -iqt), with mpmath's qhyper as the oracle."""
    import mpmath

    q = 0.5
    b = 1j * q * t
    ref = complex(mpmath.qp(b, q) * mpmath.qhyper([1j * x], [b], q, -1j * q * t))
    assert rel(kernel_K(t, x, QContext(q)), ref) < 1e-13

import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel
from oracles.values import VALUES
from qconv.errors import CapExceeded, DivergentSeries, InsufficientData, NotOfLeftType
from qconv.lattice import LatticeFunction, Parity, q_integral_unbounded
from qconv.moments import (MomentSequence, TypeKind, classify_type, derivative_moment,
                           derivative_moment_sequence, moment, moment_sequence,
                           pointwise_decay_check, strict_moment, xk_multiplied_moment)
from qconv.qcore import QContext, q_factorial
from qconv.special import (Kind, SpecialFunction, gauss_big_moment_closed_form,
                           gaussian_moment_closed_form, gm_moment_closed_form, make_function)

GAUSS = SpecialFunction(Kind.GAUSS_SMALL)


def test_gm1_zeroth_moment_oracle(ctx5):
    f = make_function(SpecialFunction(Kind.G_M, 1), 1.0, ctx5)
    assert rel(moment(f, 0, 1.0, ctx5), VALUES["mu0_gm1_0.5"].real) < 1e-10


def test_gaussian_moments_closed_form(qg):
    ctx, gamma = qg
    ms = moment_sequence(make_function(GAUSS, gamma, ctx), 16, gamma, ctx)
    for e in range(17):
        want = gaussian_moment_closed_form(e, gamma, ctx)
        if want == 0:
            assert ms.mu(e) == 0
        else:
            assert rel(ms.mu(e), want) < 1e-9
    # positive function: strict moments equal moments
    assert rel(ms.nu(4), ms.mu(4).real) < 1e-12


def test_gauss_big_moments_corrected_form(ctx7):
    f = make_function(SpecialFunction(Kind.GAUSS_BIG), 1.0, ctx7)
    ms = moment_sequence(f, 12, 1.0, ctx7)
    for k in range(7):
        assert rel(ms.mu(2 * k), gauss_big_moment_closed_form(2 * k, ctx7)) < 1e-9


def test_gm_moments_vanish_above_m(ctx5):
    m = 2
    f = make_function(SpecialFunction(Kind.G_M, m), 1.0, ctx5)
    ms = moment_sequence(f, 10, 1.0, ctx5)
    for e in range(11):
        want = gm_moment_closed_form(m, e, 1.0, ctx5)
        if want == 0:
            assert abs(ms.mu(e)) <= 1e-10 * ms.nu(e)
        else:
            assert rel(ms.mu(e), want) < 1e-9


def test_alt_moments_vanish(ctx5):
    f = make_function(SpecialFunction(Kind.ALT_EXAMPLE), 1.0, ctx5)
    ms = moment_sequence(f, 10, 1.0, ctx5)
    for e in range(11):
        assert ms.nu(e) > 0
        assert abs(ms.mu(e)) <= 1e-10 * ms.nu(e)


def test_derivative_moments(ctx5):
    """mu_{e+1}(d f) = -[e+1]_q mu_e(f), checked against a direct computation."""
    g = make_function(GAUSS, 1.0, ctx5)
    dg = LatticeFunction.from_rule(
        lambda x: (g(x) - g(0.5 * x)) / (0.5 * x), 1.0, parity=Parity.ODD)
    ms = moment_sequence(g, 10, 1.0, ctx5)
    dms = moment_sequence(dg, 9, 1.0, ctx5)
    for e in range(0, 8, 2):
        assert rel(dms.mu(e + 1), derivative_moment(ms, e, 1)) < 1e-9
    seq = derivative_moment_sequence(ms, 1)
    assert rel(seq.mu(5), derivative_moment(ms, 4, 1)) < 1e-12
    assert derivative_moment(ms, -1, 1) == 0


def test_xk_multiplied_moments(ctx5):
    g = make_function(GAUSS, 1.0, ctx5)
    ms = moment_sequence(g, 12, 1.0, ctx5)
    gx2 = LatticeFunction.from_rule(lambda x: g(x) * x * x, 1.0, parity=Parity.EVEN)
    assert rel(moment(gx2, 2, 1.0, ctx5), xk_multiplied_moment(ms, 2, 2)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(e=st.integers(0, 6), k=st.integers(0, 4))
def test_derivative_moment_factorial_ratio(e, k):
    ctx = QContext(0.6)
    ms = MomentSequence.from_values(lambda n: 1.0, 1.0, ctx, 12)
    want = (-1) ** k * q_factorial(e + k, ctx) / q_factorial(e, ctx)
    assert rel(derivative_moment(ms, e, k), want) < 1e-12


def test_moment_errors(ctx5):
    one = LatticeFunction.from_rule(lambda x: 1.0, 1.0)
    with pytest.raises((CapExceeded, DivergentSeries)):
        moment(one, 0, 1.0, ctx5)
    with pytest.raises((CapExceeded, DivergentSeries)):
        strict_moment(one, 1, 1.0, ctx5)


@pytest.mark.parametrize("kind,gamma,alpha", [
    (Kind.GAUSS_SMALL, None, 0.5), (Kind.GAUSS_BIG, 1.0, 1.0), (Kind.GAUSS_CAL, 1.0, 0.75)])
def test_classify_special_functions(kind, gamma, alpha, qg):
    ctx, g0 = qg
    gamma = gamma or g0
    ms = moment_sequence(make_function(SpecialFunction(kind), gamma, ctx), 40, gamma, ctx)
    tc = classify_type(ms, TypeKind.STRICT_LEFT)
    assert abs(tc.alpha_hat - alpha) < 0.05
    assert json.loads(json.dumps(tc.to_dict()))["kind"] == "STRICT_LEFT"


def test_classify_rejects_non_gaussian(ctx5):
    ms = MomentSequence.from_values(lambda e: math.exp(math.sin(3 * e) * 40), 1.0, ctx5, 30)
    with pytest.raises(NotOfLeftType):
        classify_type(ms, TypeKind.LEFT)
    short = MomentSequence.from_values(lambda e: 1.0, 1.0, ctx5, 4)
    with pytest.raises(InsufficientData):
        classify_type(short, TypeKind.LEFT)


def test_strip_decay_matches_type(ctx5):
    c = 0.4
    f = make_function(SpecialFunction(Kind.STRIP_EXAMPLE, c), 1.0, ctx5)
    rate = 8 * c * math.log(2)
    alpha = 1 - 1 / rate
    rep = pointwise_decay_check(f, 1.0, alpha, 24, ctx5)
    assert rep.forward_holds and rep.converse_holds
    assert abs(rep.alpha_implied - alpha) < 0.02
    ms = moment_sequence(f, 40, 1.0, ctx5)
    assert abs(classify_type(ms).alpha_hat - alpha) < 0.05


def test_moment_json_is_finite(ctx5):
    ms = moment_sequence(make_function(GAUSS, 1.0, ctx5), 6, 1.0, ctx5)
    d = json.loads(ms.to_json())
    assert len(d["entries"]) == 7 and d["entries"][1]["mu_re"] == 0.0


def test_zeroth_moment_is_integral(ctx7):
    f = make_function(SpecialFunction(Kind.STRIP_EXAMPLE, 0.3), 0.5, ctx7)
    assert rel(moment(f, 0, 0.5, ctx7), q_integral_unbounded(f, 0.5, ctx7).value) < 1e-14

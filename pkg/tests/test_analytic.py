import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qconv.analytic import (bounds_dps, certify_bounds, derivative_limits, limits_dps,
                            limits_window, reconstruct_series, search_bounds, series_table,
                            tail_integral_table, taylor_identity_residual)
from qconv.errors import DomainError, EpsilonMismatch, NonConvergent, WindowExceeded
from qconv.lattice import LatticeFunction
from qconv.powerseries import PowerSeries
from qconv.qcore import QContext, constant_cq, q_factorial
from qconv.special import E_q_series_coefficients, Kind, SpecialFunction, make_function

EQ = SpecialFunction(Kind.E_Q_BIG)
ALT = SpecialFunction(Kind.ALT_EXAMPLE)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_tail_integral_table_is_constant(qg):
    ctx, gamma = qg
    t = tail_integral_table(gamma, -3, limits_window(4, ctx.q), ctx)
    dl = derivative_limits(t, 4, ctx)
    assert _rel(dl.l[0], constant_cq(gamma, ctx)) < 1e-12
    assert all(abs(v) < 1e-12 for v in dl.l[1:])
    ps = reconstruct_series(dl)
    assert _rel(ps(0.3), constant_cq(gamma, ctx)) < 1e-12


@pytest.mark.parametrize("q", [0.5, 0.7])
def test_E_q_reconstruction(q):
    ctx = QContext(q)
    P = 11
    k_hi = limits_window(P, q)
    tab = make_function(EQ, 1.0, ctx).sample(-3, k_hi, ctx, precision=limits_dps(P, k_hi, q))
    dl = derivative_limits(tab, P, ctx)
    ref = E_q_series_coefficients(ctx, P + 1).coefficients
    got = reconstruct_series(dl).coefficients
    for k in range(P):
        assert _rel(got[k], ref[k]) < 1e-8
    assert max(dl.drift_bound[:P]) < 1e-9


@settings(max_examples=10, deadline=None)
@given(coeffs=st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=5),
       q=st.sampled_from([0.4, 0.6]))
def test_polynomial_round_trip(coeffs, q):
    """Sampling a polynomial and reconstructing from the limits gives back its coefficients."""
    ctx = QContext(q)
    P = len(coeffs) + 1
    k_hi = limits_window(P, q)
    tab = series_table(PowerSeries(coeffs, np.inf), 1.0, -2, k_hi, ctx,
                       dps=limits_dps(P, k_hi, q))
    got = reconstruct_series(derivative_limits(tab, P, ctx)).coefficients
    want = list(coeffs) + [0.0] * (P + 1 - len(coeffs))
    for a, b in zip(got, want):
        assert abs(a - b) < 1e-9 * (1 + max(map(abs, coeffs)))


def test_limits_are_scaled_coefficients(ctx5):
    tab = series_table(PowerSeries([0.0, 0.0, 2.0], np.inf), 1.0, -2, 60, ctx5, dps=80)
    dl = derivative_limits(tab, 3, ctx5)
    assert abs(dl.l[2] - 2.0 * q_factorial(2, ctx5)) < 1e-10


def test_side_mismatch(ctx5):
    n = 50
    tab = LatticeFunction.from_values(1.0, 0, [1.0] * n, [2.0] * n)
    dl = derivative_limits(tab, 2, ctx5)
    assert not dl.epsilons_agree()
    with pytest.raises(EpsilonMismatch):
        reconstruct_series(dl)
    assert reconstruct_series(dl, side=1).coefficients[0] == 1.0
    assert reconstruct_series(dl, side=-1).coefficients[0] == 2.0
    with pytest.raises(DomainError):
        reconstruct_series(dl, side=0)


@pytest.mark.parametrize("q", [0.5, 0.7])
def test_alternating_example_has_no_extension(q):
    ctx = QContext(q)
    k_max, k_hi = 8, 30
    dps = bounds_dps(k_max, k_hi, q)
    alt = make_function(ALT, 1.0, ctx).sample(-4, k_hi, ctx, precision=dps)
    with pytest.raises(NonConvergent):
        derivative_limits(alt, 3, ctx)
    gs = search_bounds(alt, k_max, ctx)
    assert not gs.any_holds and gs.best.worst_ratio > 1e6
    control = make_function(EQ, 1.0, ctx).sample(-4, k_hi, ctx, precision=dps)
    assert search_bounds(control, k_max, ctx).any_holds


def test_certificate(ctx5):
    e = make_function(EQ, 1.0, ctx5).sample(-4, 30, ctx5, precision=bounds_dps(6, 30, 0.5))
    cert = certify_bounds(e, 2.0, 1e4, 6, ctx5)
    d = json.loads(cert.to_json())
    assert set(d) == {"r", "C", "k_max", "holds", "worst_ratio", "epsilon_agreement"}
    assert d["holds"] is (d["worst_ratio"] <= 1.0)
    with pytest.raises(DomainError):
        certify_bounds(e, 0.5, 1.0, 6, ctx5)
    with pytest.raises(DomainError):
        certify_bounds(e, 2.0, 0.0, 6, ctx5)
    with pytest.raises(WindowExceeded):
        certify_bounds(e, 2.0, 1.0, 60, ctx5)
    with pytest.raises(DomainError):
        certify_bounds(make_function(EQ, 1.0, ctx5), 2.0, 1.0, 2, ctx5)


@settings(max_examples=30, deadline=None)
@given(vals=st.lists(st.floats(-5, 5, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
                     min_size=24, max_size=24),
       eps=st.sampled_from([1, -1]), k=st.integers(0, 8), n=st.integers(0, 10),
       q=st.sampled_from([0.5, 0.7]))
def test_finite_taylor_identity(vals, eps, k, n, q):
    """The finite Taylor identity holds for arbitrary lattice data."""
    ctx = QContext(q)
    tab = LatticeFunction.from_values(1.0, 0, vals[:12] + vals[:12], vals[12:] + vals[12:])
    assert taylor_identity_residual(tab, eps, k, n, ctx) < 1e-10


def test_taylor_identity_window(ctx5):
    tab = LatticeFunction.from_values(1.0, 0, [1.0] * 5, [1.0] * 5)
    with pytest.raises(WindowExceeded):
        taylor_identity_residual(tab, 1, 2, 5, ctx5)


def test_certified_bound_gives_matching_series(ctx5):
    """A bound that holds with margin plus agreeing sides: the rebuilt series matches the table."""
    q, P, k_max = 0.5, 11, 8
    k_hi = limits_window(P, q)
    dps = max(limits_dps(P, k_hi, q), bounds_dps(k_max, k_hi, q))
    tab = make_function(EQ, 1.0, ctx5).sample(-3, k_hi, ctx5, precision=dps)
    best = search_bounds(tab, k_max, ctx5).best
    assert best.holds and best.worst_ratio < 0.9
    dl = derivative_limits(tab, P, ctx5)
    assert dl.epsilons_agree()
    ps = reconstruct_series(dl)
    for eps in (1, -1):
        for k in range(0, 12):
            x = eps * q ** k
            if abs(x) < best.r:
                assert _rel(ps(x), tab.value_at(eps, k, ctx5)) < 1e-8

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel
from qconv.errors import DomainError, WindowExceeded, ZeroPoint
from qconv.lattice import (LatticeFunction, LatticePoint, Parity, Status, bilateral_sum, locate,
                           q_derivative, q_integral_bounded, q_integral_unbounded, q_shift,
                           read_table_csv, write_table_csv)
from qconv.qcore import QContext, q_number
from qconv.special import Kind, SpecialFunction, make_function


def power(n, gamma=1.0):
    return LatticeFunction.from_rule(lambda x: complex(x) ** n, gamma, name=f"x^{n}")


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 8), q=st.floats(0.2, 0.9), x=st.floats(0.1, 3.0))
def test_derivative_of_monomial(n, q, x):
    """d x^n = [n]_q x^(n-1)."""
    ctx = QContext(q)
    d = q_derivative(power(n), x, 1, ctx)
    assert abs(d - q_number(n, ctx) * x ** (n - 1)) < 1e-10 * max(1.0, x ** n)


def test_higher_derivative_of_monomial(ctx7):
    d = q_derivative(power(5), 0.8, 3, ctx7)
    want = q_number(5, ctx7) * q_number(4, ctx7) * q_number(3, ctx7) * 0.8 ** 2
    assert rel(d, want) < 1e-10


def test_derivative_at_zero_needs_series(ctx5):
    with pytest.raises(ZeroPoint):
        q_derivative(power(2), 0.0, 1, ctx5)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_bounded_integral_of_monomials(q):
    """int_{-1}^{1} x^(2n) d_q x = 2 (1-q) / (1-q^(2n+1))."""
    ctx = QContext(q)
    for n in range(5):
        res = q_integral_bounded(power(2 * n), 1.0, ctx)
        assert res.status == Status.CONVERGED
        assert rel(res.value, 2 * (1 - q) / (1 - q ** (2 * n + 1))) < 1e-12
        assert abs(q_integral_bounded(power(2 * n + 1), 1.0, ctx).value) < 1e-14


def test_unbounded_integral_divergence_is_reported(ctx5):
    res = q_integral_unbounded(power(0), 1.0, ctx5)
    assert res.status in (Status.DIVERGENT, Status.CAPPED)


def test_integral_on_other_lattice(ctx5):
    """A rule integrated over L(gamma') uses the points of L(gamma'), not its home lattice."""
    g = LatticeFunction.from_rule(lambda x: math.exp(-x * x), 1.0, parity=Parity.EVEN)
    direct = sum((1 - 0.5) * 0.5 ** k * 0.7 * 2 * math.exp(-(0.5 ** k * 0.7) ** 2)
                 for k in range(-10, 80))
    assert rel(q_integral_unbounded(g, 0.7, ctx5).value, direct) < 1e-12


def test_bilateral_sum_geometric_peak(ctx5):
    """Terms growing geometrically before a peak are not flagged divergent."""
    res = bilateral_sum(lambda k: (complex(-abs(k) * 0.2), -abs(k) * 0.2), ctx5)
    assert res.status == Status.CONVERGED
    want = (1 + math.exp(-0.2)) / (1 - math.exp(-0.2))
    assert rel(res.value, want) < 1e-10


def test_q_shift_rule_and_table(ctx5):
    g = make_function(SpecialFunction(Kind.GAUSS_SMALL), 1.0, ctx5)
    sg = q_shift(g, 2, ctx5)
    assert rel(sg(0.8), g(0.8 * 0.25)) < 1e-14
    t = g.sample(-3, 5, ctx5)
    st_ = q_shift(t, 1)
    assert rel(st_(LatticePoint(1, 0, 1.0, 0.5)), g(0.5)) < 1e-14
    with pytest.raises(DomainError):
        q_shift(g, 1)


def test_table_window_and_points(ctx5):
    t = make_function(SpecialFunction(Kind.GAUSS_SMALL), 1.0, ctx5).sample(-2, 4, ctx5)
    with pytest.raises(WindowExceeded):
        t.value_at(1, 9, ctx5)
    with pytest.raises(DomainError):
        t(0.3)
    assert locate(0.125, 1.0, ctx5) == (1, 3)
    assert locate(-4.0, 1.0, ctx5) == (-1, -2)
    assert locate(0.3, 1.0, ctx5) is None


def test_csv_round_trip(tmp_path, ctx7):
    f = make_function(SpecialFunction(Kind.STRIP_EXAMPLE, 0.3), 0.5, ctx7).sample(-6, 20, ctx7)
    p = tmp_path / "t.csv"
    write_table_csv(f, p)
    g = read_table_csv(p, 0.5)
    for eps in (1, -1):
        for k in range(-6, 21):
            assert g.value_at(eps, k, ctx7) == f.value_at(eps, k, ctx7)
    p.write_text("a,b\n1,2\n")
    with pytest.raises(DomainError):
        read_table_csv(p, 0.5)


def test_bad_inputs():
    with pytest.raises(DomainError):
        LatticeFunction.from_rule(lambda x: x, -1.0)
    with pytest.raises(DomainError):
        LatticePoint(2, 0, 1.0, 0.5)
    with pytest.raises(DomainError):
        LatticeFunction.from_values(1.0, 0, [1.0, np.nan], [1.0, 1.0])

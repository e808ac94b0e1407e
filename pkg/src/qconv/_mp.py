"""Extended precision helpers built on mpmath.

Double precision is the default everywhere.  These helpers are used where
the lattice difference quotients of high order cancel catastrophically:
the order-``E`` quotient divides by ``q^{E(E-1)/2}``, so its working
precision has to grow with ``E``.
"""

from __future__ import annotations

import math

import mpmath
from mpmath import mp


def stencil_dps(order: int, x_abs: float, q: float, base_dps: int = 25) -> int:
    """Decimal digits needed for an order-``order`` difference quotient at ``x``."""
    if order <= 0:
        return base_dps
    growth = order * math.log10(2.0 / ((1 - q) * x_abs)) if x_abs > 0 else 0.0
    shift = order * (order - 1) / 2 * math.log10(1.0 / q)
    return int(base_dps + max(growth, 0.0) + shift) + 5


def mp_qp(a, q, n=None):
    """``(a; q)_n`` at the current mpmath precision, ``n=None`` meaning infinity."""
    a = mp.mpmathify(a)
    q = mp.mpf(q)
    p = mp.mpf(1)
    if n is not None:
        t = a
        for _ in range(int(n)):
            p *= 1 - t
            t *= q
        return p
    if a == 0:
        return p
    eps = mp.mpf(2) ** (-mp.prec - 10)
    t = a
    j = 0
    while abs(t) > eps or j < 3:
        p *= 1 - t
        t *= q
        j += 1
    return p


def difference_row(row, x, q):
    """All lattice q-derivatives at ``x`` from the values ``row[j] = f(q^j x)``.

    Returns ``[f(x), (d f)(x), ..., (d^E f)(x)]`` where ``E = len(row) - 1``,
    computed with the arithmetic type of the inputs (mpmath or complex).
    """
    row = list(row)
    out = [row[0]]
    one_minus_q = 1 - q
    scale = one_minus_q * x
    while len(row) > 1:
        nxt = []
        s = scale
        for j in range(len(row) - 1):
            nxt.append((row[j] - row[j + 1]) / s)
            s *= q
        row = nxt
        out.append(row[0])
    return out


def to_complex_log(v) -> complex:
    """Complex logarithm of an mpmath (or Python) number as a double complex."""
    if v == 0:
        return complex(-math.inf, 0.0)
    lv = mpmath.log(v)
    return complex(float(mpmath.re(lv)), float(mpmath.im(lv)))

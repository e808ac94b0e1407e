"""Truncated power series with a radius-of-convergence estimate."""

from __future__ import annotations

import math

import numpy as np

from .qcore import QContext

INFINITE = math.inf


def estimate_radius(coefficients) -> float:
    """Estimate the radius of convergence from the tail half of the list.

    Uses ``min |c_l|^{-1/l}`` over the nonzero tail coefficients.  A list whose
    tail is identically zero is a polynomial (infinite radius); a tail whose
    root test values keep growing by more than a factor 2 across the tail is
    read as an entire function.
    """
    c = np.asarray(coefficients, dtype=complex)
    n = len(c)
    if n == 0:
        return INFINITE
    lo = max(1, n // 2)
    ls = [l for l in range(lo, n) if c[l] != 0]
    if not ls:
        return INFINITE
    r = [math.exp(-math.log(abs(c[l])) / l) for l in ls]
    if len(r) >= 3 and r[-1] > 2 * r[0] and all(b >= a for a, b in zip(r, r[1:])):
        return INFINITE
    return min(r)


class PowerSeries:
    """``sum_l c_l x^l`` with ``c_0 .. c_L`` stored as a complex array."""

    def __init__(self, coefficients, radius_estimate: float | None = None):
        self.coefficients = np.asarray(coefficients, dtype=complex)
        if self.coefficients.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if radius_estimate is None:
            radius_estimate = estimate_radius(self.coefficients)
        self.radius_estimate = float(radius_estimate)

    def __len__(self):
        return len(self.coefficients)

    def __repr__(self):
        return f"PowerSeries(L={len(self) - 1}, radius={self.radius_estimate:.4g})"

    def __call__(self, x):
        acc = 0j
        for c in self.coefficients[::-1]:
            acc = acc * x + c
        return acc

    def q_derivative(self, order: int, ctx: QContext) -> "PowerSeries":
        """Coefficient-shift form of ``d^order``: ``d x^l = [l]_q x^{l-1}``."""
        c = self.coefficients.copy()
        q = ctx.q
        for _ in range(order):
            if len(c) <= 1:
                c = np.zeros(1, dtype=complex)
                break
            l = np.arange(1, len(c))
            c = c[1:] * (1 - q ** l) / (1 - q)
        return PowerSeries(c, self.radius_estimate)

    def derivatives_at(self, x, order: int, ctx: QContext) -> list:
        """``[(d^e s)(x) for e = 0..order]`` by repeated coefficient shifts."""
        out = []
        s = self
        for e in range(order + 1):
            out.append(s(x))
            if e < order:
                s = s.q_derivative(1, ctx)
        return out

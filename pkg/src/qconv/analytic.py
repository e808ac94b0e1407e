"""Analytic extension of lattice functions from q-derivative bounds.

A function known on ``L(gamma)`` extends to an analytic function on
``|x| < r`` when its q-derivatives obey

    |d^k g(eps q^t gamma)| <= C r / ((r - q^t gamma) r^k (1-q)^k)

for every ``t`` with ``q^t gamma < r``.  The extension is then
``sum_k l_k x^k / [k]_q!`` with ``l_k`` the limit of ``d^k g`` at the
small end of the lattice.  This module checks the bound on a finite
table, estimates the limits and rebuilds the series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp

from ._mp import difference_row
from .errors import DomainError, EpsilonMismatch, NonConvergent, WindowExceeded
from .lattice import LatticeFunction, Table
from .powerseries import PowerSeries, estimate_radius
from .qcore import QContext, q_factorial

DRIFT_TOL = 1e-9
EPSILON_TOL = 1e-8


def _require_table(g: LatticeFunction) -> Table:
    if not g.is_table:
        raise DomainError("this operation works on sampled tables")
    return g.table


def _row_derivatives(table: Table, eps: int, t: int, order: int, q: float) -> list:
    """``[d^0 g, .., d^order g]`` at ``eps q^t gamma`` from the stored values.

    mpmath tables are differenced at their own precision, double tables in
    complex arithmetic.
    """
    row = [table.get(eps, t + j) for j in range(order + 1)]
    if table.precision:
        with mp.workdps(max(table.precision, 20)):
            x = mp.mpf(eps) * mp.mpf(q) ** t * mp.mpf(table.gamma)
            return [complex(v) for v in difference_row(row, x, mp.mpf(q))]
    x = eps * q ** t * table.gamma
    return difference_row([complex(v) for v in row], x, q)


# -- bound certificates -----------------------------------------------------


@dataclass
class BoundCertificate:
    r: float
    C: float
    checked_orders: int
    checked_indices: tuple
    holds: bool
    worst_ratio: float
    worst_at: tuple = ()
    epsilon_agreement: float | None = None

    def to_dict(self) -> dict:
        return {"r": self.r, "C": self.C, "k_max": self.checked_orders,
                "holds": self.holds, "worst_ratio": self.worst_ratio,
                "epsilon_agreement": self.epsilon_agreement}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class _DerivativeGrid:
    """``|d^k g(eps q^t gamma)|`` for every (eps, t, k) with a full stencil."""

    gamma: float
    q: float
    k_max: int
    t_lo: int
    t_hi: int
    rows: list = field(default_factory=list)  # (eps, t, x, [|d^0|, .., |d^k_max|])

    def ratio(self, r: float, C: float) -> tuple:
        """Worst ``|d^k g| / bound`` over the grid and the (eps, t, k) attaining it."""
        worst, where = 0.0, ()
        one_minus_q = 1 - self.q
        for eps, t, x, mags in self.rows:
            if x >= r:
                continue
            base = (r - x) / (C * r)
            scale = 1.0
            for k, m in enumerate(mags):
                v = m * base * scale
                if v > worst:
                    worst, where = v, (eps, t, k)
                scale *= r * one_minus_q
        return float(worst), where


def _derivative_grid(g: LatticeFunction, k_max: int, ctx: QContext) -> _DerivativeGrid:
    table = _require_table(g)
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    if table.k_hi - table.k_lo < k_max:
        raise WindowExceeded(
            f"order {k_max} needs {k_max + 1} consecutive indices, window has "
            f"{table.k_hi - table.k_lo + 1}")
    q = ctx.q
    grid = _DerivativeGrid(table.gamma, q, k_max, table.k_lo, table.k_hi - k_max)
    for eps in (1, -1):
        for t in range(grid.t_lo, grid.t_hi + 1):
            d = _row_derivatives(table, eps, t, k_max, q)
            grid.rows.append((eps, t, q ** t * table.gamma, [abs(v) for v in d]))
    return grid


def certify_bounds(g: LatticeFunction, r: float, C: float, k_max: int,
                   ctx: QContext) -> BoundCertificate:
    """Check the uniform q-derivative bound for orders ``k <= k_max``.

    Indices ``t`` run over the part of the window where every order up to
    ``k_max`` has its full stencil.
    """
    table = _require_table(g)
    if not r > table.gamma:
        raise DomainError(f"r must exceed gamma={table.gamma}")
    if not C > 0:
        raise DomainError("C must be positive")
    grid = _derivative_grid(g, k_max, ctx)
    worst, where = grid.ratio(r, C)
    return BoundCertificate(float(r), float(C), k_max, (grid.t_lo, grid.t_hi),
                            worst <= 1.0, worst, where)


@dataclass
class GridSearch:
    best: BoundCertificate
    any_holds: bool
    points_tried: int
    r_values: list
    C_values: list


def search_bounds(g: LatticeFunction, k_max: int, ctx: QContext, n_r: int = 12,
                  n_C: int = 13) -> GridSearch:
    """Try ``r`` in ``(gamma, 4 gamma]`` and ``C`` log-spaced in ``[1, 1e6]``.

    Returns the certificate with the smallest worst ratio.  No holding point
    is evidence against an extension, not a proof.
    """
    gamma = _require_table(g).gamma
    grid = _derivative_grid(g, k_max, ctx)
    rs = [gamma * (1 + 3 * (i + 1) / n_r) for i in range(n_r)]
    Cs = [float(c) for c in np.logspace(0, 6, n_C)]
    best = None
    for r in rs:
        w1, where = grid.ratio(r, 1.0)
        for C in Cs:
            w = w1 / C
            if best is None or w < best.worst_ratio:
                best = BoundCertificate(r, float(C), k_max, (grid.t_lo, grid.t_hi),
                                        bool(w <= 1.0), w, where)
    return GridSearch(best, best.holds, len(rs) * len(Cs), rs, Cs)


# -- derivative limits ------------------------------------------------------


@dataclass
class DerivativeLimits:
    """Limits ``l_p`` of ``d^p g(eps q^k gamma)`` as ``k -> inf``.

    ``l`` holds the eps=+1 limits and ``l_minus`` the eps=-1 ones.
    ``convergence_evidence[p]`` is the change between the estimates at the
    two largest indices and ``drift_bound[p]`` the tail bound from the
    one-step shift identity.
    """

    l: list
    l_minus: list
    convergence_evidence: list
    drift_bound: list
    epsilon_agreement: list
    extraction_index: list
    q: float
    gamma: float

    @property
    def P(self) -> int:
        return len(self.l) - 1

    def epsilons_agree(self, tol: float = EPSILON_TOL) -> bool:
        return all(d <= tol * max(1.0, abs(l)) for d, l in zip(self.epsilon_agreement, self.l))


def _side_limits(table: Table, eps: int, P: int, q: float, tol: float):
    K_top = table.k_hi
    # derivative values at the three largest indices with a full stencil, per order
    est, evid, drift, where = [], [], [], []
    cache: dict = {}

    def derivs(t, order):
        hit = cache.get(t)
        if hit is None or len(hit) <= order:
            hit = cache[t] = _row_derivatives(table, eps, t, order, q)
        return hit

    for p in range(P + 1):
        K = K_top - p
        if K - 2 < table.k_lo:
            raise WindowExceeded(f"order {p} needs indices {K - 2}..{K_top}")
        d0 = derivs(K, p)[p]
        d1 = derivs(K - 1, p)[p]
        d2 = derivs(K - 2, p)[p]
        delta1, delta2 = abs(d0 - d1), abs(d1 - d2)
        # d^p g(q^K x) - l_p = (1-q) x q^K sum_m q^m d^{p+1} g(q^{K+m} x); the
        # sum is dominated by its first term near the limit
        if K - 1 + p + 1 <= K_top:
            nxt = abs(derivs(K - 1, p + 1)[p + 1])
            bound = q ** K * table.gamma * nxt
        else:
            bound = delta1 * q / (1 - q)
        if delta1 > tol and not delta1 < delta2:
            raise NonConvergent(
                f"order {p}, eps={eps}: drift {delta1:.3g} at index {K} is not shrinking "
                f"(previous {delta2:.3g})")
        if delta1 > tol and bound > tol:
            raise NonConvergent(
                f"order {p}, eps={eps}: drift {delta1:.3g} above threshold {tol:g}")
        est.append(d0)
        evid.append(delta1)
        drift.append(bound)
        where.append(K)
    return est, evid, drift, where


def derivative_limits(g: LatticeFunction, P: int, ctx: QContext,
                      drift_tol: float = DRIFT_TOL) -> DerivativeLimits:
    """Estimate ``l_0 .. l_P`` at the largest indices with a full stencil.

    Each ``l_p`` is ``d^p g`` at index ``k_hi - p``; the values at the two
    previous indices must approach it, with absolute drift below
    ``drift_tol``.  Tables need enough digits for order-``P`` quotients at
    the small end, so high orders call for mpmath tables.
    """
    table = _require_table(g)
    if P < 0:
        raise DomainError("P must be nonnegative")
    q = ctx.q
    lp, ep, dp, kp = _side_limits(table, 1, P, q, drift_tol)
    lm, em, dm, _ = _side_limits(table, -1, P, q, drift_tol)
    agree = [abs(a - b) for a, b in zip(lp, lm)]
    evid = [max(a, b) for a, b in zip(ep, em)]
    drift = [max(a, b) for a, b in zip(dp, dm)]
    return DerivativeLimits(lp, lm, evid, drift, agree, kp, q, table.gamma)


def reconstruct_series(dl: DerivativeLimits, side: int | None = None,
                       tol: float = EPSILON_TOL) -> PowerSeries:
    """``sum_k l_k x^k / [k]_q!``.

    With ``side=None`` the two half-lattice limits must agree and the series
    represents g on both signs.  ``side=+1`` or ``-1`` builds the half-lattice
    extension from that sign's limits alone.
    """
    if side is None:
        if not dl.epsilons_agree(tol):
            worst = max(dl.epsilon_agreement)
            raise EpsilonMismatch(
                f"limits for eps=+1 and eps=-1 differ by up to {worst:.3g}; "
                "only half-lattice extensions exist")
        limits = dl.l
    elif side in (1, -1):
        limits = dl.l if side == 1 else dl.l_minus
    else:
        raise DomainError("side must be None, +1 or -1")
    ctx = QContext(dl.q)
    coeffs = [l / q_factorial(k, ctx) for k, l in enumerate(limits)]
    return PowerSeries(coeffs, estimate_radius(coeffs))


# -- the finite Taylor identity ---------------------------------------------


def taylor_identity_residual(g: LatticeFunction, eps: int, k: int, n: int,
                             ctx: QContext) -> float:
    """Relative residual of ``g(x) = sum_{j<=n} [n j]_q (1-q)^j x^j (d^j g)(q^{n-j} x)``.

    ``x = eps q^k gamma``; the table needs the indices ``k .. k+n``.  The
    identity holds exactly for the lattice operators, so the sum is formed
    in extended precision from the stored values.
    """
    table = _require_table(g)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if k < table.k_lo or k + n > table.k_hi:
        raise WindowExceeded(f"identity of order {n} at index {k} needs indices up to {k + n}")
    q = ctx.q
    with mp.workdps(max(table.precision or 0, 40)):
        qm = mp.mpf(q)
        x = mp.mpf(eps) * qm ** k * mp.mpf(table.gamma)
        vals = [mp.mpmathify(table.get(eps, k + j)) for j in range(n + 1)]
        total = mp.mpf(0)
        for j in range(n + 1):
            # (d^j g)(q^{n-j} x) from the values at indices k+n-j .. k+n
            xs = x * qm ** (n - j)
            dj = difference_row(vals[n - j:], xs, qm)[j]
            total += _mp_qbinom(n, j, qm) * (1 - qm) ** j * x ** j * dj
        g0 = vals[0]
        err = abs(total - g0)
        scale = abs(g0)
        return float(err / scale) if scale != 0 else float(err)


def _mp_qbinom(n: int, k: int, q):
    num = den = mp.mpf(1)
    for i in range(k):
        num *= 1 - q ** (n - i)
        den *= 1 - q ** (i + 1)
    return num / den


# -- sampling helpers ---------------------------------------------------------


def series_table(series: PowerSeries, gamma: float, k_lo: int, k_hi: int, ctx: QContext,
                 dps: int = 60, name: str = "") -> LatticeFunction:
    """Sample a power series on ``L(gamma)`` at ``dps`` digits."""
    coeffs = series.coefficients
    vals = {1: [], -1: []}
    with mp.workdps(dps):
        qm = mp.mpf(ctx.q)
        cs = [mp.mpc(complex(c)) for c in coeffs]
        for eps in (1, -1):
            for k in range(k_lo, k_hi + 1):
                x = mp.mpf(eps) * qm ** k * mp.mpf(gamma)
                acc = mp.mpc(0)
                for c in reversed(cs):
                    acc = acc * x + c
                vals[eps].append(acc)
    return LatticeFunction.from_table(Table(gamma, k_lo, k_hi, vals, dps), name=name)


def bounds_dps(k_max: int, k_hi: int, q: float, digits: int = 20) -> int:
    """Digits for order-``k_max`` quotients down to index ``k_hi - k_max``."""
    return limits_dps(k_max - 1, k_hi, q, digits)


def limits_dps(P: int, k_hi: int, q: float, digits: int = 25) -> int:
    """Digits needed for order ``P+1`` quotients at index ``k_hi - P``."""
    lost = (P + 1) * (k_hi * math.log10(1 / q) + math.log10(2 / (1 - q)))
    return int(digits + lost) + 10


def limits_window(P: int, q: float, reach: float = 1e-14) -> int:
    """An upper index ``k_hi`` with ``q^{k_hi - P - 2} <= reach``."""
    return int(math.ceil(math.log(reach) / math.log(q))) + P + 2


def tail_integral_table(gamma: float, k_lo: int, k_hi: int, ctx: QContext) -> LatticeFunction:
    """``x -> int over L(x) of e_{q^2}(-X^2)`` sampled on ``L(gamma)``.

    Every point of ``L(gamma)`` generates the lattice ``L(gamma)`` itself, so
    the integrals are one sum reindexed and the table is the constant
    ``c_q(gamma)``.  The same rule on the whole real line is not analytic at
    0, because ``c_q`` depends on gamma; lattice data cannot detect that.
    """
    from .lattice import q_integral_unbounded
    from .special import Kind, SpecialFunction, make_function

    f = make_function(SpecialFunction(Kind.GAUSS_SMALL), gamma, ctx)
    ends = [q_integral_unbounded(f, ctx.q ** k * gamma, ctx).value for k in (k_lo, k_hi)]
    if abs(ends[0] - ends[1]) > 1e-12 * abs(ends[0]):
        raise NonConvergent("tail integrals at the window ends disagree")
    n = k_hi - k_lo + 1
    vals = {1: [ends[0]] * n, -1: [ends[0]] * n}
    return LatticeFunction.from_table(Table(gamma, k_lo, k_hi, vals), name="tail_integral")

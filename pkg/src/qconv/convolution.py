"""The q-convolution ``(f * g)(x) = sum_e (-1)^e mu_e(f) / [e]_q! (d^e g)(x)``.

The left factor only ever enters through its :class:`MomentSequence` and
the right factor through its lattice q-derivatives, mirroring the
asymmetry of the product.  All sums run in the log domain: moments of
high order and q-derivatives of Gaussians are far outside the double range
long before the series has converged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._series import Exhausted, SeriesSum, sum_log_series
from .errors import (CapExceeded, DivergentSeries, DomainError, RangeError, WindowExceeded,
                     ZeroPoint)
from .lattice import (LatticeFunction, Parity, Status, _as_number, _LogAccumulator, exp_log,
                      locate)
from .moments import MomentSequence, _entry
from .powerseries import PowerSeries
from .qcore import QContext, log_q_factorial

NEG_INF = -math.inf
_IPI = 1j * math.pi
# derivative orders are requested in chunks of this size and doubled on demand
_FIRST_ORDER = 24


@dataclass
class ConvolutionResult:
    value: complex
    terms_used: int
    tail_bound: float
    status: Status
    log_abs_value: float = NEG_INF

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED

    @property
    def log_value(self) -> complex:
        if self.log_abs_value == NEG_INF:
            return complex(NEG_INF, 0.0)
        return complex(self.log_abs_value, math.atan2(self.value.imag, self.value.real))


def _log_qbinom(n: int, k: int, ctx: QContext) -> float:
    return log_q_factorial(n, ctx) - log_q_factorial(k, ctx) - log_q_factorial(n - k, ctx)


class _Derivatives:
    """Growing cache of ``log (d^e g)(x)``; raises :class:`Exhausted` past a table window."""

    def __init__(self, g: LatticeFunction, x, ctx: QContext, method: str = "auto"):
        self.g, self.x, self.ctx, self.method = g, x, ctx, method
        self.logs = np.zeros(0, dtype=complex)
        self.limit = None
        if g.is_table:
            loc = locate(x, g.gamma, ctx)
            if loc is None:
                raise DomainError(f"{_as_number(x)!r} is not a point of the table lattice")
            self.limit = g.table.k_hi - loc[1]

    def __call__(self, e: int) -> complex:
        if e >= len(self.logs):
            want = max(_FIRST_ORDER, 2 * len(self.logs), e + 1)
            if self.limit is not None:
                if e > self.limit:
                    raise Exhausted
                want = min(want, self.limit)
            try:
                self.logs = self.g.derivative_logs(self.x, want, self.ctx, self.method)
            except WindowExceeded:
                raise Exhausted from None
        return self.logs[e]


def _moment_term(fm: MomentSequence, e: int, ctx: QContext) -> complex:
    """``log((-1)^e mu_e(f) / [e]_q!)``; raises :class:`Exhausted` past a finite sequence."""
    if not fm.ensure(e):
        raise Exhausted
    lm = fm.log_mu_significant(e)
    if lm.real == NEG_INF:
        return lm
    return lm - log_q_factorial(e, ctx) + (_IPI if e % 2 else 0)


def _check_lattices(fm: MomentSequence, ctx: QContext):
    if abs(fm.q - ctx.q) > 1e-15:
        raise DomainError(f"moment sequence was computed for q={fm.q}, context has q={ctx.q}")


def _to_result(s: SeriesSum) -> ConvolutionResult:
    return ConvolutionResult(s.value, s.terms_used, s.tail_bound, s.status, s.log_abs_value)


def convolve_at(fm: MomentSequence, g: LatticeFunction, x, ctx: QContext,
                method: str = "auto", shift: int = 0) -> ConvolutionResult:
    """``(f *_gamma g)(x)`` for ``f`` given by its moments on L(gamma).

    ``shift=l`` returns ``(f * d^l g)(x)``, which equals ``d^l (f * g)(x)``.
    The status is INPUT_EXHAUSTED when a table ``g`` or a finite moment
    sequence runs out before the tail rule is met, and DIVERGENT when the
    terms grow without bound (``f`` not of sufficient type for this ``g``).
    """
    _check_lattices(fm, ctx)
    if _as_number(x) == 0 and g.is_table:
        raise ZeroPoint("x = 0 is not admissible for table data")
    ders = _Derivatives(g, x, ctx, method)

    def term(e):
        lm = _moment_term(fm, e, ctx)
        if lm.real == NEG_INF:
            return lm
        return lm + ders(e + shift)

    return _to_result(sum_log_series(term, ctx))


def convolve_value(fm: MomentSequence, g: LatticeFunction, x, ctx: QContext, **kw) -> complex:
    """Value of :func:`convolve_at`, raising unless the result converged."""
    res = convolve_at(fm, g, x, ctx, **kw)
    _raise_for(res)
    return res.value


def _raise_for(res: ConvolutionResult):
    if res.status == Status.DIVERGENT:
        raise DivergentSeries(f"convolution series diverges (terms grow after {res.terms_used} terms)")
    if res.status == Status.CAPPED:
        raise CapExceeded(f"convolution series capped after {res.terms_used} terms")
    if res.status == Status.INPUT_EXHAUSTED:
        raise WindowExceeded(f"input data ran out after {res.terms_used} terms "
                             f"(tail bound {res.tail_bound:.3g})")


def convolve_series(fm: MomentSequence, g: PowerSeries, ctx: QContext) -> PowerSeries:
    """Power series of ``f * g`` when ``g = sum c_l x^l``.

    Coefficient ``p`` is ``sum_e (-1)^e mu_e(f) qbinom(p+e, e) c_{p+e}``;
    the inner sums end with the coefficient list or earlier by the tail rule.
    """
    _check_lattices(fm, ctx)
    c = g.coefficients
    L = len(c)
    out = np.zeros(L, dtype=complex)
    for p in range(L):

        def term(e, p=p):
            if p + e >= L:
                raise Exhausted
            cl = c[p + e]
            if cl == 0:
                return complex(NEG_INF, 0.0)
            if not fm.ensure(e):
                raise Exhausted
            lm = fm.log_mu_significant(e)
            if lm.real == NEG_INF:
                return lm
            return (lm + _log_qbinom(p + e, e, ctx) + complex(math.log(abs(cl)), np.angle(cl))
                    + (_IPI if e % 2 else 0))

        s = sum_log_series(term, ctx)
        if s.status == Status.DIVERGENT:
            raise CapExceeded(f"coefficient {p} of the convolved series does not converge")
        out[p] = s.value
    return PowerSeries(out, g.radius_estimate)


# -- moments of a convolution ---------------------------------------------------

def convolution_moment(fm: MomentSequence, gm: MomentSequence, k: int) -> complex:
    """``mu_k(f * g) = sum_{e<=k} qbinom(k, e) mu_e(f) mu_{k-e}(g)``."""
    if k < 0:
        raise RangeError("moment order must be nonnegative")
    if abs(fm.q - gm.q) > 1e-15:
        raise DomainError("moment sequences use different q")
    ctx = QContext(fm.q)
    return exp_log(_log_convolution_moment(fm, gm, k, ctx))


def _log_convolution_moment(fm: MomentSequence, gm: MomentSequence, k: int, ctx: QContext) -> complex:
    if not (fm.ensure(k) and gm.ensure(k)):
        raise RangeError(f"both sequences must cover order {k}")
    acc = _LogAccumulator()
    for e in range(k + 1):
        a = fm.log_mu_significant(e)
        b = gm.log_mu_significant(k - e)
        if a.real == NEG_INF or b.real == NEG_INF:
            continue
        lt = a + b + _log_qbinom(k, e, ctx)
        acc.add(lt, lt.real)
    if acc.s == 0:
        return complex(NEG_INF, 0.0)
    return cmath.log(acc.s) + acc.scale


def convolution_moment_sequence(fm: MomentSequence, gm: MomentSequence,
                                E: int | None = None) -> MomentSequence:
    """Moments of ``f * g`` from the finite sums, extendable while both inputs are.

    Strict moments of the product are not determined by the moments of the
    factors; the entries carry ``nu = |mu|`` and ``has_strict`` is False.
    """
    if abs(fm.q - gm.q) > 1e-15:
        raise DomainError("moment sequences use different q")
    ctx = QContext(fm.q)
    E = min(fm.E, gm.E) if E is None else E
    par = Parity.EVEN if (fm.parity == Parity.EVEN and gm.parity == Parity.EVEN) else Parity.NONE

    def gen(e):
        l = _log_convolution_moment(fm, gm, e, ctx)
        return _entry(e, l, l.real, Status.CONVERGED)

    ms = MomentSequence(fm.gamma, fm.q, generator=gen, parity=par,
                        label=f"({fm.label})*({gm.label})", exact=fm.exact and gm.exact)
    ms.has_strict = False
    ms.ensure(E)
    if not (fm.extendable and gm.extendable):
        ms._generator = None
    return ms


def predicted_type(alpha: float, beta: float) -> float:
    """Type ``eta = alpha beta / (alpha + beta)`` of a product of types alpha and beta."""
    if not (alpha > 0 and beta > 0):
        raise DomainError("types must be positive")
    return alpha * beta / (alpha + beta)


# -- the product as a lattice function ------------------------------------------------

def convolution_function(fm: MomentSequence, g: LatticeFunction, ctx: QContext,
                         name: str = "", series_length: int | None = None) -> LatticeFunction:
    """``f * g`` as a rule-backed :class:`LatticeFunction` on g's lattice.

    Its q-derivatives are ``(f * d^l g)(x)``, so the result can itself be the
    right factor of a further convolution.  When ``g`` carries a power series,
    the product carries the convolved series (used at ``x = 0``).
    """
    _check_lattices(fm, ctx)
    if g.is_table:
        raise DomainError("convolution_function needs a rule-backed right factor")

    def log_rule(x):
        res = convolve_at(fm, g, x, ctx)
        _raise_for(res)
        return res.log_value

    def rule(x):
        return exp_log(log_rule(x))

    def dlogs(x, order, c):
        ders = _Derivatives(g, x, ctx)
        out = []
        for l in range(order + 1):

            def term(e, l=l):
                lm = _moment_term(fm, e, ctx)
                if lm.real == NEG_INF:
                    return lm
                return lm + ders(e + l)

            s = sum_log_series(term, ctx)
            res = _to_result(s)
            _raise_for(res)
            out.append(res.log_value)
        return np.array(out, dtype=complex)

    series = None
    if g.series is not None:
        gs = g.series
        if series_length is not None:
            gs = PowerSeries(gs.coefficients[:series_length], gs.radius_estimate)
        series = convolve_series(fm, gs, ctx)
    par = Parity.EVEN if (fm.parity == Parity.EVEN and g.parity == Parity.EVEN) else Parity.NONE
    return LatticeFunction.from_rule(rule, g.gamma, name=name or f"({fm.label})*({g.name})",
                                     analyticity=g.analyticity, parity=par, log_rule=log_rule,
                                     series=series, derivative_logs=dlogs)


# -- diagnostics --------------------------------------------------------------------

def commutator_at(fm: MomentSequence, gm: MomentSequence, f: LatticeFunction, g: LatticeFunction,
                  x, ctx: QContext) -> complex:
    """``(f * g)(x) - (g * f)(x)``."""
    return convolve_value(fm, g, x, ctx) - convolve_value(gm, f, x, ctx)


def lambda_probe(fm: MomentSequence, lam, ctx: QContext) -> complex:
    """``f~_lambda(i) = int f(t) E_q(i q lambda t) d_q t = sum_k mu_k (i lambda)^k / (q;q)_k``.

    Raises DivergentSeries when the terms do not decay.
    """
    _check_lattices(fm, ctx)
    lam = complex(lam)
    if lam == 0:
        return fm.mu(0)
    log_il = complex(math.log(abs(lam)), math.atan2(lam.imag, lam.real) + math.pi / 2)
    log1mq = math.log(1 - ctx.q)

    def term(k):
        lm = fm.log_mu_significant(k) if fm.ensure(k) else None
        if lm is None:
            raise Exhausted
        if lm.real == NEG_INF:
            return lm
        # (q;q)_k = [k]_q! (1-q)^k
        return lm + k * log_il - log_q_factorial(k, ctx) - k * log1mq

    s = sum_log_series(term, ctx)
    if s.status == Status.DIVERGENT:
        raise DivergentSeries("lambda probe terms grow; f is not of sufficient type")
    if s.status == Status.CAPPED:
        raise CapExceeded("lambda probe capped")
    if s.status == Status.INPUT_EXHAUSTED:
        raise RangeError(f"moment sequence ends at order {fm.E} before the probe converged")
    return s.value

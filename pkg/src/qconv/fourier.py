"""q-Fourier transforms: the lattice integral with kernel ``E_q(iqxy)``,
the moment series, the inverse over the bounded lattice and the
convolution homomorphism check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from ._series import Exhausted, sum_log_series
from .convolution import convolution_moment_sequence
from .errors import DomainError
from .lattice import LatticeFunction, Parity, Status, _logadd, _logaddexp, bilateral_sum
from .moments import MomentSequence
from .powerseries import PowerSeries
from .qcore import INFINITY, QContext, constant_bq, constant_cq, log_q_factorial, log_q_pochhammer

NEG_INF = -math.inf


class Form(str, enum.Enum):
    INTEGRAL = "INTEGRAL"
    SERIES = "SERIES"


@dataclass
class FourierResult:
    value: complex
    form: Form
    status: Status
    terms_used: int = 0
    tail_bound: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED


def _log_E_q(z: complex, ctx: QContext) -> complex:
    """``log E_q(z) = log (-z; q)_inf`` from the product."""
    return log_q_pochhammer(-z, INFINITY, ctx)


def fourier_integral(f: LatticeFunction, gamma: float, y, ctx: QContext) -> FourierResult:
    """``int_gamma E_q(i q x y) f(x) d_q x`` over the full lattice L(gamma).

    For functions whose decay only just beats the growth of the kernel the
    terms fall off slowly and the sum may need most of the index cap; the
    moment series (:func:`fourier_series`) is then far cheaper.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    y = complex(y)
    q = ctx.q
    lq = ctx.log_q
    lg = math.log(gamma)
    base = math.log(1 - q)
    k_lo = k_hi = None
    if f.is_table:
        if abs(f.table.gamma - gamma) > 1e-12 * gamma:
            raise DomainError(f"table lives on L({f.table.gamma}), not L({gamma})")
        k_lo, k_hi = f.table.k_lo, f.table.k_hi

    def term(k):
        x = q ** k * gamma
        lw = base + k * lq + lg
        lp = f.log_value_on(1, k, gamma, ctx)
        if f.parity == Parity.EVEN:
            ln = lp
        elif f.parity == Parity.ODD:
            ln = lp + 1j * math.pi if lp.real > NEG_INF else lp
        else:
            ln = f.log_value_on(-1, k, gamma, ctx)
        a = lp + _log_E_q(1j * q * x * y, ctx) if lp.real > NEG_INF else lp
        b = ln + _log_E_q(-1j * q * x * y, ctx) if ln.real > NEG_INF else ln
        return _logadd(a, b) + lw, _logaddexp(a.real, b.real) + lw

    res = bilateral_sum(term, ctx, k_min=k_lo, k_max=k_hi)
    return FourierResult(res.value, Form.INTEGRAL, res.status,
                         res.k_pos_used + res.k_neg_used + 1, res.tail_bound)


def fourier_series(fm: MomentSequence, y, ctx: QContext) -> FourierResult:
    """``sum_k mu_k(f) (i y)^k / (q;q)_k`` (entire in y for left-type f)."""
    if abs(fm.q - ctx.q) > 1e-15:
        raise DomainError(f"moment sequence was computed for q={fm.q}, context has q={ctx.q}")
    y = complex(y)
    if y == 0:
        return FourierResult(complex(fm.mu(0)), Form.SERIES, Status.CONVERGED, 1, 0.0)
    log_iy = complex(math.log(abs(y)), math.atan2(y.imag, y.real) + math.pi / 2)
    log1mq = math.log(1 - ctx.q)

    def term(k):
        if not fm.ensure(k):
            raise Exhausted
        lm = fm.log_mu_significant(k)
        if lm.real == NEG_INF:
            return lm
        # (q;q)_k = [k]_q! (1-q)^k
        return lm + k * log_iy - log_q_factorial(k, ctx) - k * log1mq

    s = sum_log_series(term, ctx)
    return FourierResult(s.value, Form.SERIES, s.status, s.terms_used, s.tail_bound)


def fourier_inverse(phi, x, gamma: float, ctx: QContext) -> complex:
    """``(1 / (c_q(gamma) b_q)) int_{-1}^{1} e_q(-i x y) phi(y) d_q y``.

    ``phi`` is a :class:`PowerSeries` or a callable evaluated at the points
    ``+-q^k`` (k >= 0) of the bounded lattice.
    """
    if not isinstance(phi, PowerSeries) and not callable(phi):
        raise DomainError("phi must be a PowerSeries or a callable")
    x = complex(x)
    q = ctx.q
    lq = ctx.log_q
    base = math.log(1 - q)
    cache: dict = {}

    def ev(y):
        v = cache.get(y)
        if v is None:
            v = complex(phi(y))
            cache[y] = v
        return v

    def log_e_q(z):
        return -log_q_pochhammer(z, INFINITY, ctx)

    def term(k):
        y = q ** k
        lw = base + k * lq
        out, mags = [], []
        for eps in (1, -1):
            v = ev(eps * y)
            if v == 0:
                continue
            lt = complex(math.log(abs(v)), math.atan2(v.imag, v.real)) + log_e_q(-1j * x * eps * y)
            out.append(lt)
            mags.append(lt.real)
        if not out:
            return complex(NEG_INF, 0.0), NEG_INF
        lt = out[0] if len(out) == 1 else _logadd(out[0], out[1])
        la = mags[0] if len(mags) == 1 else _logaddexp(mags[0], mags[1])
        return lt + lw, la + lw

    res = bilateral_sum(term, ctx, k_min=0, one_sided=True)
    norm = constant_cq(gamma, ctx) * constant_bq(ctx)
    return res.value / norm


@dataclass
class HomomorphismReport:
    y: complex
    lhs: complex
    rhs: complex
    difference: float

    @property
    def relative(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.difference / scale if scale > 0 else self.difference

    def to_dict(self) -> dict:
        return {"y_re": self.y.real, "y_im": self.y.imag,
                "lhs_re": self.lhs.real, "lhs_im": self.lhs.imag,
                "rhs_re": self.rhs.real, "rhs_im": self.rhs.imag,
                "difference": self.difference}


def homomorphism_check(fm: MomentSequence, gm: MomentSequence, y, ctx: QContext,
                       E: int | None = None) -> HomomorphismReport:
    """Transform of ``f * g`` (moments from the finite sums) against the product of transforms."""
    y = complex(y)
    cm = convolution_moment_sequence(fm, gm, E)
    lhs = fourier_series(cm, y, ctx)
    a = fourier_series(fm, y, ctx)
    b = fourier_series(gm, y, ctx)
    for r in (lhs, a, b):
        if r.status == Status.DIVERGENT:
            raise DomainError("a moment series diverges at this y")
    rhs = a.value * b.value
    return HomomorphismReport(y, lhs.value, rhs, abs(lhs.value - rhs))


def transform_function(f: LatticeFunction, gamma: float, ctx: QContext) -> Callable[[complex], complex]:
    """``y -> (F_gamma f)(y)`` from the lattice integral, for use with :func:`fourier_inverse`.

    Values are memoised, so several inverse evaluations share the integrals.
    """
    memo: dict = {}

    def phi(y):
        v = memo.get(y)
        if v is None:
            v = memo[y] = fourier_integral(f, gamma, y, ctx).value
        return v

    return phi


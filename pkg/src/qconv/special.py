"""q-exponentials, q-Gaussians, discrete q-Hermite II polynomials and friends.

Every special function is available as a plain evaluator (``eval_special``)
and as a :class:`~qconv.lattice.LatticeFunction` (``make_function``) that
carries an mpmath evaluator, a log evaluator and, where one exists, a closed
form for its lattice q-derivatives.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mp

from ._mp import mp_qp, to_complex_log
from .errors import CapExceeded, DomainError, PoleError
from .lattice import (ENTIRE, LATTICE_ONLY, NEG_INF, Analyticity, LatticeFunction, Parity,
                      disk, locate, strip)
from .powerseries import PowerSeries
from .qcore import (INFINITY, QContext, constant_bq, constant_cq, log_q_pochhammer,
                    q_pochhammer)

POLE_RADIUS = 1e-12


class Kind(enum.Enum):
    E_Q_SMALL = "eq"
    E_Q_BIG = "Eq"
    GAUSS_SMALL = "gauss_e"
    GAUSS_BIG = "gauss_E"
    GAUSS_CAL = "gauss_cal"
    G_M = "gm"
    ALT_EXAMPLE = "alt"
    STRIP_EXAMPLE = "strip"


@dataclass(frozen=True)
class SpecialFunction:
    """A special function kind with its parameter (``m`` for G_M, ``c`` for STRIP)."""

    kind: Kind
    param: float | int | None = None

    def __post_init__(self):
        if self.kind == Kind.G_M and not (isinstance(self.param, int) and self.param >= 0):
            raise DomainError("G_M needs an integer m >= 0")
        if self.kind == Kind.STRIP_EXAMPLE and not (self.param is not None and self.param > 0):
            raise DomainError("STRIP_EXAMPLE needs c > 0")

    @property
    def analyticity(self) -> Analyticity:
        k = self.kind
        if k == Kind.E_Q_SMALL:
            return disk(1.0)
        if k in (Kind.GAUSS_SMALL, Kind.G_M, Kind.STRIP_EXAMPLE):
            return strip(1.0)
        if k == Kind.ALT_EXAMPLE:
            return LATTICE_ONLY
        return ENTIRE

    @property
    def parity(self) -> Parity:
        if self.kind in (Kind.E_Q_SMALL, Kind.E_Q_BIG):
            return Parity.NONE
        return Parity.EVEN

    @property
    def label(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}:{self.param:g}"


# -- double precision building blocks ---------------------------------------

def _pole_check_geometric(a, base: float, what: str):
    """Raise PoleError when ``1 - a base^j`` is (numerically) zero for some j >= 0."""
    if a == 0:
        return
    r = abs(a)
    if r < 1 - 1e-9:
        return
    j = round(-math.log(r) / math.log(base))
    if j >= 0 and abs(1 - a * base ** j) < POLE_RADIUS:
        raise PoleError(f"{what} has a pole at {a!r}")


def _hits_zero_factor(a, base: float, rel: float = 1e-13) -> bool:
    """True when ``1 - a base^j`` vanishes up to rounding for some j >= 0.

    Lattice points like ``q^{-j}`` are not exact in binary, so the zero
    factor of ``(a; base)_inf`` would otherwise come out as ~1e-16.
    """
    if a == 0:
        return False
    r = abs(a)
    if r < 1 - 1e-9:
        return False
    j = round(-math.log(r) / math.log(base))
    return j >= 0 and abs(1 - a * base ** j) < rel


def e_q(x, ctx: QContext) -> complex:
    """``e_q(x) = 1/(x; q)_inf`` (the analytic continuation beyond ``|x| < 1``)."""
    _pole_check_geometric(x, ctx.q, "e_q")
    return 1 / q_pochhammer(x, INFINITY, ctx)


def E_q(x, ctx: QContext) -> complex:
    """``E_q(x) = (-x; q)_inf``."""
    return q_pochhammer(-x, INFINITY, ctx)


def E_q_series(x, ctx: QContext) -> complex:
    """``E_q`` from its series ``sum q^{k(k-1)/2} x^k / (q;q)_k``."""
    q = ctx.q
    t = 1.0 + 0j
    s = [t]
    k = 0
    while True:
        t = t * q ** k * x / (1 - q ** (k + 1))
        k += 1
        s.append(t)
        if k > 3 and abs(t) < ctx.tail_rel_tol * 1e-3 * max(abs(v) for v in s):
            break
        if k > ctx.max_terms:
            raise CapExceeded("E_q series")
    return complex(math.fsum(v.real for v in s), math.fsum(v.imag for v in s))


def gauss_small(x, ctx: QContext):
    """``e_{q^2}(-x^2) = 1/(-x^2; q^2)_inf``, poles at ``x = +-i q^{-k}``."""
    a = -x * x
    _pole_check_geometric(a, ctx.q ** 2, "e_{q^2}(-x^2)")
    return 1 / q_pochhammer(a, INFINITY, ctx, ctx.q ** 2)


def gauss_big(x, ctx: QContext):
    """``E_{q^2}(-x^2) = (x^2; q^2)_inf``."""
    return q_pochhammer(x * x, INFINITY, ctx, ctx.q ** 2)


def _log_gauss_small(x, ctx):
    return -log_q_pochhammer(-x * x, INFINITY, ctx, ctx.q ** 2)


def _log_gauss_big(x, ctx):
    return log_q_pochhammer(x * x, INFINITY, ctx, ctx.q ** 2)


# -- extended precision evaluators ------------------------------------------

def _mp_gauss_small(x, q):
    return 1 / mp_qp(-x * x, q * q)


def _mp_gauss_big(x, q):
    return mp_qp(x * x, q * q)


def _adaptive_sum(compute, log10_peak: float, want: int = 22):
    """Evaluate an alternating series at a precision that survives its cancellation.

    ``compute()`` sums the series at the current mpmath precision.  The
    digits lost are ``log10(peak term / |sum|)``; the precision is raised
    until at least ``want`` digits remain.
    """
    # the Gaussian-type sums here end up near 1/peak, so start there
    dps = int(mp.dps + want + 2 * max(0.0, log10_peak))
    for _ in range(12):
        with mp.workdps(dps):
            v = compute()
            if v != 0:
                lost = log10_peak - float(mpmath.log10(abs(v)))
                if dps - max(lost, 0.0) >= want + 5:
                    return +v
                dps = max(int(want + 15 + max(lost, 0.0)), int(1.5 * dps))
            else:
                dps *= 2
    raise CapExceeded("series cancellation could not be resolved")


def _mp_alternating_series(term_ratio, first):
    """Sum ``sum_r t_r`` where ``t_{r+1} = t_r * term_ratio(r)``, to working precision."""
    s = mp.mpf(0)
    t = first
    r = 0
    biggest = abs(t)
    eps = mp.mpf(2) ** (-mp.prec - 8)
    while True:
        s += t
        t = t * term_ratio(r)
        r += 1
        at = abs(t)
        if at > biggest:
            biggest = at
        if r > 4 and at <= eps * biggest:
            return s
        if r > 20000:
            raise CapExceeded("series did not terminate")


def _log10_peak_cal(x_abs: float, q: float) -> float:
    """log10 of the largest term of the series defining the interpolating Gaussian."""
    if x_abs == 0:
        return 0.0
    lq = math.log10(q)
    lx = math.log10(x_abs)
    best = 0.0
    k = 0
    cur = 0.0
    while True:
        k += 1
        cur += (k - 1) * lq + 2 * lx - math.log10(1 - q ** (2 * k))
        best = max(best, cur)
        if cur < best - 30 and k > 5:
            return best


class ExactPoint:
    """A real point ``eps q^k gamma`` rebuilt at whatever precision is current.

    The series for the interpolating Gaussian and for ``g_m`` cancel by
    hundreds of digits near the lattice, and their values there are far
    more sensitive to ``x`` than the double rounding of ``q^k`` allows.
    """

    def __init__(self, eps: int, k: int, gamma: float, q: float):
        self.eps, self.k, self.gamma, self.q = eps, k, gamma, q

    def mp(self):
        return mp.mpf(self.eps) * mp.mpf(self.q) ** self.k * mp.mpf(self.gamma)

    def __float__(self):
        return self.eps * self.q ** self.k * self.gamma


def _mp_point(x):
    return x.mp() if isinstance(x, ExactPoint) else mp.mpmathify(x)


def _abs_float(x) -> float:
    return abs(float(x)) if isinstance(x, ExactPoint) else float(abs(x))


def _mp_gauss_cal(x, q):
    """Interpolating Gaussian ``sum_k (-1)^k q^{k(k-1)/2} x^{2k} / (q^2;q^2)_k``."""
    qf = float(q)

    def compute():
        qm = mp.mpf(q)
        x2 = _mp_point(x) ** 2
        return _mp_alternating_series(lambda k: -(qm ** k) * x2 / (1 - qm ** (2 * k + 2)),
                                      mp.mpf(1))

    return _adaptive_sum(compute, _log10_peak_cal(_abs_float(x), qf))


def _log10_peak_gm(x_abs: float, q: float, m: int) -> float:
    if x_abs == 0:
        return 0.0
    lq = math.log10(q)
    lx = math.log10(x_abs)
    best = 0.0
    cur = 0.0
    r = 0
    while True:
        # ratio t_{r+1}/t_r of the G_M series
        cur += (4 * r) * lq + (1 + 2 * m) * lq + 2 * lx \
            - math.log10(abs(1 - q ** (1 + 2 * m + 2 * r))) - math.log10(1 - q ** (2 * r + 2))
        r += 1
        best = max(best, cur)
        if cur < best - 30 and r > 5:
            return best


def _mp_gm(x, q, m):
    """``g_m(x) = e_{q^2}(-x^2) sum_r (-1)^r q^{2r(r-1)} q^{(1+2m)r} x^{2r} / ((q^{1+2m};q^2)_r (q^2;q^2)_r)``."""

    def compute():
        qm = mp.mpf(q)
        x2 = _mp_point(x) ** 2
        a = qm ** (1 + 2 * m)
        return _mp_alternating_series(
            lambda r: -(qm ** (4 * r)) * a * x2 / ((1 - a * qm ** (2 * r)) * (1 - qm ** (2 * r + 2))),
            mp.mpf(1))

    series = _adaptive_sum(compute, _log10_peak_gm(_abs_float(x), float(q), m))
    return series * _mp_gauss_small(_mp_point(x), mp.mpf(q))


def _mp_strip(x, c):
    l = mpmath.log(x * x + 1)
    return mpmath.exp(-c * l * l)


def _alt_index(x, ctx: QContext):
    loc = locate(x, 1.0, ctx)
    if loc is None:
        raise DomainError(f"the alternating example lives on L(1) only; {x!r} is not on it")
    return loc


def _mp_alt(x, q):
    qf = float(q)
    loc = locate(complex(x), 1.0, QContext(qf), rel=1e-9)
    if loc is None:
        raise DomainError(f"the alternating example lives on L(1) only; {x!r} is not on it")
    _, k = loc
    q = mp.mpf(q)
    return (-1) ** k * q ** k / mp_qp(-q ** (2 * k), q * q)


# -- public evaluation --------------------------------------------------------

def eval_special(sf: SpecialFunction, x, ctx: QContext):
    """Evaluate ``sf`` at ``x`` in double precision."""
    k = sf.kind
    q = ctx.q
    if k == Kind.E_Q_SMALL:
        return e_q(x, ctx)
    if k == Kind.E_Q_BIG:
        return 0j if _hits_zero_factor(-x, q) else E_q(x, ctx)
    if k == Kind.GAUSS_SMALL:
        return gauss_small(x, ctx)
    if k == Kind.GAUSS_BIG:
        return 0 * x if _hits_zero_factor(x * x, q * q) else gauss_big(x, ctx)
    if k == Kind.GAUSS_CAL:
        return _to_py(_mp_eval(_mp_gauss_cal, x, q))
    if k == Kind.G_M:
        if not isinstance(x, ExactPoint):
            _pole_check_geometric(-x * x, q * q, "g_m")
        return _to_py(_mp_eval(lambda t, qq: _mp_gm(t, qq, sf.param), x, q))
    if k == Kind.ALT_EXAMPLE:
        eps, kk = _alt_index(x, ctx)
        return (-1) ** kk * q ** kk * gauss_small(q ** kk, ctx)
    if k == Kind.STRIP_EXAMPLE:
        if abs(complex(x).imag) >= 1:
            raise DomainError("STRIP_EXAMPLE is certified on |Im z| < 1 only")
        l = cmath.log(x * x + 1)
        v = cmath.exp(-sf.param * l * l)
        return v.real if isinstance(x, (int, float)) else v
    raise DomainError(f"unknown kind {k}")


def _mp_eval(fn, x, q, dps=20):
    with mp.workdps(dps):
        return fn(x if isinstance(x, ExactPoint) else mp.mpmathify(x), mp.mpf(q))


def _to_py(v):
    if isinstance(v, mpmath.mpc):
        return complex(v)
    return float(v)


def log_special(sf: SpecialFunction, x, ctx: QContext) -> complex:
    """Complex log of ``sf(x)``; stays finite where the value under/overflows."""
    k = sf.kind
    q = ctx.q
    if k == Kind.GAUSS_SMALL:
        _pole_check_geometric(-x * x, q * q, "e_{q^2}(-x^2)")
        return _log_gauss_small(x, ctx)
    if k == Kind.GAUSS_BIG:
        if _hits_zero_factor(x * x, q * q):
            return complex(NEG_INF, 0.0)
        return _log_gauss_big(x, ctx)
    if k == Kind.E_Q_BIG:
        if _hits_zero_factor(-x, q):
            return complex(NEG_INF, 0.0)
        return log_q_pochhammer(-x, INFINITY, ctx)
    if k == Kind.E_Q_SMALL:
        _pole_check_geometric(x, q, "e_q")
        return -log_q_pochhammer(x, INFINITY, ctx)
    if k == Kind.STRIP_EXAMPLE:
        l = cmath.log(x * x + 1)
        return complex(-sf.param * l * l)
    if k == Kind.ALT_EXAMPLE:
        eps, kk = _alt_index(x, ctx)
        return kk * math.log(q) + 1j * math.pi * (kk % 2) + _log_gauss_small(q ** kk, ctx)
    if k == Kind.GAUSS_CAL:
        return to_complex_log(_mp_eval(_mp_gauss_cal, x, q))
    if k == Kind.G_M:
        if not isinstance(x, ExactPoint):
            _pole_check_geometric(-x * x, q * q, "g_m")
        return to_complex_log(_mp_eval(lambda t, qq: _mp_gm(t, qq, sf.param), x, q))
    raise DomainError(f"unknown kind {k}")


def mp_special(sf: SpecialFunction, x, q):
    """Evaluate at the current mpmath precision (``x`` and ``q`` as mpmath numbers)."""
    k = sf.kind
    q = mp.mpf(q)
    if k == Kind.E_Q_SMALL:
        return 1 / mp_qp(x, q)
    if k == Kind.E_Q_BIG:
        return mp_qp(-x, q)
    if k == Kind.GAUSS_SMALL:
        return _mp_gauss_small(x, q)
    if k == Kind.GAUSS_BIG:
        return _mp_gauss_big(x, q)
    if k == Kind.GAUSS_CAL:
        return _mp_gauss_cal(x, q)
    if k == Kind.G_M:
        return _mp_gm(x, q, sf.param)
    if k == Kind.ALT_EXAMPLE:
        return _mp_alt(x, q)
    if k == Kind.STRIP_EXAMPLE:
        return _mp_strip(x, mp.mpf(sf.param))
    raise DomainError(f"unknown kind {k}")


# -- discrete q-Hermite II -----------------------------------------------------

def hermite_II(k: int, x, ctx: QContext):
    """Discrete q-Hermite II polynomial ``h~_k(x; q)`` from its explicit sum.

    ``(q;q)_k sum_l (-1)^l q^{-2lk+2l^2+l} x^{k-2l} / ((q^2;q^2)_l (q;q)_{k-2l})``.
    Consecutive terms are built from their ratio so that the large powers
    ``q^{-2lk}`` never appear on their own; the terms are added with
    compensated summation.
    """
    if k < 0:
        raise DomainError("degree must be nonnegative")
    q = ctx.q
    if x == 0:
        if k % 2:
            return 0.0
        l = k // 2
        return ((-1) ** l * q ** (-2 * l * k + 2 * l * l + l)
                * q_pochhammer(q, k, ctx) / q_pochhammer(q * q, l, ctx, q * q))
    terms = [x ** k]
    t = terms[0]
    for l in range(k // 2):
        t = (-t * q ** (-2 * k + 4 * l + 3) * (1 - q ** (k - 2 * l)) * (1 - q ** (k - 2 * l - 1))
             / ((1 - q ** (2 * l + 2)) * x * x))
        terms.append(t)
    if all(isinstance(v, float) for v in terms):
        return math.fsum(terms)
    return complex(math.fsum(complex(v).real for v in terms),
                   math.fsum(complex(v).imag for v in terms))


def scaled_hermite_logs(x, order: int, ctx: QContext) -> np.ndarray:
    """Complex logs of ``S_n(x) = q^{(n^2-n)/2} h~_n(x; q)`` for ``n = 0..order``.

    Uses the three-term recurrence ``S_{n+1} = q^n x S_n - (1-q^n) S_{n-1}``,
    renormalised as it runs so large arguments do not overflow.
    """
    q = ctx.q
    out = np.empty(order + 1, dtype=complex)
    s_prev, s_cur = 0j, 1.0 + 0j
    shift = 0.0
    out[0] = 0j
    for n in range(order):
        s_next = q ** n * x * s_cur - (1 - q ** n) * s_prev
        s_prev, s_cur = s_cur, s_next
        m = max(abs(s_prev), abs(s_cur))
        if m > 1e150 or (0 < m < 1e-150):
            shift += math.log(m)
            s_prev /= m
            s_cur /= m
        out[n + 1] = (cmath.log(s_cur) + shift) if s_cur != 0 else NEG_INF
    return out


def rodrigues_gaussian_derivative(k: int, x, ctx: QContext):
    """``(d^k e_{q^2}(-X^2))(x) = (-1)^k q^{(k^2-k)/2} h~_k(x) e_{q^2}(-x^2) / (1-q)^k``."""
    q = ctx.q
    g = gauss_small(x, ctx)
    return (-1) ** k * q ** ((k * k - k) / 2) / (1 - q) ** k * hermite_II(k, x, ctx) * g


def _gauss_small_derivative_logs(x, order, ctx):
    """Closed-form derivative logs of the q-Gaussian via the scaled Hermite recurrence."""
    if x == 0:
        return None
    lg = _log_gauss_small(x, ctx)
    s = scaled_hermite_logs(x, order, ctx)
    n = np.arange(order + 1)
    return s + lg - n * math.log(1 - ctx.q) + 1j * math.pi * (n % 2)


def _E_q_derivative_logs(x, order, ctx):
    """``d^n E_q(x) = q^{n(n-1)/2} (1-q)^{-n} E_q(q^n x)``."""
    q = ctx.q
    out = np.empty(order + 1, dtype=complex)
    for n in range(order + 1):
        out[n] = (n * (n - 1) / 2 * math.log(q) - n * math.log(1 - q)
                  + log_q_pochhammer(-(q ** n) * x, INFINITY, ctx))
    return out


def _e_q_derivative_logs(x, order, ctx):
    """``d^n e_q(x) = e_q(x) / (1-q)^n``."""
    _pole_check_geometric(x, ctx.q, "e_q")
    l0 = -log_q_pochhammer(x, INFINITY, ctx)
    return np.array([l0 - n * math.log(1 - ctx.q) for n in range(order + 1)])


# -- kernel -------------------------------------------------------------------

def kernel_K(t, x, ctx: QContext):
    """``K(t, x) = sum_k q^{k^2} t^k h~_k(x; q) / (q;q)_k``.

    Summed as ``sum_k q^{(k^2+k)/2} t^k S_k(x) / (q;q)_k`` with the scaled
    Hermite recurrence; cut by the tail rule.
    """
    q = ctx.q
    if t == 0:
        return 1.0 + 0j
    total = 0j
    small = 0
    s_prev, s_cur = 0j, 1.0 + 0j
    coeff = 1.0 + 0j  # q^{(k^2+k)/2} t^k / (q;q)_k at k
    terms = []
    for k in range(ctx.max_terms):
        term = coeff * s_cur
        terms.append(term)
        total += term
        if k > 2 and abs(term) <= ctx.tail_rel_tol * abs(total):
            small += 1
            if small >= ctx.decay_window:
                return complex(math.fsum(v.real for v in terms), math.fsum(v.imag for v in terms))
        else:
            small = 0
        s_prev, s_cur = s_cur, q ** k * x * s_cur - (1 - q ** k) * s_prev
        coeff = coeff * q ** (k + 1) * t / (1 - q ** (k + 1))
    raise CapExceeded("kernel series did not converge")


# -- moments in closed form -----------------------------------------------------

def gaussian_moment_closed_form(e: int, gamma: float, ctx: QContext) -> float:
    """``mu_{2k,gamma}(e_{q^2}(-X^2)) = c_q(gamma) (q;q^2)_k q^{k^2+k}``; odd orders vanish."""
    if e % 2:
        return 0.0
    k = e // 2
    q = ctx.q
    return constant_cq(gamma, ctx) * q_pochhammer(q, k, ctx, q * q) * q ** (k * k + k)


def gauss_big_integral_closed_form(n: int, ctx: QContext) -> float:
    """``int x^{2k} E_{q^2}(-x^2) d_q x`` over L(1): ``b_q q^{2k+1} (q;q^2)_k``."""
    if n % 2:
        return 0.0
    k = n // 2
    q = ctx.q
    return constant_bq(ctx) * q ** (2 * k + 1) * q_pochhammer(q, k, ctx, q * q)


def gauss_big_moment_closed_form(e: int, ctx: QContext) -> float:
    """``mu_{2k,1}(E_{q^2}(-X^2))`` as implied by the integral formula above.

    Equals ``b_q (q;q^2)_k q^{2k^2+3k+1}``.
    """
    q = ctx.q
    return q ** ((e * e + e) / 2) * gauss_big_integral_closed_form(e, ctx)


def gm_moment_closed_form(m: int, e: int, gamma: float, ctx: QContext) -> float:
    """Moments of ``g_m``: nonzero only for ``e = 2k`` with ``k <= m-1``."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    if e % 2 or e // 2 > m - 1:
        return 0.0
    k = e // 2
    q = ctx.q
    q2 = q * q
    pref = (constant_cq(gamma, ctx) * q_pochhammer(q2, INFINITY, ctx, q2)
            / q_pochhammer(q ** (2 * m + 1), INFINITY, ctx, q2))
    return (pref * q ** (k * k + k) * q_pochhammer(q, k, ctx, q2)
            / q_pochhammer(q2, m - k - 1, ctx, q2))


# -- lattice functions ----------------------------------------------------------

def _even_series(u_coeffs, radius: float) -> PowerSeries:
    """Series in ``x`` from coefficients in ``u = x^2``."""
    c = np.zeros(2 * len(u_coeffs), dtype=complex)
    c[::2] = u_coeffs
    return PowerSeries(c, radius)


def _u_gaussian(q: float, n: int) -> np.ndarray:
    # e_{q^2}(-u) = sum_k (-1)^k u^k / (q^2;q^2)_k
    q2 = q * q
    out = np.zeros(n)
    v = 1.0
    for k in range(n):
        out[k] = v
        v = -v / (1 - q2 ** (k + 1))
    return out


def gaussian_series(ctx: QContext, length: int = 160) -> PowerSeries:
    """Taylor series ``sum_k (-1)^k x^{2k} / (q^2;q^2)_k`` of the q-Gaussian (radius 1)."""
    return _even_series(_u_gaussian(ctx.q, (length + 1) // 2), 1.0)


def E_q_series_coefficients(ctx: QContext, length: int = 160) -> PowerSeries:
    """``E_q(x) = sum_k q^{k(k-1)/2} x^k / (q;q)_k`` (entire)."""
    q = ctx.q
    c = np.zeros(length, dtype=complex)
    v = 1.0
    for k in range(length):
        c[k] = v
        v = v * q ** k / (1 - q ** (k + 1))
    return PowerSeries(c, math.inf)


def taylor_series(sf: SpecialFunction, ctx: QContext, length: int = 160) -> PowerSeries | None:
    """Taylor series at 0 with ``length`` coefficients, or None (lattice-only functions)."""
    q = ctx.q
    n = (length + 1) // 2
    k = sf.kind
    if k == Kind.GAUSS_SMALL:
        return gaussian_series(ctx, length)
    if k == Kind.E_Q_BIG:
        return E_q_series_coefficients(ctx, length)
    if k == Kind.E_Q_SMALL:
        c = np.zeros(length, dtype=complex)
        v = 1.0
        for j in range(length):
            c[j] = v
            v = v / (1 - q ** (j + 1))
        return PowerSeries(c, 1.0)
    if k in (Kind.GAUSS_BIG, Kind.GAUSS_CAL):
        # (x^2;q^2)_inf and the interpolating Gaussian differ only in the q-power
        u = np.zeros(n)
        v = 1.0
        for j in range(n):
            u[j] = v
            step = q ** (2 * j) if k == Kind.GAUSS_BIG else q ** j
            v = -v * step / (1 - q ** (2 * j + 2))
        return _even_series(u, math.inf)
    if k == Kind.G_M:
        a = q ** (1 + 2 * sf.param)
        inner = np.zeros(n)
        v = 1.0
        for r in range(n):
            inner[r] = v
            v = -v * q ** (4 * r) * a / ((1 - a * q ** (2 * r)) * (1 - q ** (2 * r + 2)))
        return _even_series(np.convolve(_u_gaussian(q, n), inner)[:n], 1.0)
    if k == Kind.STRIP_EXAMPLE:
        # exp(-c log(1+u)^2) by the recurrence h' = a' h for h = exp(a)
        lg = np.zeros(n)
        j = np.arange(1, n)
        lg[1:] = (-1.0) ** (j + 1) / j
        a = -sf.param * np.convolve(lg, lg)[:n]
        h = np.zeros(n)
        h[0] = 1.0
        for m in range(1, n):
            h[m] = sum(i * a[i] * h[m - i] for i in range(1, m + 1)) / m
        return _even_series(h, 1.0)
    return None


def make_function(sf: SpecialFunction, gamma: float, ctx: QContext,
                  closed_form_derivatives: bool = True) -> LatticeFunction:
    """The special function as a lattice function on L(gamma).

    ``closed_form_derivatives=False`` drops the closed-form derivative
    provider so that q-derivatives come from the lattice difference stencil.
    """
    if sf.kind == Kind.ALT_EXAMPLE and abs(gamma - 1.0) > 1e-12:
        raise DomainError("the alternating example is defined on L(1) only")
    q = ctx.q
    dlogs = None
    series = taylor_series(sf, ctx)
    if sf.kind == Kind.GAUSS_SMALL:
        if closed_form_derivatives:
            dlogs = _gauss_small_derivative_logs
    elif sf.kind == Kind.E_Q_BIG:
        if closed_form_derivatives:
            dlogs = _E_q_derivative_logs
    elif sf.kind == Kind.E_Q_SMALL and closed_form_derivatives:
        dlogs = _e_q_derivative_logs

    def rule(x):
        return eval_special(sf, _snap(x), ctx)

    def mp_rule(x):
        return mp_special(sf, _snap(x), mp.mpf(q))

    def log_rule(x):
        return log_special(sf, _snap(x), ctx)

    def _snap(x):
        # real lattice points of the cancelling series are rebuilt exactly
        if sf.kind not in (Kind.GAUSS_CAL, Kind.G_M):
            return x
        xc = complex(x)
        if xc.imag != 0 or xc.real == 0:
            return x
        loc = locate(xc.real, gamma, ctx, rel=1e-12)
        return x if loc is None else ExactPoint(loc[0], loc[1], gamma, q)

    return LatticeFunction.from_rule(rule, gamma, name=sf.label, analyticity=sf.analyticity,
                                     parity=sf.parity, mp_rule=mp_rule, log_rule=log_rule,
                                     series=series, derivative_logs=dlogs)


def parse_function_name(spec: str) -> SpecialFunction:
    """Parse ``name[:param]`` as used on the command line."""
    name, _, param = spec.partition(":")
    aliases = {"eq": Kind.E_Q_SMALL, "Eq": Kind.E_Q_BIG, "gauss_e": Kind.GAUSS_SMALL,
               "gauss_E": Kind.GAUSS_BIG, "gauss_cal": Kind.GAUSS_CAL, "gm": Kind.G_M,
               "alt": Kind.ALT_EXAMPLE, "strip": Kind.STRIP_EXAMPLE}
    if name not in aliases:
        raise DomainError(f"unknown function {name!r}; known: {', '.join(aliases)}")
    kind = aliases[name]
    if kind == Kind.G_M:
        if not param:
            raise DomainError("gm needs a parameter, e.g. gm:2")
        try:
            return SpecialFunction(kind, int(param))
        except ValueError:
            raise DomainError(f"bad m {param!r}") from None
    if kind == Kind.STRIP_EXAMPLE:
        if not param:
            raise DomainError("strip needs a parameter, e.g. strip:0.5")
        try:
            return SpecialFunction(kind, float(param))
        except ValueError:
            raise DomainError(f"bad c {param!r}") from None
    if param:
        raise DomainError(f"{name} takes no parameter")
    return SpecialFunction(kind)

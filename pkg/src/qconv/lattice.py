"""The q-lattice L(gamma), lattice functions, q-derivatives and q-integrals.

Functions on the lattice are either rules (evaluators on complex numbers,
optionally with an mpmath evaluator, a log evaluator, an attached power
series and a closed form for derivatives) or tables of sampled values.
Bilateral sums are accumulated in the log domain so that values far below
the double precision range still contribute correctly.
"""

from __future__ import annotations

import cmath
import csv
import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from ._mp import difference_row, stencil_dps, to_complex_log
from .errors import DomainError, WindowExceeded, ZeroPoint
from .powerseries import PowerSeries
from .qcore import QContext

NEG_INF = complex(-math.inf, 0.0)


class Parity(enum.Enum):
    EVEN = "EVEN"
    ODD = "ODD"
    NONE = "NONE"


class Status(str, enum.Enum):
    CONVERGED = "CONVERGED"
    DIVERGENT = "DIVERGENT"
    CAPPED = "CAPPED"
    INPUT_EXHAUSTED = "INPUT_EXHAUSTED"


@dataclass(frozen=True)
class Analyticity:
    """Where a rule is known to be holomorphic.

    ``kind`` is one of ENTIRE, DISK, STRIP, LATTICE_ONLY; ``a`` is the disk
    radius or strip half width.
    """

    kind: str
    a: float | None = None

    def __post_init__(self):
        if self.kind not in ("ENTIRE", "DISK", "STRIP", "LATTICE_ONLY"):
            raise DomainError(f"unknown analyticity kind {self.kind!r}")
        if self.kind in ("DISK", "STRIP") and not (self.a is not None and self.a > 0):
            raise DomainError(f"{self.kind} needs a positive parameter")

    def __str__(self):
        return self.kind if self.a is None else f"{self.kind}({self.a:g})"


ENTIRE = Analyticity("ENTIRE")
LATTICE_ONLY = Analyticity("LATTICE_ONLY")


def disk(a: float) -> Analyticity:
    return Analyticity("DISK", float(a))


def strip(a: float) -> Analyticity:
    return Analyticity("STRIP", float(a))


@dataclass(frozen=True)
class Lattice:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    def point(self, epsilon: int, k: int, ctx: QContext) -> "LatticePoint":
        return LatticePoint(epsilon, k, self.gamma, ctx.q)

    def locate(self, x, ctx: QContext):
        return locate(x, self.gamma, ctx)


@dataclass(frozen=True)
class LatticePoint:
    """The point ``epsilon * q^k * gamma``; the value is computed once."""

    epsilon: int
    k: int
    gamma: float
    q: float
    value: float = field(init=False)

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise DomainError("epsilon must be +1 or -1")
        object.__setattr__(self, "value", self.epsilon * self.q ** self.k * self.gamma)

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        return float(self.value)

    def shifted(self, n: int) -> "LatticePoint":
        """The point ``q^n`` times this one."""
        return LatticePoint(self.epsilon, self.k + n, self.gamma, self.q)


def locate(x, gamma: float, ctx: QContext, rel: float = 1e-11):
    """Return ``(epsilon, k)`` when ``x = epsilon q^k gamma``, else ``None``."""
    if isinstance(x, LatticePoint):
        if abs(x.gamma - gamma) > rel * gamma or x.q != ctx.q:
            return None
        return x.epsilon, x.k
    x = complex(x)
    if x.imag != 0 or x.real == 0:
        return None
    eps = 1 if x.real > 0 else -1
    k = round(math.log(abs(x.real) / gamma) / ctx.log_q)
    if abs(abs(x.real) - ctx.q ** k * gamma) <= rel * abs(x.real):
        return eps, k
    return None


def _as_number(x):
    return x.value if isinstance(x, LatticePoint) else x


@dataclass
class Table:
    """Sampled values on ``{epsilon q^k gamma : k_lo <= k <= k_hi}``.

    ``values[+1][i]`` holds the value at index ``k_lo + i`` with epsilon=+1.
    ``precision`` is ``None`` for double values or the mpmath dps of stored
    mpmath values.
    """

    gamma: float
    k_lo: int
    k_hi: int
    values: dict
    precision: int | None = None

    def __post_init__(self):
        if self.k_hi < self.k_lo:
            raise DomainError("table window is empty")
        n = self.k_hi - self.k_lo + 1
        for eps in (1, -1):
            vals = self.values.get(eps)
            if vals is None or len(vals) != n:
                raise DomainError(f"table needs {n} values for epsilon={eps}")
            finite = mpmath.isfinite if self.precision else (lambda v: cmath.isfinite(complex(v)))
            if not all(finite(v) for v in vals):
                raise DomainError("table values must be finite")

    def get(self, eps: int, k: int):
        if not self.k_lo <= k <= self.k_hi:
            raise WindowExceeded(f"index {k} outside table window [{self.k_lo}, {self.k_hi}]")
        return self.values[eps][k - self.k_lo]


class LatticeFunction:
    """A complex-valued function known on L(gamma).

    Build instances with :meth:`from_rule` or :meth:`from_table`.
    """

    def __init__(self, *, gamma: float, name: str = "", analyticity: Analyticity = LATTICE_ONLY,
                 parity: Parity = Parity.NONE, rule: Callable | None = None,
                 mp_rule: Callable | None = None, log_rule: Callable | None = None,
                 series: PowerSeries | None = None, derivative_logs: Callable | None = None,
                 table: Table | None = None):
        if not gamma > 0:
            raise DomainError(f"gamma must be positive, got {gamma}")
        if (rule is None) == (table is None):
            raise DomainError("a lattice function is either a rule or a table")
        self.gamma = float(gamma)
        self.name = name
        self.analyticity = analyticity
        self.parity = parity
        self._rule = rule
        self._mp_rule = mp_rule
        self._log_rule = log_rule
        self.series = series
        self._derivative_logs = derivative_logs
        self.table = table
        self._cache: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def from_rule(cls, rule: Callable, gamma: float, **kw) -> "LatticeFunction":
        return cls(rule=rule, gamma=gamma, **kw)

    @classmethod
    def from_table(cls, table: Table, name: str = "", parity: Parity = Parity.NONE):
        return cls(table=table, gamma=table.gamma, name=name, parity=parity)

    @classmethod
    def from_values(cls, gamma: float, k_lo: int, pos: Sequence, neg: Sequence, **kw):
        t = Table(gamma, k_lo, k_lo + len(pos) - 1, {1: list(pos), -1: list(neg)})
        return cls.from_table(t, **kw)

    def __repr__(self):
        kind = "Table" if self.is_table else "Rule"
        return f"LatticeFunction({self.name or kind}, gamma={self.gamma:g}, {self.analyticity})"

    @property
    def is_table(self) -> bool:
        return self.table is not None

    @property
    def has_mp(self) -> bool:
        return self._mp_rule is not None or (self.is_table and self.table.precision is not None)

    # -- evaluation -------------------------------------------------------

    def __call__(self, x):
        if self.is_table:
            loc = locate(x, self.gamma, _ctx_for(x))
            if loc is None:
                raise DomainError(f"{x!r} is not a point of the table lattice")
            return complex(self.table.get(*loc))
        return self._rule(_as_number(x))

    def value_at(self, eps: int, k: int, ctx: QContext):
        if self.is_table:
            return complex(self.table.get(eps, k))
        return self._rule(eps * ctx.q ** k * self.gamma)

    def log_value_at(self, eps: int, k: int, ctx: QContext) -> complex:
        """Complex logarithm of ``f(eps q^k gamma)``; ``-inf`` for zeros."""
        if self.is_table:
            v = self.table.get(eps, k)
            if self.table.precision:
                return to_complex_log(v)
            return _clog(complex(v))
        x = eps * ctx.q ** k * self.gamma
        if self._log_rule is not None:
            return self._log_rule(x)
        return _clog(complex(self._rule(x)))

    def log_value_on(self, eps: int, k: int, gamma: float, ctx: QContext) -> complex:
        """Like :meth:`log_value_at` but on ``L(gamma)``, which may differ from the home lattice."""
        if self.is_table or gamma == self.gamma:
            return self.log_value_at(eps, k, ctx)
        return self.log_value(eps * ctx.q ** k * gamma)

    def log_value(self, x) -> complex:
        if self._log_rule is not None and not self.is_table:
            return self._log_rule(_as_number(x))
        return _clog(complex(self(x)))

    def mp_value(self, x):
        """Value at the current mpmath precision (rules with an mp evaluator)."""
        if self._mp_rule is None:
            raise DomainError(f"{self.name or 'function'} has no extended precision evaluator")
        return self._mp_rule(mp.mpmathify(_as_number(x)))

    # -- derivatives ------------------------------------------------------

    def derivative_logs(self, x, order: int, ctx: QContext, method: str = "auto") -> np.ndarray:
        """Complex logs of ``(d^e f)(x)`` for ``e = 0..order``.

        Provider precedence for rules: an attached closed form, the power
        series at ``x = 0``, an extended precision difference stencil when an
        mpmath evaluator exists, and a double precision stencil otherwise.
        Tables use the exact stencil on stored values and need the indices
        ``k .. k+order`` of the same sign inside the window.
        """
        if method not in ("auto", "stencil"):
            raise DomainError(f"unknown derivative method {method!r}")
        key = (_key(x), ctx.q, method)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None and len(hit) > order:
            return hit[: order + 1]
        logs = self._compute_derivative_logs(x, order, ctx, method)
        with self._lock:
            self._cache[key] = logs
        return logs

    def derivatives(self, x, order: int, ctx: QContext, method: str = "auto") -> list:
        return [exp_log(l) for l in self.derivative_logs(x, order, ctx, method)]

    def _compute_derivative_logs(self, x, order, ctx, method):
        q = ctx.q
        if self.is_table:
            loc = locate(x, self.gamma, ctx)
            if loc is None:
                raise DomainError(f"{x!r} is not a point of the table lattice")
            eps, k = loc
            if k + order > self.table.k_hi or k < self.table.k_lo:
                raise WindowExceeded(
                    f"order {order} at index {k} needs indices up to {k + order}, "
                    f"window ends at {self.table.k_hi}")
            row = [self.table.get(eps, k + j) for j in range(order + 1)]
            xv = eps * q ** k * self.gamma
            if self.table.precision:
                with mp.workdps(max(self.table.precision, 20)):
                    xs = mp.mpf(eps) * mp.mpf(q) ** k * mp.mpf(self.gamma)
                    d = difference_row(row, xs, mp.mpf(q))
                    return np.array([to_complex_log(v) for v in d])
            d = difference_row([complex(v) for v in row], xv, q)
            return np.array([_clog(v) for v in d])
        xn = _as_number(x)
        if self._derivative_logs is not None and method == "auto":
            res = self._derivative_logs(xn, order, ctx)
            if res is not None:
                return np.asarray(res, dtype=complex)
        if xn == 0:
            if self.series is None or method == "stencil":
                raise ZeroPoint(f"derivatives at 0 need a power series for {self.name or 'f'}")
            if order >= len(self.series) and math.isfinite(self.series.radius_estimate):
                raise WindowExceeded(f"order {order} needs more than {len(self.series)} "
                                     "Taylor coefficients")
            vals = self.series.derivatives_at(0.0, order, ctx)
            return np.array([_clog(complex(v)) for v in vals])
        if self._mp_rule is not None:
            dps = stencil_dps(order, abs(xn), q)
            with mp.workdps(dps):
                qm = mp.mpf(q)
                if isinstance(x, LatticePoint):
                    xm = mp.mpf(x.epsilon) * qm ** x.k * mp.mpf(x.gamma)
                else:
                    xm = mp.mpmathify(xn)
                row = []
                t = xm
                for _ in range(order + 1):
                    row.append(self._mp_rule(t))
                    t = t * qm
                d = difference_row(row, xm, qm)
                return np.array([to_complex_log(v) for v in d])
        row = [complex(self._rule(xn * q ** j)) for j in range(order + 1)]
        d = difference_row(row, complex(xn), q)
        return np.array([_clog(v) for v in d])

    # -- sampling ---------------------------------------------------------

    def sample(self, k_lo: int, k_hi: int, ctx: QContext, precision: int | None = None) -> "LatticeFunction":
        """Tabulate the function on ``k_lo <= k <= k_hi`` for both signs."""
        if self.is_table:
            raise DomainError("sampling is defined for rules")
        vals = {1: [], -1: []}
        if precision:
            with mp.workdps(precision):
                qm = mp.mpf(ctx.q)
                for eps in (1, -1):
                    for k in range(k_lo, k_hi + 1):
                        xm = mp.mpf(eps) * qm ** k * mp.mpf(self.gamma)
                        vals[eps].append(+self.mp_value(xm))
        else:
            for eps in (1, -1):
                for k in range(k_lo, k_hi + 1):
                    vals[eps].append(complex(self.value_at(eps, k, ctx)))
        return LatticeFunction.from_table(Table(self.gamma, k_lo, k_hi, vals, precision),
                                          name=self.name, parity=self.parity)


def exp_log(l: complex) -> complex:
    """Inverse of the complex logs used here, exact for real signs.

    Arguments that are integer multiples of pi give a result with exactly
    zero imaginary part, so real quantities stay real.
    """
    if l.real == -math.inf:
        return 0j
    r = math.exp(l.real) if l.real < 709.7 else math.inf
    t = l.imag / math.pi
    n = round(t)
    if abs(t - n) < 1e-12:
        return complex(-r if n % 2 else r, 0.0)
    return complex(r * math.cos(l.imag), r * math.sin(l.imag))


def _clog(v: complex) -> complex:
    return NEG_INF if v == 0 else cmath.log(v)


def _key(x):
    if isinstance(x, LatticePoint):
        return ("lp", x.epsilon, x.k, x.gamma, x.q)
    return complex(x)


def _ctx_for(x):
    if isinstance(x, LatticePoint):
        return QContext(x.q)
    raise DomainError("tables are evaluated at LatticePoint arguments")


# -- operators ---------------------------------------------------------------

def q_derivative(f: LatticeFunction, x, order: int, ctx: QContext, method: str = "auto") -> complex:
    """``(d^order f)(x)`` with ``(d f)(x) = (f(x) - f(qx)) / ((1-q) x)``.

    ``method="stencil"`` forces the difference quotient even when the
    function carries a closed form or a power series.
    """
    if order < 0:
        raise DomainError("derivative order must be nonnegative")
    if _as_number(x) == 0 and (f.is_table or f.series is None or method == "stencil"):
        raise ZeroPoint("x = 0 is not admissible for this representation")
    return exp_log(f.derivative_logs(x, order, ctx, method=method)[order])


def q_shift(f: LatticeFunction, n: int, ctx: QContext | None = None) -> LatticeFunction:
    """The function ``x -> f(q^n x)``.  Rules need ``ctx`` for the value of q."""
    if n == 0:
        return f
    name = f"Q^{n}({f.name})" if f.name else ""
    if f.is_table:
        t = f.table
        vals = {eps: list(v) for eps, v in t.values.items()}
        return LatticeFunction.from_table(Table(t.gamma, t.k_lo - n, t.k_hi - n, vals, t.precision),
                                          name=name, parity=f.parity)
    if ctx is None:
        raise DomainError("q_shift of a rule needs a QContext")
    q = ctx.q
    s = q ** n
    rule, mp_rule, log_rule, dlogs = f._rule, f._mp_rule, f._log_rule, f._derivative_logs
    an = f.analyticity
    if an.kind == "DISK":
        an = disk(an.a / s)
    elif an.kind == "STRIP":
        an = strip(an.a / s)
    series = None
    if f.series is not None:
        c = f.series.coefficients * s ** np.arange(len(f.series))
        series = PowerSeries(c, f.series.radius_estimate / s)
    new_mp = None
    if mp_rule is not None:
        def new_mp(x):
            return mp_rule(x * mp.mpf(q) ** n)
    new_log = None
    if log_rule is not None:
        def new_log(x):
            return log_rule(x * s)
    new_d = None
    if dlogs is not None:
        def new_d(x, order, c):
            res = dlogs(x * s, order, c)
            if res is None:
                return None
            return np.asarray(res) + np.arange(order + 1) * n * math.log(q)
    return LatticeFunction.from_rule(lambda x: rule(x * s), f.gamma, name=name, analyticity=an,
                                     parity=f.parity, mp_rule=new_mp, log_rule=new_log,
                                     series=series, derivative_logs=new_d)


# -- bilateral sums ----------------------------------------------------------

@dataclass
class QIntegralResult:
    """Outcome of a truncated lattice sum.

    ``abs_value`` is the sum of term moduli (for moments this is the strict
    moment before normalisation); ``log_abs_value`` carries ``log|value|``
    also when ``value`` underflows.
    """

    value: complex
    k_neg_used: int
    k_pos_used: int
    tail_bound: float
    status: Status
    abs_value: float = 0.0
    log_abs_value: float = -math.inf
    log_abs_mass: float = -math.inf
    phase: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED


class _LogAccumulator:
    """Sum of complex numbers given by their logs, with a moving scale."""

    def __init__(self):
        self.scale = -math.inf
        self.s = 0j
        self.a = 0.0

    def add(self, log_term: complex, log_abs: float):
        m = max(log_term.real, log_abs)
        if m == -math.inf:
            return
        if m > self.scale:
            f = math.exp(self.scale - m) if self.scale > -math.inf else 0.0
            self.s *= f
            self.a *= f
            self.scale = m
        if log_term.real > -math.inf:
            self.s += cmath.exp(log_term - self.scale)
        if log_abs > -math.inf:
            self.a += math.exp(log_abs - self.scale)

    @property
    def log_abs_sum(self) -> float:
        return math.log(abs(self.s)) + self.scale if self.s != 0 else -math.inf

    @property
    def log_mass(self) -> float:
        return math.log(self.a) + self.scale if self.a > 0 else -math.inf


def bilateral_sum(term: Callable[[int], tuple], ctx: QContext, *, k_min: int | None = None,
                  k_max: int | None = None, one_sided: bool = False,
                  rel_floor: float = 1e-10) -> QIntegralResult:
    """Sum ``T_k`` over ``k`` outward from 0, each direction cut independently.

    ``term(k)`` returns ``(log T_k, log |T_k|_abs)``: the complex log of the
    signed term and the log of its absolute contribution (these differ when a
    term pairs two lattice points).  A direction stops after ``decay_window``
    consecutive terms below ``tail_rel_tol`` times the current scale, where
    the scale is ``|partial sum|`` but never less than ``rel_floor`` times
    the accumulated absolute mass (so cancelling sums still terminate).
    A direction is DIVERGENT when its term logs grow for ``decay_window``
    consecutive steps with a strictly increasing growth rate.  Geometric
    growth at a constant rate is the normal rise toward the peak when ``gamma``
    sits far inside the lattice, so it only ends at the index cap (CAPPED),
    or earlier when the lattice point overflows a double (also CAPPED).
    """
    tol = ctx.tail_rel_tol
    win = ctx.decay_window
    cap = ctx.max_lattice_index
    log_tol = math.log(tol)
    log_floor = math.log(rel_floor)
    acc = _LogAccumulator()

    lo = -cap if k_min is None else max(-cap, k_min)
    hi = cap if k_max is None else min(cap, k_max)
    dirs = {1: dict(active=True, small=0, last=None, ratios=[], k=0, ended="", tail=-math.inf),
            -1: dict(active=not one_sided, small=0, last=None, ratios=[], k=0, ended="", tail=-math.inf)}
    if one_sided:
        dirs[-1]["ended"] = "none"
    status = Status.CONVERGED

    def visit(k, d):
        st = dirs[d]
        try:
            lt, la = term(k)
        except OverflowError:
            # the lattice point itself is out of double range: same as the cap
            st["active"] = False
            st["ended"] = "cap"
            return
        acc.add(lt, la)
        st["k"] = k
        la_eff = la if la > -math.inf else lt.real
        scale = max(acc.log_abs_sum, log_floor + acc.log_mass)
        small = la_eff == -math.inf or (scale > -math.inf and la_eff <= log_tol + scale)
        st["small"] = st["small"] + 1 if small else 0
        if la_eff > -math.inf:
            if st["last"] is not None:
                st["ratios"].append(la_eff - st["last"])
                if len(st["ratios"]) > win:
                    st["ratios"].pop(0)
            st["last"] = la_eff
        else:
            st["last"] = None
            st["ratios"].clear()
        r = st["ratios"]
        if st["small"] >= win:
            st["active"] = False
            st["ended"] = "tail"
            if len(r) >= 1 and r[-1] < 0 and st["last"] is not None:
                rho = math.exp(r[-1])
                st["tail"] = st["last"] + math.log(rho / (1 - rho))
            elif st["last"] is not None:
                st["tail"] = st["last"] + math.log(win)
        elif (len(r) >= win and all(v > 0 for v in r)
              and all(b > a + 1e-9 for a, b in zip(r, r[1:]))):
            st["active"] = False
            st["ended"] = "divergent"

    visit(0, 1)
    n = 0
    while dirs[1]["active"] or dirs[-1]["active"]:
        n += 1
        for d in (1, -1):
            st = dirs[d]
            if not st["active"]:
                continue
            k = d * n
            if k > hi or k < lo:
                st["active"] = False
                st["ended"] = "cap"
                continue
            visit(k, d)

    ends = {dirs[1]["ended"], dirs[-1]["ended"]}
    if "divergent" in ends:
        status = Status.DIVERGENT
    elif "cap" in ends:
        status = Status.CAPPED
    log_tail = _logaddexp(dirs[1]["tail"], dirs[-1]["tail"])
    value = exp_log(cmath.log(acc.s) + acc.scale) if acc.s != 0 else 0j
    mass = _safe_exp(acc.log_mass)
    phase = cmath.phase(acc.s) if acc.s != 0 else 0.0
    lav = acc.log_abs_sum
    if status == Status.CONVERGED:
        log_ref = max(acc.log_abs_sum, log_floor + acc.log_mass)
        if log_tail > log_tol + log_ref + math.log(10):
            status = Status.CAPPED
    return QIntegralResult(value=value, k_neg_used=-dirs[-1]["k"] if not one_sided else 0,
                           k_pos_used=dirs[1]["k"], tail_bound=_safe_exp(log_tail), status=status,
                           abs_value=mass, log_abs_value=lav, log_abs_mass=acc.log_mass,
                           phase=phase)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _window(f: LatticeFunction, gamma: float):
    if f.is_table:
        if abs(f.table.gamma - gamma) > 1e-12 * gamma:
            raise DomainError(f"table lives on L({f.table.gamma}), not L({gamma})")
        return f.table.k_lo, f.table.k_hi
    return None, None


def lattice_integral_terms(f: LatticeFunction, gamma: float, ctx: QContext, power: int = 0,
                           cache: dict | None = None, use_abs: bool = False):
    """Term function for ``(1-q) sum_k sum_eps x f(x) x^power`` at ``x = eps q^k gamma``.

    The two signs are paired before summation; parity flags make the pair an
    exact zero when the integrand is odd.
    """
    lq = ctx.log_q
    lg = math.log(gamma)
    base = math.log(1 - ctx.q)
    par = f.parity
    exact_zero = (par == Parity.EVEN and power % 2 == 1) or (par == Parity.ODD and power % 2 == 0)

    def logf(eps, k):
        if cache is None:
            return f.log_value_on(eps, k, gamma, ctx)
        key = (eps, k)
        v = cache.get(key)
        if v is None:
            v = f.log_value_on(eps, k, gamma, ctx)
            cache[key] = v
        return v

    def term(k):
        lx = base + (power + 1) * (k * lq + lg)
        lp = logf(1, k)
        if par == Parity.NONE or use_abs:
            ln = logf(-1, k)
        else:
            ln = lp if par == Parity.EVEN else lp + 1j * math.pi
        la = _logaddexp(lp.real, ln.real) + lx
        if exact_zero and not use_abs:
            return NEG_INF, la
        # signed pair f(x) + (-1)^power f(-x), with the (-1)^power folded into ln
        ln_signed = ln + (1j * math.pi if power % 2 else 0)
        lt = _logadd(lp, ln_signed) + lx
        if use_abs:
            return complex(la), la
        return lt, la

    return term


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = max(a, b)
    return m + math.log(math.exp(a - m) + math.exp(b - m))


def _logadd(a: complex, b: complex) -> complex:
    """log(exp(a) + exp(b)) for complex logs."""
    if a.real == -math.inf:
        return b
    if b.real == -math.inf:
        return a
    m = max(a.real, b.real)
    s = cmath.exp(a - m) + cmath.exp(b - m)
    if s == 0:
        return NEG_INF
    return cmath.log(s) + m


def q_integral_unbounded(f: LatticeFunction, gamma: float, ctx: QContext) -> QIntegralResult:
    """``(1-q) sum_{k in Z} sum_{eps} q^k gamma f(eps q^k gamma)``."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    k_lo, k_hi = _window(f, gamma)
    if f.parity == Parity.ODD:
        return QIntegralResult(0j, 0, 0, 0.0, Status.CONVERGED)
    term = lattice_integral_terms(f, gamma, ctx)
    return bilateral_sum(term, ctx, k_min=k_lo, k_max=k_hi)


def q_integral_bounded(f: LatticeFunction, gamma: float, ctx: QContext) -> QIntegralResult:
    """``(1-q) sum_{k >= 0} sum_{eps} q^k gamma f(eps q^k gamma)``."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    k_lo, k_hi = _window(f, gamma)
    if f.parity == Parity.ODD:
        return QIntegralResult(0j, 0, 0, 0.0, Status.CONVERGED)
    if k_lo is not None and k_lo > 0:
        raise WindowExceeded("bounded integral needs the table to start at k <= 0")
    term = lattice_integral_terms(f, gamma, ctx)
    return bilateral_sum(term, ctx, k_min=0, k_max=k_hi, one_sided=True)


# -- CSV ---------------------------------------------------------------------

CSV_HEADER = ("epsilon", "k", "re", "im")


def write_table_csv(f: LatticeFunction, path) -> None:
    """Write a table as CSV with columns epsilon, k, re, im (17 significant digits)."""
    if not f.is_table:
        raise DomainError("only tables can be exported")
    t = f.table
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for eps in (1, -1):
            for i, v in enumerate(t.values[eps]):
                v = complex(v)
                w.writerow([eps, t.k_lo + i, f"{v.real:.17e}", f"{v.imag:.17e}"])


def read_table_csv(path, gamma: float, name: str = "") -> LatticeFunction:
    """Read a table written by :func:`write_table_csv` (header row required)."""
    rows = {}
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise DomainError(f"CSV header must be {','.join(CSV_HEADER)}")
        for n, line in enumerate(r, start=2):
            if not line:
                continue
            try:
                eps, k, re, im = int(line[0]), int(line[1]), float(line[2]), float(line[3])
            except (ValueError, IndexError):
                raise DomainError(f"malformed CSV row {n}: {line}") from None
            if eps not in (1, -1):
                raise DomainError(f"bad epsilon {eps}")
            rows[(eps, k)] = complex(re, im)
    if not rows:
        raise DomainError("CSV table has no rows")
    ks = sorted({k for _, k in rows})
    k_lo, k_hi = ks[0], ks[-1]
    vals = {}
    for eps in (1, -1):
        try:
            vals[eps] = [rows[(eps, k)] for k in range(k_lo, k_hi + 1)]
        except KeyError as exc:
            raise DomainError(f"CSV table is missing entry {exc.args[0]}") from None
    return LatticeFunction.from_table(Table(gamma, k_lo, k_hi, vals), name=name)

"""Moments, strict moments, the left-type classifier and pointwise decay.

``mu_e = q^{(e^2+e)/2} int f(x) x^e d_q x`` and ``nu_e`` is the same with
``|f(x) x^e|``.  Every entry keeps ``log|mu_e|`` and ``log nu_e`` so that
orders whose moments are far below the double range remain usable for the
growth fits.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (CapExceeded, DivergentSeries, DomainError, EvaluationFailure,
                     InsufficientData, NotOfLeftType, RangeError)
from .lattice import (LatticeFunction, Parity, QIntegralResult, Status, _safe_exp, bilateral_sum,
                      exp_log, lattice_integral_terms)
from .qcore import QContext, log_q_factorial, q_factorial

NEG_INF = -math.inf
# a computed moment below this fraction of its strict moment is rounding
# residue of a cancelling lattice sum and is indistinguishable from zero
ZERO_REL = 1e-12


@dataclass
class MomentEntry:
    e: int
    mu: complex
    nu: float
    log_abs_mu: float
    log_nu: float
    phase: float
    status: Status

    @property
    def log_mu(self) -> complex:
        """Complex log of ``mu_e`` (``-inf`` for an exact zero)."""
        if self.log_abs_mu == NEG_INF:
            return complex(NEG_INF, 0.0)
        return complex(self.log_abs_mu, self.phase)

    @property
    def negligible(self) -> bool:
        """True for zeros and for cancellation residue ``|mu_e| <= ZERO_REL nu_e``."""
        if self.log_abs_mu == NEG_INF:
            return True
        return self.log_nu > NEG_INF and self.log_abs_mu < self.log_nu + math.log(ZERO_REL)


def _finite(v: float):
    return v if math.isfinite(v) else None


class MomentSequence:
    """Moments ``mu_e`` and strict moments ``nu_e`` for ``e = 0..E`` on L(gamma).

    A sequence may carry a generator that produces further entries on
    demand (``ensure``); closed-form sequences and convolution moments use
    this so that consumers can ask for as many orders as their tail rule
    needs.
    """

    def __init__(self, gamma: float, q: float, entries=None,
                 generator: Callable[[int], MomentEntry] | None = None,
                 parity: Parity = Parity.NONE, label: str = "", exact: bool = False):
        self.gamma = float(gamma)
        self.q = float(q)
        self.entries: list[MomentEntry] = list(entries or [])
        self._generator = generator
        self.parity = parity
        self.label = label
        # exact sequences come from closed forms; computed zeros are true zeros
        self.exact = exact
        # False when nu_e is not known (it then mirrors |mu_e|)
        self.has_strict = True

    def __repr__(self):
        return f"MomentSequence({self.label or '?'}, gamma={self.gamma:g}, E={self.E})"

    @property
    def E(self) -> int:
        return len(self.entries) - 1

    @property
    def extendable(self) -> bool:
        return self._generator is not None

    def ensure(self, E: int) -> bool:
        """Make entries up to ``E`` available; False if that is impossible."""
        while self.E < E:
            if self._generator is None:
                return False
            self.entries.append(self._generator(len(self.entries)))
        return True

    def entry(self, e: int) -> MomentEntry:
        if e < 0:
            raise RangeError("negative moment order")
        if not self.ensure(e):
            raise RangeError(f"moment order {e} beyond computed range {self.E}")
        return self.entries[e]

    def mu(self, e: int) -> complex:
        return self.entry(e).mu

    def nu(self, e: int) -> float:
        return self.entry(e).nu

    def log_mu(self, e: int) -> complex:
        return self.entry(e).log_mu

    def log_mu_significant(self, e: int) -> complex:
        """``log mu_e``, or ``-inf`` when the entry is :attr:`MomentEntry.negligible`.

        Series built on moments use this so that rounding residue of a
        vanishing moment does not feed a sum that never settles.
        """
        en = self.entry(e)
        return complex(NEG_INF, 0.0) if en.negligible else en.log_mu

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "q": self.q,
            "entries": [
                {"e": en.e, "mu_re": _finite(en.mu.real), "mu_im": _finite(en.mu.imag),
                 "nu": _finite(en.nu),
                 "log_abs_mu": None if en.log_abs_mu == NEG_INF else en.log_abs_mu,
                 "status": en.status.value}
                for en in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_log_values(cls, log_mu: Callable[[int], complex], gamma: float, ctx: QContext,
                        E: int = 0, log_nu: Callable[[int], float] | None = None,
                        parity: Parity = Parity.NONE, label: str = "") -> "MomentSequence":
        """Sequence from a closed form for ``log mu_e`` (extendable to any order)."""

        def gen(e):
            l = complex(log_mu(e))
            ln = l.real if log_nu is None else log_nu(e)
            return _entry(e, l, ln, Status.CONVERGED)

        ms = cls(gamma, ctx.q, generator=gen, parity=parity, label=label, exact=True)
        ms.ensure(E)
        return ms

    @classmethod
    def from_values(cls, mu: Callable[[int], complex], gamma: float, ctx: QContext, E: int = 0,
                    parity: Parity = Parity.NONE, label: str = "") -> "MomentSequence":
        """Sequence from a closed form for ``mu_e`` in double precision."""

        def log_mu(e):
            v = complex(mu(e))
            return complex(NEG_INF, 0.0) if v == 0 else complex(math.log(abs(v)), math.atan2(v.imag, v.real))

        return cls.from_log_values(log_mu, gamma, ctx, E, parity=parity, label=label)


def _entry(e: int, log_mu: complex, log_nu: float, status: Status) -> MomentEntry:
    mu = exp_log(log_mu)
    nu = _safe_exp(log_nu) if log_nu > NEG_INF else 0.0
    if nu < abs(mu):
        # the strict moment dominates the moment; equalise rounding differences
        nu = abs(mu)
        log_nu = max(log_nu, log_mu.real)
    return MomentEntry(e, mu, nu, log_mu.real, log_nu,
                       log_mu.imag if log_mu.real > NEG_INF else 0.0, status)


def _prefactor_log(e: int, ctx: QContext) -> float:
    return (e * e + e) / 2 * ctx.log_q


def _moment_result(f: LatticeFunction, e: int, gamma: float, ctx: QContext,
                   cache: dict | None = None) -> QIntegralResult:
    k_lo = k_hi = None
    if f.is_table:
        if abs(f.table.gamma - gamma) > 1e-12 * gamma:
            raise DomainError(f"table lives on L({f.table.gamma}), not L({gamma})")
        k_lo, k_hi = f.table.k_lo, f.table.k_hi
    term = lattice_integral_terms(f, gamma, ctx, power=e, cache=cache)
    return bilateral_sum(term, ctx, k_min=k_lo, k_max=k_hi)


def _entry_from_result(e: int, res: QIntegralResult, ctx: QContext, parity: Parity) -> MomentEntry:
    pl = _prefactor_log(e, ctx)
    exact_zero = (parity == Parity.EVEN and e % 2) or (parity == Parity.ODD and e % 2 == 0)
    if exact_zero or res.log_abs_value == NEG_INF:
        lm = complex(NEG_INF, 0.0)
    else:
        lm = complex(res.log_abs_value + pl, res.phase)
    ln = res.log_abs_mass + pl if res.log_abs_mass > NEG_INF else NEG_INF
    return _entry(e, lm, ln, res.status)


def _raise_for(res: QIntegralResult, what: str):
    if res.status == Status.DIVERGENT:
        raise DivergentSeries(f"{what}: lattice sum diverges")
    if res.status == Status.CAPPED:
        raise CapExceeded(f"{what}: lattice sum capped before the tail rule was met")


def moment(f: LatticeFunction, e: int, gamma: float, ctx: QContext) -> complex:
    """``mu_{e,gamma}(f) = q^{(e^2+e)/2} int_gamma f(x) x^e d_q x``."""
    if e < 0:
        raise DomainError("moment order must be nonnegative")
    res = _moment_result(f, e, gamma, ctx)
    _raise_for(res, f"moment {e}")
    return _entry_from_result(e, res, ctx, f.parity).mu


def strict_moment(f: LatticeFunction, e: int, gamma: float, ctx: QContext) -> float:
    """``nu_{e,gamma}(f) = q^{(e^2+e)/2} int_gamma |f(x) x^e| d_q x``."""
    if e < 0:
        raise DomainError("moment order must be nonnegative")
    res = _moment_result(f, e, gamma, ctx)
    _raise_for(res, f"strict moment {e}")
    return _entry_from_result(e, res, ctx, f.parity).nu


def moment_sequence(f: LatticeFunction, E: int, gamma: float, ctx: QContext,
                    extendable: bool = True) -> MomentSequence:
    """Moments and strict moments of ``f`` for ``e = 0..E``.

    Function values are cached across orders.  Entries whose lattice sum
    fails keep their status (DIVERGENT or CAPPED) instead of raising.
    """
    cache: dict = {}

    def gen(e):
        return _entry_from_result(e, _moment_result(f, e, gamma, ctx, cache), ctx, f.parity)

    ms = MomentSequence(gamma, ctx.q, generator=gen, parity=f.parity, label=f.name)
    ms.ensure(E)
    if not extendable:
        ms._generator = None
    return ms


# -- classification -------------------------------------------------------------

class TypeKind(str, enum.Enum):
    LEFT = "LEFT"
    STRICT_LEFT = "STRICT_LEFT"


@dataclass
class TypeClassification:
    kind: TypeKind
    alpha_hat: float
    b_hat: float
    residual: float
    beta: float | None
    orders: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "alpha_hat": self.alpha_hat, "b_hat": self.b_hat,
                "residual": self.residual, "beta": self.beta, "orders": self.orders}


def classify_type(ms: MomentSequence, kind: "TypeKind | str" = TypeKind.STRICT_LEFT,
                  threshold: float = 0.5, rel_zero: float = ZERO_REL) -> TypeClassification:
    """Fit ``log m_e = (alpha/2) e^2 log q + e log b + const`` over ``e in [E/2, E]``.

    ``m_e`` is ``nu_e`` for the strict kind and ``|mu_e|`` otherwise.  Zero
    entries (odd orders of even functions, or ``|mu_e| <= rel_zero * nu_e``
    cancellation residue) are left out of the fit.
    """
    kind = TypeKind(kind)
    if kind == TypeKind.STRICT_LEFT and not ms.has_strict:
        raise InsufficientData("strict moments are not available for this sequence")
    E = ms.E
    lq = math.log(ms.q)
    xs, ys, orders = [], [], []
    for e in range(E // 2, E + 1):
        en = ms.entries[e]
        if kind == TypeKind.STRICT_LEFT:
            y = en.log_nu
        else:
            y = en.log_abs_mu
            if y > NEG_INF and en.log_nu > NEG_INF and y < en.log_nu + math.log(rel_zero):
                y = NEG_INF
        if y == NEG_INF or not math.isfinite(y):
            continue
        xs.append(e)
        ys.append(y)
        orders.append(e)
    if len(xs) < 5:
        raise InsufficientData(f"need at least 5 nonzero entries in [{E // 2}, {E}], got {len(xs)}")
    e = np.array(xs, dtype=float)
    A = np.column_stack([0.5 * e * e * lq, e, np.ones_like(e)])
    coef, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
    fitted = A @ coef
    residual = float(np.sqrt(np.mean((fitted - np.array(ys)) ** 2)))
    alpha = float(coef[0])
    b = float(math.exp(coef[1]))
    if residual > threshold:
        raise NotOfLeftType(f"fit residual {residual:.3g} exceeds {threshold}")
    if not alpha > 0:
        raise NotOfLeftType(f"fitted exponent {alpha:.3g} is not positive")
    beta = 1.0 / (1.0 - alpha) if alpha < 1 else None
    return TypeClassification(kind, alpha, b, residual, beta, orders)


# -- pointwise decay ---------------------------------------------------------------

@dataclass
class DecayReport:
    alpha: float
    beta_expected: float | None
    beta_fit: float | None
    c_fit: float | None
    residual: float | None
    forward_holds: bool
    vanishes_far_out: bool
    sup_near_zero: float
    bounded_near_zero: bool
    alpha_implied: float | None
    converse_holds: bool
    tolerance: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def pointwise_decay_check(f: LatticeFunction, gamma: float, alpha: float, j_max: int,
                          ctx: QContext, tolerance: float = 0.1, j_min: int | None = None,
                          near_zero_samples: int | None = None) -> DecayReport:
    """Compare the moment type with the decay of ``|f(+-q^{-j} gamma)|``.

    Forward direction: with ``beta = 1/(1-alpha)``, fit
    ``log|f(+-q^{-j} gamma)| = -(beta_fit/2) j^2 log(1/q) + j log c + const``
    over ``j in [j_min, j_max]`` and require ``|beta_fit - beta| <= tolerance``.
    For ``alpha >= 1`` the forward claim is that ``f`` vanishes at those points.
    Converse direction: a fitted ``beta_fit > 1`` together with boundedness on
    ``{+-q^j gamma : j >= 1}`` gives strict type ``1 - 1/beta_fit``.
    """
    if j_max < 4:
        raise DomainError("j_max must be at least 4")
    j_min = j_max // 2 if j_min is None else j_min
    lq = ctx.log_q
    js, ys = [], []
    vanish = True
    for j in range(j_min, j_max + 1):
        try:
            vals = [f.log_value_on(eps, -j, gamma, ctx).real for eps in (1, -1)]
        except Exception as exc:  # evaluation outside the domain of f
            raise EvaluationFailure(f"cannot evaluate at q^-{j} gamma: {exc}") from exc
        m = max(vals)
        if m > -690:
            vanish = False
        if m > NEG_INF:
            js.append(j)
            ys.append(m)
    beta_fit = c_fit = residual = None
    if len(js) >= 3:
        j = np.array(js, dtype=float)
        A = np.column_stack([0.5 * j * j * lq, j, np.ones_like(j)])
        coef, *_ = np.linalg.lstsq(A, np.array(ys), rcond=None)
        beta_fit = float(coef[0])
        c_fit = float(math.exp(coef[1]))
        residual = float(np.sqrt(np.mean((A @ coef - np.array(ys)) ** 2)))
    n_near = near_zero_samples or min(ctx.max_lattice_index, 200)
    sup = 0.0
    for jj in range(1, n_near + 1):
        for eps in (1, -1):
            v = f.log_value_on(eps, jj, gamma, ctx).real
            if v > NEG_INF:
                sup = max(sup, math.exp(min(v, 700.0)))
    bounded = math.isfinite(sup) and sup < 1e12
    if alpha >= 1:
        beta_expected = None
        forward = vanish
    else:
        beta_expected = 1.0 / (1.0 - alpha)
        forward = beta_fit is not None and abs(beta_fit - beta_expected) <= tolerance
    if vanish:
        alpha_implied = 1.0
    elif beta_fit is not None and beta_fit > 1:
        alpha_implied = 1.0 - 1.0 / beta_fit
    else:
        alpha_implied = None
    converse = bounded and alpha_implied is not None
    return DecayReport(alpha, beta_expected, beta_fit, c_fit, residual, forward, vanish, sup,
                       bounded, alpha_implied, converse, tolerance)


# -- identities ------------------------------------------------------------------------

def derivative_moment(ms: MomentSequence, e: int, k: int) -> complex:
    """``mu_{e+k,gamma}(d^k f) = (-1)^k [e+k]_q! / [e]_q! mu_{e,gamma}(f)``.

    Orders below ``k`` (``e < 0``) give 0.
    """
    if k < 0:
        raise RangeError("k must be nonnegative")
    if e < 0:
        if e + k < 0:
            raise RangeError("moment order must be nonnegative")
        return 0j
    ctx = QContext(ms.q)
    m = ms.mu(e)
    return (-1) ** k * q_factorial(e + k, ctx) / q_factorial(e, ctx) * m


def derivative_moment_sequence(ms: MomentSequence, k: int) -> MomentSequence:
    """Moments of ``d^k f`` from those of ``f`` (extendable like ``ms``)."""
    ctx = QContext(ms.q)

    def log_mu(l):
        if l < k:
            return complex(NEG_INF, 0.0)
        e = l - k
        lm = ms.log_mu(e)
        if lm.real == NEG_INF:
            return lm
        return lm + log_q_factorial(l, ctx) - log_q_factorial(e, ctx) + (1j * math.pi if k % 2 else 0)

    return MomentSequence.from_log_values(log_mu, ms.gamma, ctx, ms.E + k, label=f"d^{k} {ms.label}")


def xk_multiplied_moment(ms: MomentSequence, e: int, k: int) -> complex:
    """``mu_{e,gamma}(f X^k) = q^{-k^2/2 - k/2 - e k} mu_{k+e,gamma}(f)``."""
    if e < 0 or k < 0:
        raise RangeError("orders must be nonnegative")
    return ms.q ** (-k * k / 2 - k / 2 - e * k) * ms.mu(k + e)

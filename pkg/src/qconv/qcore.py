"""Base q-arithmetic: Pochhammer symbols, q-numbers, q-binomials, constants.

All routines take a :class:`QContext`, which fixes the base ``q`` together
with the truncation policy used by every infinite product or series in the
package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import CapExceeded, DomainError

INFINITY = math.inf


@dataclass(frozen=True)
class QContext:
    """Fixed base ``q`` in (0, 1) plus truncation and tolerance policy.

    ``tail_rel_tol`` is the relative size below which a term of a series (or
    a factor's deviation from 1 in a product) is treated as tail.
    ``decay_window`` consecutive tail terms are required before a sum is cut.
    ``max_terms`` caps any series or product and ``max_lattice_index`` caps
    ``|k|`` in bilateral lattice sums.
    """

    q: float
    tail_rel_tol: float = 1e-14
    max_terms: int = 10000
    decay_window: int = 5
    max_lattice_index: int = 2000

    def __post_init__(self):
        q = self.q
        if not (isinstance(q, (int, float)) and 0.0 < q < 1.0):
            raise DomainError(f"q must lie strictly inside (0, 1), got {q!r}")
        if not self.tail_rel_tol > 0:
            raise DomainError("tail_rel_tol must be positive")
        if self.decay_window < 2:
            raise DomainError("decay_window must be at least 2")
        if self.max_terms < self.decay_window:
            raise DomainError("max_terms must be >= decay_window")
        if self.max_lattice_index < 1:
            raise DomainError("max_lattice_index must be positive")
        object.__setattr__(self, "q", float(q))

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    def replace(self, **changes) -> "QContext":
        return replace(self, **changes)


@dataclass(frozen=True)
class QConstants:
    """The two normalisation constants ``b_q`` and ``c_q(gamma)``."""

    b_q: float
    c_q_gamma: float
    gamma: float


def _log1p(z: complex) -> complex:
    """``log(1 + z)`` accurate for small ``|z|``."""
    if isinstance(z, (int, float)):
        if z > -1:
            return complex(math.log1p(z))
        return cmath.log(1 + z)
    if abs(z) < 1e-4:
        # four terms of the Taylor series are exact to double precision here
        return z - z * z / 2 + z ** 3 / 3 - z ** 4 / 4
    return cmath.log(1 + z)


def _factors(a, k, ctx: QContext, base: float):
    """Yield the numbers ``a * base**j`` for the product ``(a; base)_k``."""
    if k == INFINITY:
        if a == 0:
            return
        # the neglected factors change the product by about sum_j |t_j| <= |t| / (1 - base)
        tol = ctx.tail_rel_tol * (1 - abs(base))
        t = a
        j = 0
        while True:
            if j >= ctx.decay_window and abs(t) < tol:
                return
            if j >= ctx.max_terms:
                raise CapExceeded(
                    f"(a;q)_inf did not reach |a q^j| < {tol} within {ctx.max_terms} factors")
            yield t
            t = t * base
            j += 1
    else:
        if isinstance(k, float):
            if k != int(k):
                raise DomainError(f"order must be a nonnegative integer, got {k}")
            k = int(k)
        if k < 0:
            raise DomainError(f"order must be a nonnegative integer, got {k}")
        if k > ctx.max_terms:
            raise CapExceeded(f"finite product of {k} factors exceeds max_terms")
        t = a
        for _ in range(k):
            yield t
            t = t * base


def q_pochhammer(a, k, ctx: QContext, base: float | None = None):
    """Return ``(a; base)_k = prod_{j<k} (1 - a base^j)``; ``base`` defaults to q.

    ``k`` may be :data:`INFINITY`; the product is then cut once the remaining
    factors change it by less than ``ctx.tail_rel_tol`` (after at least
    ``decay_window`` factors).
    Real input gives a real result.
    """
    base = ctx.q if base is None else base
    p = 1.0
    for t in _factors(a, k, ctx, base):
        p *= 1 - t
    return p


def log_q_pochhammer(a, k, ctx: QContext, base: float | None = None) -> complex:
    """Complex logarithm of ``(a; base)_k`` accumulated factor by factor.

    The real part is ``log|(a; base)_k|``; the imaginary part is a valid (not
    necessarily principal) argument.  Returns ``-inf`` real part when some
    factor vanishes.  Used wherever the product itself over- or underflows.
    """
    base = ctx.q if base is None else base
    s = 0j
    for t in _factors(a, k, ctx, base):
        if t == 1:
            return complex(-math.inf, 0.0)
        s += _log1p(-t)
    return s


def q_number(k: int, ctx: QContext) -> float:
    """``[k]_q = (1 - q^k) / (1 - q)``."""
    return (1 - ctx.q ** k) / (1 - ctx.q)


@lru_cache(maxsize=None)
def _q_factorials(q: float, n: int) -> tuple:
    out = [1.0]
    for j in range(1, n + 1):
        out.append(out[-1] * (1 - q ** j) / (1 - q))
    return tuple(out)


def q_factorial(k: int, ctx: QContext) -> float:
    """``[k]_q! = (q;q)_k / (1-q)^k``."""
    if k < 0:
        raise DomainError("q-factorial of a negative integer")
    return _q_factorials(ctx.q, k)[k]


def log_q_factorial(k: int, ctx: QContext) -> float:
    """``log [k]_q!``, safe for orders where the factorial overflows."""
    q = ctx.q
    return sum(math.log1p(-q ** j) for j in range(1, k + 1)) - k * math.log1p(-q)


def q_binomial(n: int, k: int, ctx: QContext) -> float:
    """Gaussian binomial ``(q;q)_n / ((q;q)_k (q;q)_{n-k})``.

    Computed through ``min(k, n-k)`` so that ``k`` and ``n-k`` follow the
    identical sequence of floating point operations.
    """
    if k < 0 or n < 0 or k > n:
        raise DomainError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    m = min(k, n - k)
    q = ctx.q
    r = 1.0
    for j in range(1, m + 1):
        r *= (1 - q ** (n - m + j)) / (1 - q ** j)
    return r


def constant_bq(ctx: QContext) -> float:
    """``b_q = (1-q) (q, -q, -1; q)_inf``."""
    q = ctx.q
    return ((1 - q) * q_pochhammer(q, INFINITY, ctx) * q_pochhammer(-q, INFINITY, ctx)
            * q_pochhammer(-1.0, INFINITY, ctx))


def constant_cq(gamma: float, ctx: QContext) -> float:
    """``c_q(gamma)``, the unbounded q-integral of ``e_{q^2}(-x^2)`` over L(gamma)."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    q = ctx.q
    q2 = q * q
    g2 = gamma * gamma
    num = (q_pochhammer(q2, INFINITY, ctx, q2) * q_pochhammer(-q * g2, INFINITY, ctx, q2)
           * q_pochhammer(-q / g2, INFINITY, ctx, q2))
    den = (q_pochhammer(-g2, INFINITY, ctx, q2) * q_pochhammer(-q2 / g2, INFINITY, ctx, q2)
           * q_pochhammer(q, INFINITY, ctx, q2))
    return 2 * (1 - q) * num * gamma / den


def constants(gamma: float, ctx: QContext) -> QConstants:
    return QConstants(constant_bq(ctx), constant_cq(gamma, ctx), float(gamma))

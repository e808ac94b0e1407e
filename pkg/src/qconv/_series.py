"""One-sided series summed in the log domain with the shared tail rule."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .lattice import Status, _LogAccumulator, exp_log
from .qcore import QContext

NEG_INF = -math.inf


class Exhausted(Exception):
    """Raised by a term function when the input data ends before the tail rule is met."""


@dataclass
class SeriesSum:
    value: complex
    terms_used: int
    tail_bound: float
    status: Status
    log_abs_value: float
    log_abs_mass: float

    @property
    def log_value(self) -> complex:
        if self.log_abs_value == NEG_INF:
            return complex(NEG_INF, 0.0)
        return complex(self.log_abs_value, cmath.phase(self.value) if self.value != 0 else 0.0)


def sum_log_series(term: Callable[[int], complex], ctx: QContext, start: int = 0,
                   rel_floor: float = 1e-10, max_terms: int | None = None) -> SeriesSum:
    """Sum ``sum_{e >= start} exp(term(e))``.

    ``term(e)`` returns the complex log of the e-th term (``-inf`` real part
    for a zero term) or raises :class:`Exhausted`.  The sum stops after
    ``decay_window`` consecutive terms with ``|T| <= tol * max(|S|, rel_floor
    * mass)``; it is DIVERGENT when the last ``decay_window`` log-ratios of
    nonzero terms are all positive and nondecreasing.
    """
    tol = ctx.tail_rel_tol
    win = ctx.decay_window
    log_tol = math.log(tol)
    log_floor = math.log(rel_floor)
    cap = ctx.max_terms if max_terms is None else max_terms
    acc = _LogAccumulator()
    small = 0
    zeros = 0
    ratios: list[float] = []
    last = None
    status = Status.CONVERGED
    e = start
    used = 0
    log_tail = NEG_INF
    while True:
        if used >= cap:
            status = Status.CAPPED
            break
        try:
            lt = complex(term(e))
        except Exhausted:
            status = Status.INPUT_EXHAUSTED
            break
        acc.add(lt, lt.real)
        used += 1
        la = lt.real
        scale = max(acc.log_abs_sum, log_floor + acc.log_mass)
        if la == NEG_INF or (scale > NEG_INF and la <= log_tol + scale):
            small += 1
        else:
            small = 0
        zeros = zeros + 1 if la == NEG_INF else 0
        if la > NEG_INF:
            if last is not None:
                ratios.append(la - last)
                if len(ratios) > win:
                    ratios.pop(0)
            last = la
        e += 1
        if small >= win:
            if zeros >= win:
                # a run of exact zeros: nothing to extrapolate
                pass
            elif ratios and ratios[-1] < 0 and last is not None:
                rho = math.exp(ratios[-1])
                log_tail = last + math.log(rho / (1 - rho))
            elif last is not None:
                log_tail = last + math.log(win)
            break
        if (len(ratios) >= win and all(r > 0 for r in ratios)
                and all(b >= a - 1e-9 for a, b in zip(ratios, ratios[1:]))):
            status = Status.DIVERGENT
            log_tail = math.inf
            break
    if status in (Status.CAPPED, Status.INPUT_EXHAUSTED) and last is not None:
        log_tail = last
    value = exp_log(cmath.log(acc.s) + acc.scale) if acc.s != 0 else 0j
    tail = math.exp(log_tail) if log_tail < 709 else math.inf
    if status == Status.CONVERGED:
        log_ref = max(acc.log_abs_sum, log_floor + acc.log_mass)
        if log_tail > log_tol + log_ref + math.log(10):
            status = Status.CAPPED
    return SeriesSum(value, used, tail, status, acc.log_abs_sum, acc.log_mass)

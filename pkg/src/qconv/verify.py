"""The identity verification suite behind ``qconv verify``.

Each check computes one identity numerically and compares it with its
closed form or with a second, independent route.  Checks never raise: a
failure to compute is reported as FAIL with the error in ``detail``.
"""

from __future__ import annotations

import fnmatch
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .analytic import (bounds_dps, derivative_limits, limits_dps, limits_window,
                       reconstruct_series, search_bounds, taylor_identity_residual)
from .convolution import (convolution_function, convolution_moment,
                          convolution_moment_sequence, convolve_at, lambda_probe)
from .fourier import fourier_integral, fourier_series, homomorphism_check
from .lattice import LatticePoint, Status, q_integral_bounded, q_integral_unbounded
from .moments import (MomentSequence, TypeKind, classify_type, moment_sequence,
                      pointwise_decay_check)
from .qcore import QContext, constant_bq, constant_cq, q_pochhammer
from .special import (E_q, E_q_series_coefficients, Kind, SpecialFunction,
                      gauss_big_moment_closed_form, gaussian_moment_closed_form, hermite_II,
                      kernel_K, make_function, rodrigues_gaussian_derivative)

SUITE_VERSION = "1.0"


@dataclass
class CheckOutcome:
    error: float | None
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class Check:
    id: str
    criterion: int
    anchor: str
    run: Callable[["Workspace"], CheckOutcome]


@dataclass
class CheckRecord:
    id: str
    criterion: int
    anchor: str
    status: str
    error: float | None
    tolerance: float
    detail: str
    runtime_ms: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {"id": self.id, "criterion": self.criterion, "anchor": self.anchor,
                "status": self.status, "error": self.error, "tolerance": self.tolerance,
                "detail": self.detail}


class Workspace:
    """Parameters plus memoised functions and moment sequences shared by the checks."""

    def __init__(self, q: float, gamma: float, ctx: QContext):
        self.q = q
        self.gamma = gamma
        self.ctx = ctx
        self._fns: dict = {}
        self._moments: dict = {}

    def fn(self, spec: SpecialFunction, gamma: float | None = None):
        gamma = self.gamma if gamma is None else gamma
        key = (spec, gamma)
        if key not in self._fns:
            self._fns[key] = make_function(spec, gamma, self.ctx)
        return self._fns[key]

    def moments(self, spec: SpecialFunction, E: int, gamma: float | None = None) -> MomentSequence:
        gamma = self.gamma if gamma is None else gamma
        key = (spec, gamma)
        ms = self._moments.get(key)
        if ms is None or ms.E < E:
            ms = moment_sequence(self.fn(spec, gamma), E, gamma, self.ctx)
            self._moments[key] = ms
        return ms

    def strip_params(self) -> tuple:
        """STRIP constants with strict types 0.6 and 2/3 (decay rates 2.5 and 3)."""
        l = math.log(1 / self.q)
        return 2.5 / (8 * l), 3.0 / (8 * l)


GAUSS = SpecialFunction(Kind.GAUSS_SMALL)
GAUSS_BIG = SpecialFunction(Kind.GAUSS_BIG)
GAUSS_CAL = SpecialFunction(Kind.GAUSS_CAL)
ALT = SpecialFunction(Kind.ALT_EXAMPLE)
EQ = SpecialFunction(Kind.E_Q_BIG)


def _rel(a, b, floor: float = 0.0) -> float:
    scale = max(abs(a), abs(b), floor)
    return abs(a - b) / scale if scale > 0 else abs(a - b)


def _outcome(err: float, tol: float, detail: str = "") -> CheckOutcome:
    return CheckOutcome(float(err), tol, bool(err <= tol), detail)


def _points(ws: Workspace, ks=(-2, -1, 0, 1, 2)) -> list:
    return [LatticePoint(eps, k, ws.gamma, ws.q) for k in ks for eps in (1, -1)]


# -- constants and closed forms -------------------------------------------------------

def check_bq(ws):
    f = ws.fn(GAUSS_BIG, 1.0)
    # int_{-1}^{1} E_{q^2}(-q^2 x^2) d_q x: the bounded integral of the shifted Gaussian
    q = ws.q
    from .lattice import LatticeFunction
    g = LatticeFunction.from_rule(lambda x: f(q * x), 1.0, parity=f.parity)
    val = q_integral_bounded(g, 1.0, ws.ctx).value.real
    return _outcome(_rel(val, constant_bq(ws.ctx)), 1e-10, f"integral={val:.17g}")


def check_cq(ws):
    val = q_integral_unbounded(ws.fn(GAUSS), ws.gamma, ws.ctx).value.real
    return _outcome(_rel(val, constant_cq(ws.gamma, ws.ctx)), 1e-10, f"integral={val:.17g}")


def check_gauss_moments(ws):
    ms = ws.moments(GAUSS, 16)
    err = max(_rel(ms.mu(2 * k), gaussian_moment_closed_form(2 * k, ws.gamma, ws.ctx))
              for k in range(9))
    return _outcome(err, 1e-9)


def check_gauss_big_moments(ws):
    """Against the stated ``b_q (q;q^2)_k q^{2k^2+k}``."""
    ms = ws.moments(GAUSS_BIG, 16, 1.0)
    q = ws.q
    errs = []
    for k in range(9):
        stated = constant_bq(ws.ctx) * q_pochhammer(q, k, ws.ctx, q * q) * q ** (2 * k * k + k)
        errs.append(_rel(ms.mu(2 * k), stated))
    corrected = max(_rel(ms.mu(2 * k), gauss_big_moment_closed_form(2 * k, ws.ctx))
                    for k in range(9))
    return _outcome(max(errs), 1e-9,
                    f"against b_q (q;q^2)_k q^(2k^2+3k+1) the error is {corrected:.3g}")


def check_hermite(ws):
    q = ws.q
    err = max(_rel(hermite_II(k, 1j, ws.ctx), 1j ** k * q ** (-k * (k - 1) / 2)) for k in range(13))
    return _outcome(err, 1e-12)


def check_rodrigues(ws):
    g = make_function(GAUSS, ws.gamma, ws.ctx, closed_form_derivatives=False)
    err = 0.0
    for x in _points(ws, (-2, -1, 0, 1)):
        ders = g.derivatives(x, 6, ws.ctx, method="stencil")
        closed = [rodrigues_gaussian_derivative(k, x.value, ws.ctx) for k in range(7)]
        # Hermite zeros make some closed-form values exactly 0
        floor = 1e-20 * max(abs(c) for c in closed)
        for k in range(7):
            err = max(err, _rel(ders[k], closed[k], floor))
    return _outcome(err, 1e-8)


def check_kernel(ws):
    err = max(_rel(kernel_K(t, 1j, ws.ctx), E_q(1j * ws.q * t, ws.ctx))
              for t in (0.3, -0.7, 1.0, 2.5, -4.0))
    return _outcome(err, 1e-10)


# -- convolution ------------------------------------------------------------------------------

def check_momentconvo_formula(ws):
    gm = ws.moments(GAUSS, 16)
    F = convolution_function(gm, ws.fn(GAUSS), ws.ctx)
    direct = moment_sequence(F, 8, ws.gamma, ws.ctx)
    err = 0.0
    for k in range(9):
        want = convolution_moment(gm, gm, k)
        got = direct.mu(k)
        if want == 0:
            err = max(err, abs(got) / direct.nu(k) if direct.nu(k) else 0.0)
        else:
            err = max(err, _rel(got, want))
    return _outcome(err, 1e-7)


def check_momentconvo_zeroth(ws):
    """Direct integral of the computed product against the product of direct integrals."""
    G = ws.fn(GAUSS)
    S = ws.fn(SpecialFunction(Kind.STRIP_EXAMPLE, ws.strip_params()[0]))
    ig = q_integral_unbounded(G, ws.gamma, ws.ctx).value
    is_ = q_integral_unbounded(S, ws.gamma, ws.ctx).value
    gm = ws.moments(GAUSS, 16)
    sm = ws.moments(SpecialFunction(Kind.STRIP_EXAMPLE, ws.strip_params()[0]), 30)
    err = 0.0
    for m, g, want in ((gm, G, ig * ig), (gm, S, ig * is_), (sm, G, is_ * ig)):
        F = convolution_function(m, g, ws.ctx)
        got = q_integral_unbounded(F, ws.gamma, ws.ctx).value
        err = max(err, _rel(got, want))
    return _outcome(err, 1e-7)


def _pool(ws):
    G = ws.fn(GAUSS)
    M = ws.fn(SpecialFunction(Kind.G_M, 2))
    S = ws.fn(SpecialFunction(Kind.STRIP_EXAMPLE, ws.strip_params()[0]))
    mom = {n: ws.moments(s, 30) for n, s in (
        ("G", GAUSS), ("M", SpecialFunction(Kind.G_M, 2)),
        ("S", SpecialFunction(Kind.STRIP_EXAMPLE, ws.strip_params()[0])))}
    return {"G": G, "M": M, "S": S}, mom


def check_associativity(ws):
    fns, mom = _pool(ws)
    pts = [0.0] + [LatticePoint(e, k, ws.gamma, ws.q) for k in (0, 1) for e in (1, -1)]
    err = 0.0
    for a, b, c in (("G", "M", "S"), ("S", "G", "M"), ("M", "S", "G")):
        fg = convolution_moment_sequence(mom[a], mom[b])
        gh = convolution_function(mom[b], fns[c], ws.ctx)
        for x in pts:
            lhs = convolve_at(fg, fns[c], x, ws.ctx)
            rhs = convolve_at(mom[a], gh, x, ws.ctx)
            if not (lhs.converged and rhs.converged):
                return CheckOutcome(None, 1e-7, False, f"{a}{b}{c} at {x}: {lhs.status}/{rhs.status}")
            err = max(err, _rel(lhs.value, rhs.value))
    return _outcome(err, 1e-7)


def check_commutativity(ws):
    c1, c2 = ws.strip_params()
    s1, s2 = SpecialFunction(Kind.STRIP_EXAMPLE, c1), SpecialFunction(Kind.STRIP_EXAMPLE, c2)
    m1, m2 = ws.moments(s1, 30), ws.moments(s2, 30)
    a1, a2 = classify_type(m1).alpha_hat, classify_type(m2).alpha_hat
    if min(a1, a2) <= 0.55:
        return CheckOutcome(None, 1e-7, False, f"fitted strict types {a1:.3f}, {a2:.3f}")
    f1, f2 = ws.fn(s1), ws.fn(s2)
    err = 0.0
    for k in range(-3, 5):
        x = LatticePoint(1, k, ws.gamma, ws.q)
        a = convolve_at(m1, f2, x, ws.ctx)
        b = convolve_at(m2, f1, x, ws.ctx)
        err = max(err, _rel(a.value, b.value))
    return _outcome(err, 1e-7, f"strict types {a1:.4f}, {a2:.4f}")


def check_noncommute(ws):
    g0s, g1s = SpecialFunction(Kind.G_M, 0), SpecialFunction(Kind.G_M, 1)
    m0, m1 = ws.moments(g0s, 30), ws.moments(g1s, 30)
    g0, g1 = ws.fn(g0s), ws.fn(g1s)
    zero = 0.0
    for x in _points(ws, (0, 1)):
        r = convolve_at(m0, g1, x, ws.ctx)
        zero = max(zero, abs(r.value))
    r = convolve_at(m1, g0, LatticePoint(1, 0, ws.gamma, ws.q), ws.ctx)
    ok = zero <= 1e-10 and abs(r.value) > 1e-3
    return CheckOutcome(zero, 1e-10, bool(ok), f"|(g1*g0)(gamma)| = {abs(r.value):.6g}")


def check_alt_moments(ws):
    am = ws.moments(ALT, 14, 1.0)
    err = max(abs(am.mu(2 * n)) / am.nu(2 * n) for n in range(7))
    return _outcome(err, 1e-10)


def check_alt_left_zero(ws):
    am = ws.moments(ALT, 14, 1.0)
    err = 0.0
    for spec in (GAUSS, SpecialFunction(Kind.G_M, 2)):
        g = ws.fn(spec, 1.0)
        for k in range(0, 6):
            r = convolve_at(am, g, LatticePoint(1, k, 1.0, ws.q), ws.ctx)
            err = max(err, abs(r.value))
    return _outcome(err, 1e-10)


def check_alt_right_positive(ws):
    gm = ws.moments(GAUSS, 30, 1.0)
    a = ws.fn(ALT, 1.0)
    worst = math.inf
    for k in range(6):
        r = convolve_at(gm, a, LatticePoint(1, 2 * k, 1.0, ws.q), ws.ctx)
        if r.status != Status.CONVERGED:
            return CheckOutcome(None, 0.0, False,
                                f"series at q^{2 * k} is {r.status.value} after {r.terms_used} terms")
        worst = min(worst, r.value.real)
    return CheckOutcome(worst, 0.0, bool(worst > 0), "smallest value")


# -- Fourier ----------------------------------------------------------------------------------

def check_fourier_agree(ws):
    g = ws.fn(GAUSS)
    gm = ws.moments(GAUSS, 30)
    scale = abs(gm.mu(0))
    err = 0.0
    for y in (0.0, 0.5, -1.0, 1.5, 2.0, -2.0, 1j, -2j, 1 + 1j, 1.2 - 0.8j):
        a = fourier_integral(g, ws.gamma, y, ws.ctx)
        b = fourier_series(gm, y, ws.ctx)
        err = max(err, _rel(a.value, b.value, scale))
    return _outcome(err, 1e-8, "relative to max(|values|, |transform at 0|)")


def check_fourier_homomorphism(ws):
    _, mom = _pool(ws)
    err = 0.0
    for a, b in (("G", "G"), ("G", "S"), ("M", "S")):
        for y in (0.3, -1.0, 1.5, 0.5j, 1 + 0.5j):
            rep = homomorphism_check(mom[a], mom[b], y, ws.ctx)
            err = max(err, rep.relative)
    return _outcome(err, 1e-8)


# -- classification and decay ------------------------------------------------------------------

def _classify_check(ws, spec, gamma, target, tol, E=40):
    ms = ws.moments(spec, E, gamma)
    a = classify_type(ms, TypeKind.STRICT_LEFT).alpha_hat
    return _outcome(abs(a - target), tol, f"alpha_hat={a:.6f}")


def check_classify_gauss(ws):
    return _classify_check(ws, GAUSS, ws.gamma, 0.5, 0.05)


def check_classify_gauss_big(ws):
    return _classify_check(ws, GAUSS_BIG, 1.0, 1.0, 0.05)


def check_classify_gauss_cal(ws):
    return _classify_check(ws, GAUSS_CAL, 1.0, 0.75, 0.10)


def check_classify_convsquare(ws):
    gm = ws.moments(GAUSS, 40)
    sq = convolution_moment_sequence(gm, gm, 40)
    a = classify_type(sq, TypeKind.LEFT).alpha_hat
    return _outcome(abs(a - 0.25), 0.10, f"alpha_hat={a:.6f} (moments from the finite sums)")


def check_decay_strip(ws):
    err = 0.0
    notes = []
    for c in ws.strip_params():
        ms = ws.moments(SpecialFunction(Kind.STRIP_EXAMPLE, c), 40)
        alpha = classify_type(ms).alpha_hat
        rep = pointwise_decay_check(ws.fn(SpecialFunction(Kind.STRIP_EXAMPLE, c)), ws.gamma,
                                    alpha, 24, ws.ctx, tolerance=0.1)
        if not (rep.forward_holds and rep.converse_holds):
            return CheckOutcome(None, 0.1, False, f"c={c:.6g}: forward={rep.forward_holds} "
                                f"converse={rep.converse_holds}")
        err = max(err, abs(rep.beta_fit - rep.beta_expected),
                  abs(rep.alpha_implied - alpha) / (1 - alpha) ** 2)
        notes.append(f"alpha={alpha:.4f} beta_fit={rep.beta_fit:.4f}")
    return _outcome(err, 0.1, "; ".join(notes))


# -- analytic extension ------------------------------------------------------------------------

def check_appendix_reconstruct(ws):
    P = 11
    k_hi = limits_window(P, ws.q)
    E = ws.fn(EQ)
    tab = E.sample(-3, k_hi, ws.ctx, precision=limits_dps(P, k_hi, ws.q))
    dl = derivative_limits(tab, P, ws.ctx)
    ps = reconstruct_series(dl)
    ref = E_q_series_coefficients(ws.ctx, P + 1).coefficients
    err = max(_rel(ps.coefficients[k], ref[k]) for k in range(11))
    return _outcome(err, 1e-8)


def check_appendix_alt_grid(ws):
    k_max, k_hi = 8, 30
    a = ws.fn(ALT, 1.0).sample(-4, k_hi, ws.ctx, precision=bounds_dps(k_max, k_hi, ws.q))
    gs = search_bounds(a, k_max, ws.ctx)
    # the E_q restriction on the same grid must pass, or the search proves nothing
    e = ws.fn(EQ, 1.0).sample(-4, k_hi, ws.ctx, precision=bounds_dps(k_max, k_hi, ws.q))
    control = search_bounds(e, k_max, ws.ctx)
    ok = (not gs.any_holds) and control.any_holds
    return CheckOutcome(gs.best.worst_ratio, 1.0, bool(ok),
                        f"best ratio {gs.best.worst_ratio:.3g} over {gs.points_tried} grid points; "
                        f"E_q control {control.best.worst_ratio:.3g}")


def check_appendix_taylor(ws):
    err = 0.0
    k_hi = 20
    for spec, gamma in ((EQ, ws.gamma), (GAUSS, ws.gamma), (ALT, 1.0)):
        tab = ws.fn(spec, gamma).sample(-5, k_hi, ws.ctx)
        for eps in (1, -1):
            for k in (-5, 0, 5):
                for n in range(11):
                    err = max(err, taylor_identity_residual(tab, eps, k, n, ws.ctx))
    return _outcome(err, 1e-10)


def check_lambda_probe(ws):
    c = ws.strip_params()[0]
    ms = ws.moments(SpecialFunction(Kind.STRIP_EXAMPLE, c), 40)
    vals = [abs(lambda_probe(ms, ws.q ** n, ws.ctx)) for n in range(11)]
    best = max(vals)
    return CheckOutcome(best, 1e-8, bool(best > 1e-8), "largest |probe| over q^0..q^10")


CHECKS = [
    Check("constants.bq", 1, "bounded integral of the shifted big q-Gaussian equals b_q", check_bq),
    Check("constants.cq", 1, "unbounded integral of the small q-Gaussian equals c_q(gamma)", check_cq),
    Check("moments.gauss_small", 2, "even moments of the small q-Gaussian, closed form", check_gauss_moments),
    Check("moments.gauss_big", 2, "even moments of the big q-Gaussian on L(1), stated closed form",
          check_gauss_big_moments),
    Check("hermite.at_i", 3, "discrete q-Hermite II value at i", check_hermite),
    Check("rodrigues.gauss", 4, "q-derivatives of the q-Gaussian through the Rodrigues formula",
          check_rodrigues),
    Check("kernel.at_i", 5, "Hermite generating kernel at x=i equals E_q(iqt)", check_kernel),
    Check("momentconvo.formula", 6, "moment of a convolution is the q-binomial sum of moments",
          check_momentconvo_formula),
    Check("momentconvo.zeroth", 6, "zeroth moment of a convolution is the product of integrals",
          check_momentconvo_zeroth),
    Check("convolution.associative", 7, "convolution is associative", check_associativity),
    Check("convolution.commutative", 8, "convolution commutes above strict type 1/2",
          check_commutativity),
    Check("convolution.noncommutative", 9, "g_0 * g_1 vanishes while g_1 * g_0 does not",
          check_noncommute),
    Check("alt.moments", 10, "even moments of the alternating example vanish", check_alt_moments),
    Check("alt.left_zero", 10, "alternating example convolved with anything is zero",
          check_alt_left_zero),
    Check("alt.right_positive", 10, "q-Gaussian convolved with the alternating example is positive",
          check_alt_right_positive),
    Check("fourier.forms_agree", 11, "integral and moment series forms of the transform agree",
          check_fourier_agree),
    Check("fourier.homomorphism", 11, "transform of a convolution is the product of transforms",
          check_fourier_homomorphism),
    Check("classify.gauss_small", 12, "strict type 1/2 of the small q-Gaussian", check_classify_gauss),
    Check("classify.gauss_big", 12, "strict type 1 of the big q-Gaussian on L(1)",
          check_classify_gauss_big),
    Check("classify.gauss_cal", 12, "strict type 3/4 of the interpolating q-Gaussian on L(1)",
          check_classify_gauss_cal),
    Check("classify.convsquare", 12, "type 1/4 of the convolution square of the q-Gaussian",
          check_classify_convsquare),
    Check("decay.strip", 13, "moment type and pointwise decay determine each other",
          check_decay_strip),
    Check("appendix.reconstruct", 14, "E_q restricted to a lattice rebuilds its power series",
          check_appendix_reconstruct),
    Check("appendix.alt_grid", 14, "the alternating example fails the derivative bound on the grid",
          check_appendix_alt_grid),
    Check("appendix.taylor", 14, "finite q-Taylor identity on lattice tables", check_appendix_taylor),
    Check("lambda.probe", 15, "lambda probe of a strict type > 1/2 function is nonzero",
          check_lambda_probe),
]


def select(patterns: list | None) -> list:
    """Checks whose id matches any glob; a bare prefix selects its whole family."""
    if not patterns:
        return list(CHECKS)
    out = [c for c in CHECKS
           if any(fnmatch.fnmatchcase(c.id, p) or fnmatch.fnmatchcase(c.id, p + ".*") for p in patterns)]
    return out


def run_check(check: Check, ws: Workspace) -> CheckRecord:
    t0 = time.perf_counter()
    try:
        out = check.run(ws)
    except Exception as exc:  # a check reports its failure instead of aborting the suite
        out = CheckOutcome(None, math.nan, False, f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - t0) * 1000
    err = out.error if out.error is not None and math.isfinite(out.error) else None
    tol = out.tolerance if math.isfinite(out.tolerance) else None
    return CheckRecord(check.id, check.criterion, check.anchor, "PASS" if out.passed else "FAIL",
                       err, tol, out.detail, ms)


def run_suite(q: float = 0.5, gamma: float = 1.0, ctx: QContext | None = None,
              only: list | None = None) -> dict:
    """Run the selected checks in id order and return the report dictionary."""
    ctx = ctx or QContext(q)
    ws = Workspace(q, gamma, ctx)
    selected = select(only)
    ids = {c.id for c in selected}
    records = []
    for c in CHECKS:
        if c.id in ids:
            records.append(run_check(c, ws))
    return build_report(records, ctx, gamma, skipped=[c for c in CHECKS if c.id not in ids])


def build_report(records: list, ctx: QContext, gamma: float, skipped: list = ()) -> dict:
    checks = [r.to_dict() for r in records]
    for c in skipped:
        checks.append({"id": c.id, "criterion": c.criterion, "anchor": c.anchor, "status": "SKIP",
                       "error": None, "tolerance": None, "detail": "not selected"})
    checks.sort(key=lambda d: d["id"])
    body = {
        "suite_version": SUITE_VERSION,
        "parameters": {"q": ctx.q, "gamma": gamma, "tail_rel_tol": ctx.tail_rel_tol,
                       "max_terms": ctx.max_terms, "decay_window": ctx.decay_window},
        "checks": checks,
        "overall": "FAIL" if any(c["status"] == "FAIL" for c in checks) else "PASS",
    }
    digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
    return {**body, "determinism_hash": digest,
            "timing": {"runtime_ms": {r.id: round(r.runtime_ms, 3) for r in records}}}

"""Every acceptance criterion at both parameter points, one PASS/FAIL line each.

The checks are the ones behind ``qconv verify``; this module groups them by
criterion and asserts at the stated tolerances.  Run it directly with
``python3 tests/test_acceptance.py`` for the summary lines alone.
"""

import time

import pytest

from qconv.qcore import QContext
from qconv.verify import CHECKS, run_suite

PARAMS = [(0.5, 1.0), (0.7, 0.5)]
CRITERIA = sorted({c.criterion for c in CHECKS})
TITLES = {
    1: "constants b_q and c_q(gamma)",
    2: "Gaussian moments in closed form",
    3: "Hermite II value at i",
    4: "Rodrigues formula",
    5: "Hermite kernel at i",
    6: "moment of a convolution",
    7: "associativity",
    8: "commutativity above strict type 1/2",
    9: "noncommuting pair g_0, g_1",
    10: "alternating counterexample",
    11: "Fourier forms and homomorphism",
    12: "type classifier",
    13: "moment type versus pointwise decay",
    14: "analytic extension from lattice data",
    15: "lambda probe",
}

_reports: dict = {}


def report(q, gamma):
    key = (q, gamma)
    if key not in _reports:
        t0 = time.perf_counter()
        r = run_suite(q, gamma, QContext(q))
        r["_elapsed"] = time.perf_counter() - t0
        _reports[key] = r
    return _reports[key]


def criterion_line(n, q, gamma):
    checks = [c for c in report(q, gamma)["checks"] if c["criterion"] == n]
    ok = all(c["status"] == "PASS" for c in checks)
    parts = []
    for c in checks:
        err = "n/a" if c["error"] is None else f"{c['error']:.3g}"
        parts.append(f"{c['id']}={c['status']}(err {err}, tol {c['tolerance']})")
    line = (f"criterion {n:2d} [{TITLES[n]}] q={q} gamma={gamma}: "
            f"{'PASS' if ok else 'FAIL'}  " + "; ".join(parts))
    return ok, line, checks


@pytest.mark.parametrize("q,gamma", PARAMS, ids=[f"q{q}-g{g}" for q, g in PARAMS])
@pytest.mark.parametrize("n", CRITERIA)
def test_criterion(n, q, gamma, capsys):
    ok, line, checks = criterion_line(n, q, gamma)
    with capsys.disabled():
        print("\n" + line)
    failed = [f"{c['id']}: {c['detail']}" for c in checks if c["status"] != "PASS"]
    assert ok, "; ".join(failed)


@pytest.mark.parametrize("q,gamma", PARAMS, ids=[f"q{q}-g{g}" for q, g in PARAMS])
def test_suite_runtime(q, gamma):
    assert report(q, gamma)["_elapsed"] < 30.0


if __name__ == "__main__":
    for q, gamma in PARAMS:
        for n in CRITERIA:
            print(criterion_line(n, q, gamma)[1])
        print(f"suite time q={q} gamma={gamma}: {report(q, gamma)['_elapsed']:.1f} s")

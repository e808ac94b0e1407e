"""Regenerate the frozen reference values used by the tests.

Every value here is computed with mpmath straight from a defining sum or
product at high precision, without importing qconv.  Run with
``python3 tests/oracles/generate.py`` and paste the output into
``tests/oracles/values.py`` when a definition changes.
"""

from mpmath import mp, mpf, mpc, qp, fsum, exp, log

mp.dps = 80


def gauss_small(x, q):
    return 1 / qp(-x * x, q * q)


def gauss_big(x, q):
    return qp(x * x, q * q)


def gauss_cal(x, q):
    # sum_k (-1)^k q^{k(k-1)/2} x^{2k} / (q^2;q^2)_k, summed at very high precision
    with mp.workdps(3000):
        q = mpf(q)
        x = mpf(x)
        terms = []
        k = 0
        while True:
            t = (-1) ** k * q ** (k * (k - 1) // 2) * x ** (2 * k) / qp(q * q, q * q, k)
            terms.append(t)
            if k > 20 and abs(t) < mpf(10) ** -2900:
                break
            k += 1
        return +fsum(terms)


def gm(x, q, m):
    with mp.workdps(3000):
        q = mpf(q)
        x = mpf(x)
        a = q ** (1 + 2 * m)
        terms = []
        r = 0
        while True:
            t = ((-1) ** r * q ** (2 * r * (r - 1)) * a ** r * x ** (2 * r)
                 / (qp(a, q * q, r) * qp(q * q, q * q, r)))
            terms.append(t)
            if r > 20 and abs(t) < mpf(10) ** -2900:
                break
            r += 1
        return +(fsum(terms) * gauss_small(x, q))


def bilateral(f, q, gamma, power=0, lo=-200, hi=400):
    q = mpf(q)
    gamma = mpf(gamma)
    s = 0
    for k in range(lo, hi):
        x = q ** k * gamma
        s += (1 - q) * x * (f(x) * x ** power + f(-x) * (-x) ** power)
    return s


def main():
    out = {}
    for q in ("0.5", "0.7"):
        qm = mpf(q)
        out[f"qp_0.3_inf_{q}"] = qp(mpf("0.3"), qm)
        out[f"qp_m2.5_inf_{q}"] = qp(mpf("-2.5"), qm)
        out[f"qp_0.2_5_{q}"] = qp(mpf("0.2"), qm, 5)
        # b_q from its defining bounded integral
        s = 0
        for k in range(0, 600):
            x = qm ** k
            s += (1 - qm) * x * 2 * gauss_big(qm * x, qm)
        out[f"bq_{q}"] = s
        out[f"eq_0.3_{q}"] = 1 / qp(mpf("0.3"), qm)
        out[f"Eq_m2.5+0.5i_{q}"] = qp(-mpc("-2.5", "0.5"), qm)
        out[f"gauss_e_1.7_{q}"] = gauss_small(mpf("1.7"), qm)
        out[f"gauss_E_3.1_{q}"] = gauss_big(mpf("3.1"), qm)
        out[f"strip_1.3_{q}"] = exp(-mpf("0.4") * log(mpf("1.3") ** 2 + 1) ** 2)
    q = mpf("0.5")
    out["cq_1_0.5"] = bilateral(lambda x: gauss_small(x, q), q, 1, lo=-60, hi=300)
    out["gauss_cal_k-6_0.5"] = gauss_cal(q ** -6, "0.5")
    out["gauss_cal_k-12_0.5"] = gauss_cal(q ** -12, "0.5")
    out["gm2_k-3_0.5"] = gm(q ** -3, "0.5", 2)
    out["gm0_k0_0.5"] = gm(mpf(1), "0.5", 0)
    # mu_0(g_1) on L(1) from the lattice sum
    with mp.workdps(60):
        out["mu0_gm1_0.5"] = bilateral(lambda x: gm(x, "0.5", 1), q, 1, lo=-40, hi=250)
    # Fourier transform of the small Gaussian at y=1 on L(1)
    i = mpc(0, 1)
    out["fourier_gauss_y1_0.5"] = bilateral(lambda x: gauss_small(x, q) * qp(-i * q * x, q), q, 1,
                                            lo=-60, hi=300)
    q7 = mpf("0.7")
    out["cq_0.5_0.7"] = bilateral(lambda x: gauss_small(x, q7), q7, mpf("0.5"), lo=-60, hi=400)
    out["gauss_cal_k-8_0.7"] = gauss_cal(q7 ** -8, "0.7")
    for k, v in out.items():
        v = complex(v)
        print(f"    {k!r}: complex({v.real!r}, {v.imag!r}),")


if __name__ == "__main__":
    main()

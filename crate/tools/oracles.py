"""High-precision reference values frozen into the Rust test suites.

Every value here is computed from the defining series or integrals with
mpmath at generous working precision, independently of the Rust code.
Run with `python3 tools/oracles.py` to reprint the tables.
"""

import mpmath as mp


def ml_series(alpha, beta, z, digits=30):
    """E_{alpha,beta}(z) from the power series at adaptive precision."""
    alpha = mp.mpf(alpha)
    beta = mp.mpf(beta)
    z = mp.mpf(z)
    # the largest term is roughly exp(|z|^(1/alpha)); carry enough digits
    peak = float(abs(z)) ** (1.0 / float(alpha)) / 2.302585 + 10
    with mp.workdps(int(peak) + digits + 20):
        total = mp.mpf(0)
        k = 0
        small = 0
        while True:
            term = z**k * mp.rgamma(alpha * k + beta)
            total += term
            if abs(term) < mp.mpf(10) ** (-(digits + 10)) * max(1, abs(total)):
                small += 1
                if small > 5 and k > 2 * float(abs(z)) ** (1.0 / float(alpha)):
                    break
            else:
                small = 0
            k += 1
        return +total


def wright_series(nu, x, digits=30):
    """Mainardi function M_nu(x) = sum (-x)^k / (k! Gamma(1 - nu (k+1)))."""
    nu = mp.mpf(nu)
    x = mp.mpf(x)
    with mp.workdps(200):
        # crude bound on the size of the largest term
        mags = []
        for k in range(0, 20000, 50):
            mags.append(float(k * mp.log(x + mp.mpf('1e-300')) - mp.loggamma(k + 1)
                              + mp.loggamma(nu * (k + 1) + 1)))
        peak = max(mags) / 2.302585
    with mp.workdps(int(max(peak, 0)) + digits + 30):
        total = mp.mpf(0)
        k = 0
        small = 0
        while True:
            term = (-x) ** k / mp.factorial(k) * mp.rgamma(1 - nu * (k + 1))
            total += term
            if abs(term) < mp.mpf(10) ** (-(digits + 15)):
                small += 1
                if small > 8:
                    break
            else:
                small = 0
            k += 1
        return +total


def main():
    mp.mp.dps = 40
    print("== gamma ==")
    for x in ["0.1", "0.5", "1.7", "2.5", "7.3", "20.5", "49.9"]:
        print(x, mp.nstr(mp.gamma(mp.mpf(x)), 20))

    print("== mittag-leffler ==")
    cases = [
        (1.5, 1.5, -1),
        (1.5, 1.0, -1),
        (1.5, 2.0, -3),
        (1.2, 1.2, -4.5),
        (1.2, 1.0, -30),
        (1.5, 1.5, -30),
        (1.8, 1.0, -100),
        (1.8, 1.8, -100),
        (1.2, 2.0, -1000),
        (1.5, 1.5, -1000),
        (1.6, 1.0, -10000),
        (1.5, 1.5, -10000),
        (1.9, 1.9, -2500),
        (1.5, 1.0, 2.0),
        (1.5, 1.5, 10.0),
        (0.8, 1.0, -20),
        (0.5, 1.0, -2),
        (2.0, 2.0, -10000),
    ]
    for a, b, z in cases:
        v = ml_series(a, b, z)
        print(f"({a}, {b}, {z}, {mp.nstr(v, 20)}),")

    print("== mainardi ==")
    for nu in ["0.55", "0.6", "0.75"]:
        for x in ["0.25", "1", "2", "3.5"]:
            v = wright_series(nu, x)
            print(f"({nu}, {x}, {mp.nstr(v, 20)}),")
    for nu, x in [("0.55", "6"), ("0.6", "5"), ("0.75", "4.5"),
                  ("0.9", "0.25"), ("0.9", "1"), ("0.9", "1.5"), ("0.9", "2"), ("0.9", "2.5")]:
        v = wright_series(nu, x)
        print(f"({nu}, {x}, {mp.nstr(v, 20)}),")

    print("== gramian (gamma=0.75, n=1, [0,1]) ==")
    g = mp.mpf("0.75")
    f = lambda t: t ** (3 * g - 1) * ml_series(2 * g, 2 * g, -t ** (2 * g), 25) ** 2
    print(mp.nstr(mp.quad(f, [0, 0.5, 1]), 20))

    print("== T_gamma factor, gamma=0.75, n=2, t=0.5 ==")
    print(mp.nstr(mp.mpf("0.5") * ml_series(1.5, 2.0, -4 * mp.mpf("0.5") ** 1.5), 20))

    print("== cnd example ==")
    M, Mt, T, gam, delta, K2, zeta, p, lam = 1, 1, 1, mp.mpf("0.75"), 0, 1, mp.mpf("0.05"), 1, 1
    R = 2 * T ** (3 * gam) / (3 * gam * lam) * (M * Mt / mp.gamma(2 * gam)) ** 2
    c = (2 * gam - delta) / (1 - delta)
    pref = 2 * M * T ** (2 * gam - delta) * K2 * zeta / (mp.gamma(2 * gam) * c ** (1 - delta))
    s = sum(mp.e ** ((p + k) * (p - k - 1) * R / 2) for k in range(p))
    val = pref * (1 + (p + 1) * (p + 2) * R / 2 + p * (p + 1) * R ** 2 / 2 * s)
    print("R", mp.nstr(R, 20), "cnd", mp.nstr(val, 20))


if __name__ == "__main__":
    main()

"""Independent high-precision references for the derived test fixtures.

Everything here is written from the formulas directly with mpmath and shares
no code with the package. Run ``python tests/oracles/derive_fixtures.py`` to
regenerate ``tests/fixtures/derived.json``.
"""
import json
from fractions import Fraction
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).resolve().parent.parent / "fixtures" / "derived.json"


def trace_i4_sqrt_with_tail(m=10 ** 6):
    # sum_{i<=m} i^-2 = zeta(2) - hurwitz(2, m+1); integral tail m^(1-2)/(2-1)
    partial = mp.zeta(2) - mp.zeta(2, m + 1)
    return partial + mp.mpf(1) / m


def effdim_inv_square(m=10 ** 6):
    # sum_{i<=m} 1/(1+i^2) = full sum minus tail
    full = (mp.pi * mp.coth(mp.pi) - 1) / 2
    # 1/(1+i^2) = sum_k (-1)^k i^(-2k-2), convergent for i > 1
    tail = mp.fsum((-1) ** k * mp.zeta(2 * k + 2, m + 1) for k in range(6))
    return full, full - tail


def lemma_a1(b, theta, nu):
    f = lambda u: u ** (-2 * theta) / (1 + (b ** (1 - theta) - u ** (1 - theta)) ** nu)
    return mp.quad(f, [1, mp.mpf(b) ** 0.5, b])


def trapezoid(b, theta, nu, n=10 ** 4):
    h = mp.mpf(b - 1) / n
    f = lambda u: u ** (-2 * theta) / (1 + (b ** (1 - theta) - u ** (1 - theta)) ** nu)
    s = (f(mp.mpf(1)) + f(mp.mpf(b))) / 2 + mp.fsum(f(1 + k * h) for k in range(1, n))
    return s * h


def c0_case3(theta, nu):
    return (2 ** (2 * theta - 1) / ((1 - 2 ** (theta - 1)) ** nu * (1 - 2 * theta))
            + 2 ** theta / ((1 - theta) * (1 - nu)))


def c0_case2_small(theta, nu):
    return (2 ** theta * nu / ((1 - theta) * (nu - 1))
            + (1 - 2 ** (theta - 1)) ** (-nu) * 2 ** (2 * theta - 1) / (1 - 2 * theta))


def c0_case4_nu1():
    th = mp.mpf(1) / 2
    return 1 / (1 - 2 ** (th - 1)) + 2 ** th / (1 - th) * (1 / mp.log(2) + 1 - th)


def c_ol(eta0, theta, nu, c0):
    return eta0 ** 2 * 2 ** (2 * theta) / mp.log(2) + 3 ** (2 * theta) * eta0 ** 2 * c0 / min(1, (eta0 / (1 - theta)) ** nu)


def stepsize_sum(t, eta0, theta, nu):
    eta = [mp.mpf(eta0) * mp.mpf(k) ** (-theta) for k in range(1, t + 1)]
    total = mp.mpf(0)
    suffix = mp.mpf(0)
    for k in range(t - 1, -1, -1):
        total += eta[k] ** 2 / (1 + suffix ** nu)
        suffix += eta[k]
    return total


def trace_identity_rhs(eigs, s):
    n = lambda lam: mp.fsum(a / (a + lam) for a in eigs)
    pts = [0] + sorted(set(eigs)) + [mp.inf]
    return mp.sin(mp.pi * s) / mp.pi * mp.quad(lambda lam: lam ** (s - 1) * n(lam), pts)


def constants_at_ones():
    """C1, CS1, C2, CS2, C4, CS4 with kappa = Tr = c_M = ||g|| = ||beta||^2 = s = eta0 = 1, r = 1/2, sigma = 0."""
    e, ln2 = mp.e, mp.log(2)
    A = 1 / (2 * e) + 1                      # ((2-s)/(2e))^(2-s) + kappa^(4-2s)
    c0 = c0_case4_nu1()                      # nu = 2 - s = 1, theta = 1/2
    col = 2 / ln2 + 3 * c0                   # C_OL with eta0 = 1, theta = 1/2, nu = 1
    src = 1 / (2 * e) + 1                    # (r/e)^(2r) + kappa^(4r)
    return {
        "CS1": 1 / (2 * A * (2 / ln2 + 3 * c0) * (1 + 2 / e)),
        "C1": src / (2 * (1 - 1 / mp.sqrt(2))) + 2 * A * col,
        "CS2": 1 / (2 * A * (2 + 1 / e)),
        "C2": src + 2 * A * (1 + mp.mpf(3) / 2),
        "CK": mp.mpf(4),
        "CS4": 1 / (2 * A * (1 + 1 / (2 * e))),
        "C4": mp.mpf(12),
    }


def scalar_moment_fixture():
    # v_{t+1} = v_t (1 - 2 eta + 3 eta^2), v_1 = beta*^2 = 1, eta_t = t^-1/2 / 2 kept exact via mpmath
    v = mp.mpf(1)
    out = []
    for t in range(1, 4):
        eta = mp.mpf(t) ** -0.5 / 2
        v = v * (1 - 2 * eta + 3 * eta ** 2)
        out.append(v)
    const = Fraction(1)
    for _ in range(3):
        const *= 1 - 2 * Fraction(1, 2) + 3 * Fraction(1, 4)
    return out, const


def slope_fit_log(ts):
    x = [mp.log(t) for t in ts]
    y = [-x_ / 2 + mp.log(x_) for x_ in x]
    n = len(x)
    xm, ym = mp.fsum(x) / n, mp.fsum(y) / n
    return mp.fsum((a - xm) * (b - ym) for a, b in zip(x, y)) / mp.fsum((a - xm) ** 2 for a in x)


def main():
    full, partial = effdim_inv_square()
    sc, sc_const = scalar_moment_fixture()
    data = {
        "trace_i4_sqrt_tail": trace_i4_sqrt_with_tail(),
        "zeta2": mp.zeta(2),
        "effdim_inv_square_full": full,
        "effdim_inv_square_1e6": partial,
        "effdim_bound_s05_lam001": mp.mpf(0.01) ** -0.5 * mp.pi * 0.5 / mp.sin(mp.pi * 0.5),
        "lemma_a1_b2_t025_n2": lemma_a1(2, mp.mpf(0.25), 2),
        "trapezoid_b2_t025_n2": trapezoid(2, mp.mpf(0.25), 2),
        "lemma_a1_b2_t05_n1": lemma_a1(2, mp.mpf(0.5), 1),
        "lemma_a1_b4096_t06_n15": lemma_a1(4096, mp.mpf(0.6), mp.mpf(1.5)),
        "c0_case3_t025_n05": c0_case3(mp.mpf(0.25), mp.mpf(0.5)),
        "c0_case2_t025_n2": c0_case2_small(mp.mpf(0.25), 2),
        "c0_case4_t05_n1": c0_case4_nu1(),
        "stepsize_sum_t1000_e05_t05_n1": stepsize_sum(1000, 0.5, mp.mpf(0.5), 1),
        "stepsize_bound_t1000_e05_t05_n1": c_ol(mp.mpf(0.5), mp.mpf(0.5), 1, c0_case4_nu1()) * 1001 ** mp.mpf(-0.5) * mp.log(1001),
        "stepsize_sum_t777_e1_t06_n15": stepsize_sum(777, 1, mp.mpf(0.6), mp.mpf(1.5)),
        "lower_bound_t1": (2 * (1 - 2 ** mp.mpf(-0.5))) ** -1 * 2 ** mp.mpf(-0.5),
        "trace_rhs_2_s05": trace_identity_rhs([mp.mpf(2)], mp.mpf(0.5)),
        "trace_rhs_i4_s05": trace_identity_rhs([mp.mpf(i) ** -4 for i in range(1, 101)], mp.mpf(0.5)),
        "trace_lhs_i4_s05": mp.fsum(mp.mpf(i) ** -2 for i in range(1, 101)),
        "constants_at_ones": constants_at_ones(),
        "scalar_moment_decaying": sc,
        "scalar_moment_constant_half": float(sc_const),
        "slope_log_dyadic": slope_fit_log([2 ** k for k in range(6, 17)]),
        "slope_log_dense": slope_fit_log(list(range(64, 65537))),
    }

    def conv(v):
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        if isinstance(v, list):
            return [conv(x) for x in v]
        return float(v)

    OUT.write_text(json.dumps(conv(data), indent=2, sort_keys=True) + "\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()

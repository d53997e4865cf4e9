"""Independent reference for the amplification-factor polynomial.

Roots come from numpy.roots (companion-matrix eigenvalues); the physical root
is tracked by nearest-root continuation from kh = 0.  Values printed here are
frozen into test_dispersion.cpp.
"""
import cmath
import math

import numpy as np
from scipy.special import gamma


def weights(alpha, n):
    # r_j = j^(1-a) - (j-1)^(1-a), j = 1..n  (r_1 = 1)
    j = np.arange(1, n + 1, dtype=float)
    return j ** (1 - alpha) - (j - 1) ** (1 - alpha)


def coeffs(alpha, theta, pe, da, q, nc, kh, n):
    g = gamma(2 - alpha)
    c0 = 1 + 2 * pe * theta * g * (1 - math.cos(kh))
    c1 = (-1 + q * nc * g * (1 - 4 / 3 * math.cos(kh) + math.cos(2 * kh) / 3)
          + 2 * pe * (1 - theta) * g * (1 - math.cos(kh)) - da * nc * g
          + 1j * nc * g * (math.sin(kh) + 2 * q / 3 * math.sin(kh) - q / 3 * math.sin(2 * kh)))
    r = weights(alpha, n)  # r[0] = r_1
    a = np.zeros(n + 1, dtype=complex)  # a[m] multiplies G^(n-m)
    a[0] = c0
    a[1] = c1 + (r[1] if n >= 2 else 0)
    for m in range(2, n):
        a[m] = r[m] - r[m - 1]
    a[n] = -r[n - 1]
    return c0, c1, a


def selected_root(alpha, theta, pe, da, q, nc, kh, n, step=0.01):
    steps = max(1, int(math.ceil(abs(kh) / step)))
    prev = 1.0 + 0j
    for s in range(steps + 1):
        k = kh * s / steps
        _, _, a = coeffs(alpha, theta, pe, da, q, nc, k, n)
        roots = np.roots(a)
        prev = roots[np.argmin(abs(roots - prev))]
    return prev, np.roots(coeffs(alpha, theta, pe, da, q, nc, kh, n)[2])


def point(alpha, theta, pe, da, q, nc, kh, n=75, dk=1e-4):
    g, roots = selected_root(alpha, theta, pe, da, q, nc, kh, n)
    beta = cmath.phase(g)
    y = da * nc - kh * kh * pe - 1j * kh * nc
    c_ratio = 1j * beta / (y ** (1 / alpha))
    delta_c = abs(1 - c_ratio)

    def beta_near(k):
        _, _, a = coeffs(alpha, theta, pe, da, q, nc, k, n)
        rr = np.roots(a)
        return cmath.phase(rr[np.argmin(abs(rr - g))])

    bp, bm = beta_near(kh + dk), beta_near(kh - dk)
    dbeta = (bp - bm) / (2 * dk)
    w = y ** (1 / alpha)  # = -I * omega * dt
    r = abs(w)
    phi = cmath.phase(w)
    denom = r ** (1 - alpha) * (nc * math.cos((1 - alpha) * phi) + 2 * kh * pe * math.sin((1 - alpha) * phi))
    vg = -alpha * dbeta / denom
    return g, beta, c_ratio, delta_c, vg, roots


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    g, *_ = point(0.9, 0.5, 0.01, 0.0, 0.5, 0.1, 0.5)
    print("golden A: alpha=0.9 Pe=0.01 Da=0 theta=0.5 kh=0.5 Nc=0.1 -> G =", repr(g.real), repr(g.imag), abs(g))
    g, beta, cr, dc, vg, roots = point(0.9, 0.5, 0.001, 0.01, 0.5, 0.05, 0.3)
    print("golden B: alpha=0.9 Pe=0.001 Da=0.01 theta=0.5 kh=0.3 Nc=0.05 -> G =", repr(g.real), repr(g.imag))
    print("   beta =", repr(beta), " c_ratio =", repr(cr), " delta_c =", repr(dc), " vg =", repr(vg))
    print("   prod roots =", np.prod(roots))
    for nc in (0.1, 0.5, 1.0):
        g, beta, cr, dc, vg, _ = point(1.0, 0.5, 0.0, 0.0, 0.5, nc, 1e-3)
        print(f"alpha=1 Nc={nc} kh=1e-3: vg={vg!r} dc={dc!r}")
        g, beta, cr, dc, vg, _ = point(0.9, 0.5, 0.001, 0.0, 0.5, nc, 1e-3)
        print(f"alpha=0.9 Nc={nc} kh=1e-3: vg={vg!r} dc={dc!r}")

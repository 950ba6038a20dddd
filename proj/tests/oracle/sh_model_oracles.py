"""High-precision oracles for the sh_model module.

Produces frozen hex brackets for:
  - the decay rate a(mu) = sqrt(-1 + sqrt(1+mu))/2,
  - kappa(mu) (multiplication bound, outer square root included),
  - C0(mu) = sup_{r>=0} e^{sqrt(2) a r} |Im K0(b r)| / sqrt(mu),
  - complex K0 point values along the ray z = b r (both evaluation branches),
  - C1(d), C12(d), C2(d) spot values,
  - Fourier coefficients e1(m) of 1_{[-d,d]} cosh(2 a x) (closed form vs quad).

Also verifies, numerically, the claims the rigorous tail bound rests on:
  e^{sqrt2 a r}|Im K0(b r)| decays like r^{-1/2} (no exponential margin), and
  K0(x) <= sqrt(pi/(2x)) e^{-x} on the real axis.
"""

import math
from mpmath import (mp, mpf, mpc, sqrt, exp, log, atan, cos, sin, sinh, cosh,
                    pi, besselk, quad, im, re, nstr)

mp.dps = 40


def bracket(x, rel=1e-13):
    f = float(x)
    pad = abs(f) * rel + 1e-300
    lo = math.nextafter(f - pad, -math.inf)
    hi = math.nextafter(f + pad, math.inf)
    assert lo < x < hi
    return f"[{lo.hex()}, {hi.hex()}]"


def a_of(mu):
    return sqrt(-1 + sqrt(1 + mu)) / 2


def b_of(mu):
    a = a_of(mu)
    return sqrt(2) * a - 1j * sqrt(mu) / (2 * sqrt(2) * a)


def kappa_of(mu):
    s = sqrt(mu)
    inner = (2 * s + (1 + mu) * (2 * pi - 2 * atan(s))) / (8 * mu ** mpf("1.5") * (1 + mu))
    return sqrt(inner)


def c0_integrand(mu, r):
    a = a_of(mu)
    if r == 0:
        return atan((1 + sqrt(1 + mu)) / sqrt(mu)) / sqrt(mu)
    return exp(sqrt(2) * a * r) * abs(im(besselk(0, b_of(mu) * r))) / sqrt(mu)


def c0_of(mu, r_max=40, n=6000):
    f = lambda r: c0_integrand(mu, r)
    best_r, best = mpf(0), f(0)
    for i in range(1, n + 1):
        r = mpf(i) * r_max / n
        v = f(r)
        if v > best:
            best, best_r = v, r
    lo = max(best_r - mpf(r_max) / n, mpf(0))
    hi = best_r + mpf(r_max) / n
    for _ in range(160):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    r_star = (lo + hi) / 2
    return f(r_star), r_star


def c_constants(mu, d):
    a = a_of(mu)
    E1 = exp(-a * d)          # e^{-ad}
    E2 = exp(-2 * a * d)      # e^{-2ad}
    ei = exp(mpf(-1))         # e^{-1}
    C1 = 4 * ((2 * a * d + 1 + E2) / a ** 2
              + E2 * (4 * d + E2 / a)
              + ((1 + E2) / a + 2 * d) * (2 * ei + 1) / (a * (1 - E1))) \
        + 4 * (2 * ei + 1) ** 2 / (a ** 2 * (1 - E1) ** 2) \
        + (2 / a) * ((1 + E2) / a + 2 * d + E2 * (4 * d + E2 / a)
                     + (2 * ei + 1) / (a * (1 - E1)))
    C12 = 8 * (2 * d + 1 / (2 * a)) * (2 * d + (1 + E2) / (2 * a)
                                       + (2 * d + (3 + E2) / (2 * a)) / (1 - E1)
                                       + (4 * ei + 1 + E2) / (2 * a * (1 - E1) ** 2))
    C2 = (2 / a) * ((1 + E2) / a + 2 * d + E2 * (4 * d + E2 / a)
                    + (2 * ei + E2) / (a * (1 - E1)))
    return C1, C12, C2


def e1_closed(a, d, m):
    return 2 * a * (-1) ** m * sinh(2 * a * d) / (d * (4 * a ** 2 + (pi * m / d) ** 2))


def e1_quad(a, d, m):
    return quad(lambda x: cosh(2 * a * x) * cos(pi * m * x / d), [-d, 0, d]) / (2 * d)


print("== decay rate a and kappa ==")
for mu_s in ("0.24", "0.2", "0.28"):
    mu = mpf(mu_s)
    a = a_of(mu)
    k = kappa_of(mu)
    print(f"a({mu_s})     = {nstr(a, 20)}  {bracket(a)}")
    print(f"kappa({mu_s}) = {nstr(k, 20)}  {bracket(k)}")

print()
print("== C0 sup (and maximizer) ==")
for mu_s in ("0.24", "0.2", "0.28"):
    mu = mpf(mu_s)
    c0, r_star = c0_of(mu)
    print(f"C0({mu_s}) = {nstr(c0, 20)}  at r = {nstr(r_star, 10)}  {bracket(c0, 1e-10)}")
    print(f"   limit r->0+: {nstr(c0_integrand(mu, 0), 15)}")

print()
print("== decay of e^(sqrt2 a r)|Im K0(b r)|/sqrt(mu) at mu=0.24 (expect ~ r^-1/2) ==")
mu = mpf("0.24")
a, b = a_of(mu), b_of(mu)
for r in (30, 60, 120, 240):
    print(f"  r={r:4d}: {nstr(c0_integrand(mu, r), 10)}   envelope sqrt(pi/(2 sqrt2 a r))/sqrt(mu) = "
          f"{nstr(sqrt(pi / (2 * sqrt(2) * a * r)) / sqrt(mu), 10)}")
Rstar = 20 / a
print(f"tail majorant at R*=20/a={nstr(Rstar, 8)}: sqrt(pi/(2 sqrt2 a R*))/sqrt(mu) = "
      f"{nstr(sqrt(pi / (2 * sqrt(2) * a * Rstar)) / sqrt(mu), 10)} (must sit below the sup)")

print()
print("== real-axis majorant sanity: K0(x) e^x sqrt(2x/pi) < 1 ==")
for x in ("0.1", "0.5", "1", "2", "5", "10", "50"):
    xv = mpf(x)
    print(f"  x={x:>4}: ratio = {nstr(besselk(0, xv) * exp(xv) * sqrt(2 * xv / pi), 12)}")

print()
print("== K0(b r) point values, mu=0.24 (|b| = (1+mu)^(1/4)) ==")
print(f"b = {nstr(b, 20)},  |b| = {nstr(abs(b), 20)}")
for r_s in ("0.5", "2", "7", "9.5", "20", "60", "119"):
    r = mpf(r_s)
    z = b * r
    v = besselk(0, z)
    print(f"r={r_s:>5}  |z|={nstr(abs(z), 6)}")
    print(f"   Re K0 = {nstr(re(v), 20)}  {bracket(re(v), 1e-11)}")
    print(f"   Im K0 = {nstr(im(v), 20)}  {bracket(im(v), 1e-11)}")

print()
print("== C1, C12, C2 spot values ==")
for (mu_s, d) in (("0.24", 20), ("0.2", 10)):
    mu = mpf(mu_s)
    C1, C12, C2 = c_constants(mu, mpf(d))
    print(f"mu={mu_s}, d={d}:")
    print(f"   C1  = {nstr(C1, 20)}  {bracket(C1)}")
    print(f"   C12 = {nstr(C12, 20)}  {bracket(C12)}")
    print(f"   C2  = {nstr(C2, 20)}  {bracket(C2)}")

print()
print("== e1 coefficients: closed form vs numeric integral ==")
for (a_s, d, m) in (("0.16848842", 20, 0), ("0.16848842", 20, 1), ("0.16848842", 20, 5),
                    ("0.3", 2, 0), ("0.3", 2, 3)):
    av, dv = mpf(a_s), mpf(d)
    cf = e1_closed(av, dv, m)
    qv = e1_quad(av, dv, m)
    print(f"a={a_s}, d={d}, m={m}: closed = {nstr(cf, 20)}, quad = {nstr(qv, 20)}, "
          f"diff = {nstr(abs(cf - qv), 5)}")
    print(f"   {bracket(cf)}")

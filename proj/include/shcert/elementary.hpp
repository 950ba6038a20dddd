#pragma once
// Rigorous enclosures of the elementary functions the bounds need:
// exp, log, sin, cos, arctan, cosh, sinh, sech.
//
// All kernels are truncated Taylor/arctanh series evaluated in interval
// arithmetic over a reduced argument, plus an explicit interval remainder
// chosen so the truncation error is below one ULP of the result.  Argument
// reduction constants are two-word (Cody–Waite) splits whose residuals were
// bounded against 120-digit references; the residual term enters the reduced
// argument as an explicit interval, so the reduction itself is an enclosure
// and needs no exactness assumptions.

#include <cmath>

#include "shcert/interval.hpp"

namespace shcert {

namespace detail {

// ---- argument reduction -------------------------------------------------

// pi/2 = kPio2Hi + kPio2Lo + delta with |delta| <= 2^-87 (verified); kPio2Hi
// carries 33 significand bits so m*kPio2Hi is exact for |m| <= 2^20.
constexpr double kPio2Hi = 0x1.921fb544p+0;
constexpr double kPio2Lo = 0x1.0b4611a626331p-34;
constexpr double kPio2Delta = 0x1p-87;
constexpr double kTwoOverPi = 0x1.45f306dc9c883p-1;

// ln2 = kLn2Hi + kLn2Lo + delta with |delta| <= 2^-86 (verified); kLn2Hi
// carries 32 significand bits so k*kLn2Hi is exact for |k| <= 2^20.
constexpr double kLn2Hi = 0x1.62e42fee00000p-1;
constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
constexpr double kLn2Delta = 0x1p-86;
constexpr double kInvLn2 = 0x1.71547652b82fep+0;

struct ReducedAngle {
    Interval r;    // enclosure of x - m*(pi/2), |r| <= 0.7855
    int quadrant;  // m mod 4 in {0,1,2,3}
};

// Beyond this magnitude the quadrant of x is not resolved by double
// arithmetic with a two-word pi; callers fall back to [-1,1].
constexpr double kTrigReductionLimit = 0x1p20 * 1.57;

inline ReducedAngle reduce_pio2(double x) {
    const double m = std::nearbyint(x * kTwoOverPi);
    // |x*2/pi| <= 2^20 + 1, so the rounding error of the product is <= ~2^-32;
    // m can be off the true nearest integer only when x*2/pi is within 2^-31
    // of a half-integer, in which case either choice leaves |r| <= pi/4 + 2^-30.
    const Interval r = ((Interval(x) - Interval(m) * Interval(kPio2Hi)) -
                        Interval(m) * Interval(kPio2Lo)) -
                       Interval(m) * Interval(-kPio2Delta, kPio2Delta);
    if (!(r.lo >= -0.7855 && r.hi <= 0.7855))
        throw inconsistency_error("trig reduction left the kernel range");
    const double q4 = m - 4.0 * std::floor(m * 0.25);  // exact for |m| <= 2^20
    return ReducedAngle{r, int(q4)};
}

// ---- kernels (valid on |r| <= 0.7855, t = r^2 <= 0.617) ------------------

// cos r = sum_{k=0}^{9} (-1)^k t^k/(2k)! + R, R in [0, t^10/20!]  (alternating
// series with decreasing terms; first omitted term bounds and signs R)
inline Interval cos_kernel(const Interval& r) {
    const Interval t = sqr(r);
    Interval p = Interval(-1.0) / factorial(18);
    for (int k = 8; k >= 0; --k) {
        const Interval c = Interval(k % 2 ? -1.0 : 1.0) / factorial(2 * k);
        p = p * t + c;
    }
    const Interval rem = ipow(t, 10) / factorial(20);
    return p + Interval(0.0, rem.hi);
}

// sin r = r * (sum_{k=0}^{8} (-1)^k t^k/(2k+1)! + R), R in [-t^9/19!, 0]
inline Interval sin_kernel(const Interval& r) {
    const Interval t = sqr(r);
    Interval p = Interval(1.0) / factorial(17);
    for (int k = 7; k >= 0; --k) {
        const Interval c = Interval(k % 2 ? -1.0 : 1.0) / factorial(2 * k + 1);
        p = p * t + c;
    }
    const Interval rem = ipow(t, 9) / factorial(19);
    return r * (p + Interval(-rem.hi, 0.0));
}

inline Interval sin_point(double x) {
    const ReducedAngle a = reduce_pio2(x);
    switch (a.quadrant) {
        case 0: return sin_kernel(a.r);
        case 1: return cos_kernel(a.r);
        case 2: return -sin_kernel(a.r);
        default: return -cos_kernel(a.r);
    }
}

inline Interval cos_point(double x) {
    const ReducedAngle a = reduce_pio2(x);
    switch (a.quadrant) {
        case 0: return cos_kernel(a.r);
        case 1: return -sin_kernel(a.r);
        case 2: return -cos_kernel(a.r);
        default: return sin_kernel(a.r);
    }
}

// ---- exp kernel ----------------------------------------------------------

// exp(v) with v reduced to r = v - k*ln2, |r| <= 0.35:
// exp r = sum_{j=0}^{13} r^j/j! + R, |R| <= |r|^14/14! / (1 - |r|/15).
inline Interval exp_point(double v) {
    if (v > 710.0) return Interval(kMaxDouble, kInf);        // exp overflows past 709.79
    if (v < -745.0) return Interval(0.0, 0x1p-1074);          // exp underflows below -744.44
    const double k = std::nearbyint(v * kInvLn2);
    const Interval r = ((Interval(v) - Interval(k) * Interval(kLn2Hi)) -
                        Interval(k) * Interval(kLn2Lo)) -
                       Interval(k) * Interval(-kLn2Delta, kLn2Delta);
    if (!(r.lo >= -0.35 && r.hi <= 0.35))
        throw inconsistency_error("exp reduction left the kernel range");
    Interval p = Interval(1.0) / factorial(13);
    for (int j = 12; j >= 0; --j) p = p * r + Interval(1.0) / factorial(j);
    const Interval u = ipow(Interval(std::max(std::fabs(r.lo), std::fabs(r.hi))), 14) /
                       factorial(14) * Interval(15.0) / (Interval(15.0) - Interval(0.35));
    p += Interval(-u.hi, u.hi);
    return ldexp_iv(p, int(k));
}

// ---- log kernel ----------------------------------------------------------

// log(v) via v = m*2^e with m in [sqrt(1/2), sqrt(2)):
// log m = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716,
// atanh s = s * (sum_{j=0}^{10} t^j/(2j+1) + R), t = s^2, R in [0, t^11/(23(1-t))].
inline Interval log_point(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("log of non-positive value");
    int e = 0;
    double m = std::frexp(v, &e);  // m in [0.5, 1), exact decomposition
    if (m < 0.70710678118654752) {
        m *= 2.0;  // exact
        e -= 1;
    }
    const Interval s = (Interval(m) - Interval(1.0)) / (Interval(m) + Interval(1.0));
    const Interval t = sqr(s);
    Interval p = Interval(1.0) / Interval(23.0);
    for (int j = 10; j >= 0; --j) p = p * t + Interval(1.0) / Interval(double(2 * j + 1));
    // p currently holds sum_{j=0}^{11}; recompute remainder for 12 terms:
    // first omitted term t^12/25, geometric majorant t^12/(25(1-t))
    const Interval rem = ipow(t, 12) / (Interval(25.0) * (Interval(1.0) - t));
    const Interval atanh_s = s * (p + Interval(0.0, rem.hi));
    const Interval e_ln2 = Interval(double(e)) * Interval(kLn2Hi) +
                           Interval(double(e)) * Interval(kLn2Lo) +
                           Interval(double(e)) * Interval(-kLn2Delta, kLn2Delta);
    return e_ln2 + Interval(2.0) * atanh_s;
}

// ---- arctan kernel --------------------------------------------------------

// atan w = w * (sum_{j=0}^{K-1} (-1)^j t^j/(2j+1) + R), t = w^2, |R| <= t^K/(2K+1);
// valid for |w| <= 0.35 with K = 20, and |w| <= 0.5 with K = 26.
inline Interval atan_series(const Interval& w, int terms) {
    const Interval t = sqr(w);
    Interval p = Interval(0.0);
    for (int j = terms - 1; j >= 0; --j) {
        const Interval c = Interval(j % 2 ? -1.0 : 1.0) / Interval(double(2 * j + 1));
        p = p * t + c;
    }
    const Interval rem = ipow(t, unsigned(terms)) / Interval(double(2 * terms + 1));
    return w * (p + Interval(-rem.hi, rem.hi));
}

inline Interval atan_point(double v) {
    if (v < 0.0) return -atan_point(-v);
    if (v == 0.0) return Interval(0.0);
    if (std::isinf(v)) return consts::half_pi();
    if (v <= 0.5) return atan_series(Interval(v), 26);
    if (v <= 2.0) {
        // atan v = pi/4 + atan((v-1)/(v+1)), reduced argument in [-1/3, 1/3]
        const Interval w = (Interval(v) - Interval(1.0)) / (Interval(v) + Interval(1.0));
        return consts::quarter_pi() + atan_series(w, 20);
    }
    // atan v = pi/2 - atan(1/v), reduced argument in (0, 1/2)
    return consts::half_pi() - atan_series(Interval(1.0) / Interval(v), 26);
}

// 1/x for x known positive below, allowing a saturated infinite upper endpoint
inline Interval inv_positive(const Interval& x) {
    if (!(x.lo > 0.0)) throw domain_error("inv_positive requires positive interval");
    if (std::isinf(x.hi)) return Interval(0.0, div_up(1.0, x.lo));
    return Interval(div_down(1.0, x.hi), div_up(1.0, x.lo));
}

// cosh via exp; no cancellation (sum of positive terms)
inline Interval cosh_point(double v) {
    const Interval e = exp_point(std::fabs(v));
    return (e + inv_positive(e)) * Interval(0.5);
}

// sinh: Taylor for |v| <= 0.5 (avoids exp cancellation), exp form beyond.
// sinh v = v * (sum_{k=0}^{7} t^k/(2k+1)! + R), t = v^2, R in [0, t^8/17!].
inline Interval sinh_point(double v) {
    const double av = std::fabs(v);
    if (av <= 0.5) {
        const Interval t = sqr(Interval(v));
        Interval p = Interval(1.0) / factorial(15);
        for (int k = 6; k >= 0; --k) p = p * t + Interval(1.0) / factorial(2 * k + 1);
        const Interval rem = ipow(t, 8) / factorial(17);
        return Interval(v) * (p + Interval(0.0, rem.hi));
    }
    const Interval e = exp_point(av);
    const Interval s = (e - inv_positive(e)) * Interval(0.5);
    return v > 0.0 ? s : -s;
}

}  // namespace detail

// ---- public interval functions --------------------------------------------

inline Interval iv_exp(const Interval& x) {
    return Interval(detail::exp_point(x.lo).lo, detail::exp_point(x.hi).hi);
}

inline Interval iv_log(const Interval& x) {
    if (!(x.lo > 0.0)) throw domain_error("log requires a strictly positive interval");
    return Interval(detail::log_point(x.lo).lo, detail::log_point(x.hi).hi);
}

inline Interval iv_sin(const Interval& x) {
    if (!x.is_finite() || x.mag() > detail::kTrigReductionLimit ||
        x.width() >= consts::two_pi().lo)
        return Interval(-1.0, 1.0);
    Interval res = hull(detail::sin_point(x.lo), detail::sin_point(x.hi));
    // maxima at pi/2 + 2*pi*k, minima at -pi/2 + 2*pi*k; the containment test
    // is conservative (outward-rounded), so critical points are never missed
    if (possibly_contains_integer((x - consts::half_pi()) / consts::two_pi()))
        res = hull(res, Interval(1.0));
    if (possibly_contains_integer((x + consts::half_pi()) / consts::two_pi()))
        res = hull(res, Interval(-1.0));
    return intersect(res, Interval(-1.0, 1.0));
}

inline Interval iv_cos(const Interval& x) {
    if (!x.is_finite() || x.mag() > detail::kTrigReductionLimit ||
        x.width() >= consts::two_pi().lo)
        return Interval(-1.0, 1.0);
    Interval res = hull(detail::cos_point(x.lo), detail::cos_point(x.hi));
    // maxima at 2*pi*k, minima at pi + 2*pi*k
    if (possibly_contains_integer(x / consts::two_pi()))
        res = hull(res, Interval(1.0));
    if (possibly_contains_integer((x - consts::pi()) / consts::two_pi()))
        res = hull(res, Interval(-1.0));
    return intersect(res, Interval(-1.0, 1.0));
}

inline Interval iv_atan(const Interval& x) {
    return Interval(detail::atan_point(x.lo).lo, detail::atan_point(x.hi).hi);
}

inline Interval iv_cosh(const Interval& x) {
    if (x.lo >= 0.0)
        return Interval(detail::cosh_point(x.lo).lo, detail::cosh_point(x.hi).hi);
    if (x.hi <= 0.0)
        return Interval(detail::cosh_point(x.hi).lo, detail::cosh_point(x.lo).hi);
    return Interval(1.0, std::max(detail::cosh_point(x.lo).hi, detail::cosh_point(x.hi).hi));
}

inline Interval iv_sinh(const Interval& x) {
    return Interval(detail::sinh_point(x.lo).lo, detail::sinh_point(x.hi).hi);
}

inline Interval iv_sech(const Interval& x) {
    return detail::inv_positive(iv_cosh(x));
}

}  // namespace shcert

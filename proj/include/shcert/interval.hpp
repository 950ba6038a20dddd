#pragma once
// Outward-rounded interval arithmetic on binary64.
//
// Directed rounding is emulated while staying in round-to-nearest mode: each
// endpoint operation recovers the exact rounding error of the primitive
// (twoSum for +/-, fma residuals for *, /, sqrt) and nudges the endpoint one
// ULP outward only when the primitive was inexact.  Exact results therefore
// stay exact: [1,2] + [3,4] = [4,6] without widening.
//
// Build requirements: strict IEEE-754 semantics (no -ffast-math, and
// -ffp-contract=off so written products are not fused behind our back) and
// correctly rounded std::fma / std::sqrt, both guaranteed on x86-64 glibc.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "shcert/errors.hpp"

namespace shcert {

namespace detail {

inline double next_up(double x) {
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double next_down(double x) {
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

// Exact rounding error of s = fl(a + b) (Knuth twoSum): a + b = s + err
// whenever s is finite.  The marginal spurious-overflow cases surface as a
// non-finite err and are absorbed by the callers' unconditional nudge.
inline double two_sum_err(double a, double b, double s) {
    const double bv = s - a;
    const double av = s - bv;
    return (a - av) + (b - bv);
}

// Below this magnitude the fma residual of a product/quotient may fall into
// the subnormal range and stop being exact; we then skip the residual test
// and nudge unconditionally (a round-to-nearest result is always within one
// neighbouring double of the true value).
constexpr double kResidualFloor = 0x1p-969;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDouble = std::numeric_limits<double>::max();

inline double add_down(double a, double b) {
    const double s = a + b;
    if (std::isnan(s)) throw domain_error("interval add: inf - inf");
    if (std::isinf(s)) return s > 0 ? kMaxDouble : s;
    const double err = two_sum_err(a, b, s);
    if (err == 0.0) return s;
    if (std::isnan(err)) return next_down(s);
    return err > 0.0 ? s : next_down(s);
}

inline double add_up(double a, double b) {
    const double s = a + b;
    if (std::isnan(s)) throw domain_error("interval add: inf - inf");
    if (std::isinf(s)) return s < 0 ? -kMaxDouble : s;
    const double err = two_sum_err(a, b, s);
    if (err == 0.0) return s;
    if (std::isnan(err)) return next_up(s);
    return err < 0.0 ? s : next_up(s);
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;  // also resolves 0 * inf as a bound
    const double p = a * b;
    if (std::isnan(p)) throw domain_error("interval mul: nan product");
    if (std::isinf(p)) return p > 0 ? kMaxDouble : p;
    if (std::fabs(p) < kResidualFloor) return next_down(p);
    const double err = std::fma(a, b, -p);  // a*b - p, exact above the floor
    if (err == 0.0) return p;
    return err > 0.0 ? p : next_down(p);
}

inline double mul_up(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    const double p = a * b;
    if (std::isnan(p)) throw domain_error("interval mul: nan product");
    if (std::isinf(p)) return p < 0 ? -kMaxDouble : p;
    if (std::fabs(p) < kResidualFloor) return next_up(p);
    const double err = std::fma(a, b, -p);
    if (err == 0.0) return p;
    return err < 0.0 ? p : next_up(p);
}

// Divisor endpoints are finite and nonzero (the interval-level operator
// rejects divisors containing zero or unbounded divisors).
inline double div_down(double a, double b) {
    if (a == 0.0) return 0.0;
    const double q = a / b;
    if (std::isnan(q)) throw domain_error("interval div: nan quotient");
    if (std::isinf(q)) return q > 0 ? kMaxDouble : q;
    if (std::fabs(q) < kResidualFloor || std::fabs(a) < kResidualFloor) return next_down(q);
    const double r = std::fma(q, b, -a);  // q*b - a, exact above the floors
    if (r == 0.0) return q;
    // true quotient t satisfies sign(t - q) = sign(a - q*b) / sign(b)
    const bool q_is_below = (b > 0.0) ? (r < 0.0) : (r > 0.0);
    return q_is_below ? q : next_down(q);
}

inline double div_up(double a, double b) {
    if (a == 0.0) return 0.0;
    const double q = a / b;
    if (std::isnan(q)) throw domain_error("interval div: nan quotient");
    if (std::isinf(q)) return q < 0 ? -kMaxDouble : q;
    if (std::fabs(q) < kResidualFloor || std::fabs(a) < kResidualFloor) return next_up(q);
    const double r = std::fma(q, b, -a);
    if (r == 0.0) return q;
    const bool q_is_above = (b > 0.0) ? (r > 0.0) : (r < 0.0);
    return q_is_above ? q : next_up(q);
}

inline double sqrt_down(double x) {
    if (x == 0.0) return 0.0;
    const double r = std::sqrt(x);  // correctly rounded per IEEE 754
    if (std::isinf(r)) return kMaxDouble;
    if (x < 0x1p-966) return std::max(0.0, next_down(r));
    const double e = std::fma(r, r, -x);  // r*r - x, exact above the floor
    if (e == 0.0) return r;
    return e < 0.0 ? r : next_down(r);
}

inline double sqrt_up(double x) {
    if (x == 0.0) return 0.0;
    const double r = std::sqrt(x);
    if (std::isinf(r)) return r;
    if (x < 0x1p-966) return next_up(r);
    const double e = std::fma(r, r, -x);
    if (e == 0.0) return r;
    return e > 0.0 ? r : next_up(r);
}

}  // namespace detail

struct Interval {
    double lo;
    double hi;

    constexpr Interval() : lo(0.0), hi(0.0) {}
    constexpr Interval(double v) : lo(v), hi(v) { check(); }  // NOLINT: implicit by design
    constexpr Interval(double l, double h) : lo(l), hi(h) { check(); }

    constexpr void check() const {
        // a NaN endpoint fails lo <= hi, so one comparison covers both invariants
        if (!(lo <= hi)) throw inconsistency_error("interval invariant violated (lo > hi or NaN)");
    }

    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool is_point() const { return lo == hi; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

    // sup |x| and inf |x| over the interval
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    double mig() const {
        if (lo <= 0.0 && 0.0 <= hi) return 0.0;
        return std::min(std::fabs(lo), std::fabs(hi));
    }

    // a representative point inside the interval (not a rigorous quantity)
    double mid() const {
        double m = 0.5 * (lo + hi);
        if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
        if (!(m >= lo)) m = lo;
        if (!(m <= hi)) m = hi;
        return m;
    }

    // upper bounds on the half-width and width
    double rad() const {
        const double m = mid();
        return std::max(detail::sub_up(hi, m), detail::sub_up(m, lo));
    }
    double width() const { return detail::sub_up(hi, lo); }

    Interval operator-() const { return Interval(-hi, -lo); }

    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }
    Interval& operator/=(const Interval& o) { return *this = *this / o; }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(detail::add_down(a.lo, b.lo), detail::add_up(a.hi, b.hi));
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(detail::sub_down(a.lo, b.hi), detail::sub_up(a.hi, b.lo));
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        using detail::mul_down;
        using detail::mul_up;
        // sign-case decomposition; only the mixed*mixed case needs 4 products
        if (a.lo >= 0.0) {
            if (b.lo >= 0.0) return Interval(mul_down(a.lo, b.lo), mul_up(a.hi, b.hi));
            if (b.hi <= 0.0) return Interval(mul_down(a.hi, b.lo), mul_up(a.lo, b.hi));
            return Interval(mul_down(a.hi, b.lo), mul_up(a.hi, b.hi));
        }
        if (a.hi <= 0.0) {
            if (b.lo >= 0.0) return Interval(mul_down(a.lo, b.hi), mul_up(a.hi, b.lo));
            if (b.hi <= 0.0) return Interval(mul_down(a.hi, b.hi), mul_up(a.lo, b.lo));
            return Interval(mul_down(a.lo, b.hi), mul_up(a.lo, b.lo));
        }
        if (b.lo >= 0.0) return Interval(mul_down(a.lo, b.hi), mul_up(a.hi, b.hi));
        if (b.hi <= 0.0) return Interval(mul_down(a.hi, b.lo), mul_up(a.lo, b.lo));
        return Interval(std::min(mul_down(a.lo, b.hi), mul_down(a.hi, b.lo)),
                        std::max(mul_up(a.lo, b.lo), mul_up(a.hi, b.hi)));
    }

    friend Interval operator/(const Interval& a, const Interval& b) {
        using detail::div_down;
        using detail::div_up;
        if (b.lo <= 0.0 && 0.0 <= b.hi) throw domain_error("division by interval containing zero");
        if (!b.is_finite()) throw unsupported_error("division by unbounded interval");
        if (b.lo > 0.0) {
            if (a.lo >= 0.0) return Interval(div_down(a.lo, b.hi), div_up(a.hi, b.lo));
            if (a.hi <= 0.0) return Interval(div_down(a.lo, b.lo), div_up(a.hi, b.hi));
            return Interval(div_down(a.lo, b.lo), div_up(a.hi, b.lo));
        }
        // b.hi < 0
        if (a.lo >= 0.0) return Interval(div_down(a.hi, b.hi), div_up(a.lo, b.lo));
        if (a.hi <= 0.0) return Interval(div_down(a.hi, b.lo), div_up(a.lo, b.hi));
        return Interval(div_down(a.hi, b.hi), div_up(a.lo, b.hi));
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }
};

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Interval intersect(const Interval& a, const Interval& b) {
    const double l = std::max(a.lo, b.lo);
    const double h = std::min(a.hi, b.hi);
    if (!(l <= h)) throw domain_error("empty interval intersection");
    return Interval(l, h);
}

inline bool try_intersect(const Interval& a, const Interval& b, Interval* out) {
    const double l = std::max(a.lo, b.lo);
    const double h = std::min(a.hi, b.hi);
    if (!(l <= h)) return false;
    *out = Interval(l, h);
    return true;
}

inline Interval iv_abs(const Interval& x) {
    return Interval(x.mig(), x.mag());
}

// x^2, tight on zero-straddling intervals (range is [0, mag^2], not lo*hi cases)
inline Interval sqr(const Interval& x) {
    using detail::mul_down;
    using detail::mul_up;
    if (x.lo >= 0.0) return Interval(mul_down(x.lo, x.lo), mul_up(x.hi, x.hi));
    if (x.hi <= 0.0) return Interval(mul_down(x.hi, x.hi), mul_up(x.lo, x.lo));
    return Interval(0.0, std::max(mul_up(x.lo, x.lo), mul_up(x.hi, x.hi)));
}

namespace detail {

inline double pow_down(double v, unsigned n) {  // v >= 0
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) r = mul_down(r, v);
    return r;
}

inline double pow_up(double v, unsigned n) {  // v >= 0
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) r = mul_up(r, v);
    return r;
}

}  // namespace detail

// x^n for integer n >= 0, with endpoint monotonicity exploited per sign case
inline Interval ipow(const Interval& x, unsigned n) {
    if (n == 0) return Interval(1.0);
    if (n == 1) return x;
    using detail::pow_down;
    using detail::pow_up;
    if (x.lo >= 0.0) return Interval(pow_down(x.lo, n), pow_up(x.hi, n));
    if (x.hi <= 0.0) {
        const double dl = pow_down(-x.hi, n);
        const double du = pow_up(-x.lo, n);
        return (n % 2 == 0) ? Interval(dl, du) : Interval(-du, -dl);
    }
    if (n % 2 == 0) return Interval(0.0, std::max(pow_up(-x.lo, n), pow_up(x.hi, n)));
    return Interval(-pow_up(-x.lo, n), pow_up(x.hi, n));
}

inline Interval iv_sqrt(const Interval& x) {
    if (x.lo < 0.0) throw domain_error("sqrt of interval with negative lower endpoint");
    return Interval(detail::sqrt_down(x.lo), detail::sqrt_up(x.hi));
}

// Exact power-of-two scaling, outward-nudged only on subnormal precision loss
// or overflow (exactness detected by a round-trip test, which is itself exact
// because upscaling a subnormal is).
inline Interval ldexp_iv(const Interval& x, int k) {
    auto scale_down = [k](double v) {
        const double s = std::ldexp(v, k);
        if (std::isinf(s)) return s > 0 ? detail::kMaxDouble : s;
        if (s == 0.0 && v != 0.0) return detail::next_down(0.0);
        if (std::ldexp(s, -k) == v) return s;
        return detail::next_down(s);
    };
    auto scale_up = [k](double v) {
        const double s = std::ldexp(v, k);
        if (std::isinf(s)) return s < 0 ? -detail::kMaxDouble : s;
        if (s == 0.0 && v != 0.0) return detail::next_up(0.0);
        if (std::ldexp(s, -k) == v) return s;
        return detail::next_up(s);
    };
    return Interval(scale_down(x.lo), scale_up(x.hi));
}

// true iff [k.lo, k.hi] may contain an integer (conservative on wide input)
inline bool possibly_contains_integer(const Interval& k) {
    if (!k.is_finite()) return true;
    return std::floor(k.hi) >= std::ceil(k.lo);
}

// Verified two-sided enclosures of the constants the bounds need.  Endpoints
// were cross-checked against 120-digit values; each pair is the rounded-down
// double and its upper neighbour.
namespace consts {

inline Interval pi() { return Interval(0x1.921fb54442d18p+1, 0x1.921fb54442d19p+1); }
inline Interval two_pi() { return Interval(0x1.921fb54442d18p+2, 0x1.921fb54442d19p+2); }
inline Interval half_pi() { return Interval(0x1.921fb54442d18p+0, 0x1.921fb54442d19p+0); }
inline Interval quarter_pi() { return Interval(0x1.921fb54442d18p-1, 0x1.921fb54442d19p-1); }
inline Interval ln2() { return Interval(0x1.62e42fefa39efp-1, 0x1.62e42fefa39f0p-1); }
inline Interval euler_gamma() { return Interval(0x1.2788cfc6fb618p-1, 0x1.2788cfc6fb619p-1); }
inline Interval sqrt2() { return Interval(0x1.6a09e667f3bccp+0, 0x1.6a09e667f3bcdp+0); }

}  // namespace consts

// Interval factorials: exact doubles through 18!, enclosures beyond.
inline const Interval& factorial(int k) {
    static const std::array<Interval, 41> table = [] {
        std::array<Interval, 41> f{};
        f[0] = Interval(1.0);
        for (int i = 1; i <= 40; ++i) f[i] = f[i - 1] * Interval(double(i));
        return f;
    }();
    if (k < 0 || k > 40) throw domain_error("factorial index out of table range");
    return table[size_t(k)];
}

// --- serialization -------------------------------------------------------
// Endpoints round-trip through 17 significant decimal digits (binary64 is
// uniquely recoverable from 17 digits, and strtod is correctly rounded).

inline std::string double_to_string(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline double double_from_string(const std::string& s) {
    const char* p = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || *end != '\0') throw format_error("unparseable double: '" + s + "'");
    if (std::isnan(v)) throw format_error("NaN endpoint rejected: '" + s + "'");
    return v;
}

inline std::string to_string(const Interval& x) {
    return "[" + double_to_string(x.lo) + ", " + double_to_string(x.hi) + "]";
}

}  // namespace shcert

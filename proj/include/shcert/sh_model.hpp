#pragma once

// Swift-Hohenberg specifics: the linear symbols l, l0, l1, l_partial, the
// residual and linearization sequences built from an approximate solution,
// and the closed-form analytic constants of the tail estimates — the decay
// rate a, the Bessel-based amplitude C0, the envelope constants C1(d),
// C12(d), C2(d), and the Fourier data E1, E2, E12 of the localized
// exponential weights.
//
// C0 = sup_{r >= 0} e^{sqrt(2) a r} |Im K0(b r)| / sqrt(mu) is certified by
// branch and bound over r with a verified enclosure of the modified Bessel
// function K0 along the ray z = b r (ascending series for |z| <= 8,
// Kummer-type asymptotic expansion with an explicit Lagrange remainder
// beyond), an explicit crude bound near r = 0 where the logarithm blows up,
// and the monotone majorant sqrt(pi/(2 sqrt(2) a r)) / sqrt(mu) for the tail
// r >= R*.  The majorant follows from |K0(z)| <= K0(Re z) and
// K0(x) <= sqrt(pi/(2x)) e^{-x} (cosh t >= 1 + t^2/2 inside the integral
// representation); the full expression only decays algebraically, so no
// exponential-margin tail exists.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <queue>
#include <utility>
#include <vector>

#include "shcert/elementary.hpp"
#include "shcert/quadrature.hpp"
#include "shcert/seqspace.hpp"

namespace shcert {

struct SHParams {
    Interval mu;       // linear parameter, mu > 0
    Interval nu1;      // quadratic coefficient
    Interval nu2;      // cubic coefficient
    double d = 1.0;    // domain half-width, Omega_0 = (-d, d)^2
    int j = 2;         // target dihedral order
};

inline void validate_params(const SHParams& p) {
    if (!(p.mu.lo > 0.0)) throw config_error("sh model: mu must be positive");
    if (!(p.d > 0.0)) throw config_error("sh model: d must be positive");
}

struct DecayConstants {
    Interval a;             // sqrt(-1 + sqrt(1 + mu)) / 2
    Interval b_re, b_im;    // b = sqrt(2) a - i sqrt(mu) / (2 sqrt(2) a)
    Interval C0, C1, C12, C2;
};

// ---- symbols ----------------------------------------------------------------

// value of the requested symbol at the frequency xi = (xi1, xi2);
// lpartial returns the magnitude factor 2 pi xi2 of the imaginary symbol
inline Interval symbol(SymbolKind kind, const Interval& xi1, const Interval& xi2,
                       const SHParams& p) {
    const Interval four_pi2 = Interval(4.0) * sqr(consts::pi());
    const Interval r2 = sqr(xi1) + sqr(xi2);
    switch (kind) {
        case SymbolKind::zero: return Interval(0.0);
        case SymbolKind::one: return Interval(1.0);
        case SymbolKind::l: return sqr(Interval(1.0) - four_pi2 * r2) + p.mu;
        case SymbolKind::l0: return -four_pi2 * r2 - Interval(1.0);
        case SymbolKind::l1: return sqr(Interval(1.0) - four_pi2 * r2) + Interval(1.0);
        case SymbolKind::lpartial: return Interval(2.0) * consts::pi() * xi2;
    }
    throw config_error("symbol: unknown kind");
}

inline SymbolFn symbol_fn(SymbolKind kind, const SHParams& p) {
    return [kind, p](const Interval& f1, const Interval& f2) {
        return symbol(kind, f1, f2, p);
    };
}

namespace detail {

// copy a sequence into the table of a larger truncation order (same group)
inline SymSequence embed(const SymSequence& u, int order) {
    if (order < u.N()) throw config_error("embed: target order below the support");
    if (order == u.N()) return u;
    SymSequence r(make_table(u.group(), order), u.d);
    for (std::size_t s = 0; s < u.size(); ++s)
        r.entries[r.table->slot(u.table->reps[s])] = u.entries[s];
    return r;
}

}  // namespace detail

// ---- residual and linearization data ---------------------------------------

// F(U0) = L U0 + nu1 U0*U0 + nu2 U0*U0*U0 with exact support growth to 3 N0
inline SymSequence residual_F(const SymSequence& U0, const SHParams& p) {
    validate_params(p);
    const int n0 = U0.N();
    const SymSequence u2 = convolve(U0, U0, 2 * n0);
    const SymSequence u3 = convolve(u2, U0, 3 * n0);
    SymSequence r = detail::embed(apply_symbol(U0, symbol_fn(SymbolKind::l, p)), 3 * n0);
    r = r + p.nu1 * detail::embed(u2, 3 * n0) + p.nu2 * u3;
    return r;
}

struct LinearizationData {
    SymSequence V0;    // 2 nu1 U0 + 3 nu2 U0*U0 on the full 2 N0 support
    SymSequence V0N;   // pi^{2N} V0
    SymSequence W;     // 2 nu1 delta + 6 nu2 U0, on the table of U0
};

inline LinearizationData v0_and_W(const SymSequence& U0, const SHParams& p, int N) {
    validate_params(p);
    const int n0 = U0.N();
    LinearizationData out;
    out.V0 = (Interval(2.0) * p.nu1) * detail::embed(U0, 2 * n0) +
             (Interval(3.0) * p.nu2) * convolve(U0, U0, 2 * n0);
    out.V0N = project(out.V0, 2 * N, ProjectSide::inside);
    out.W = (Interval(6.0) * p.nu2) * U0;
    const std::size_t origin = U0.table->slot({0, 0});
    out.W.entries[origin] += Interval(2.0) * p.nu1;
    return out;
}

// ---- multiplication constant kappa ------------------------------------------

// kappa with ||u v||_2 <= kappa ||u||_2 ||v||_l; closed form in mu
inline Interval kappa(const SHParams& p) {
    validate_params(p);
    const Interval one(1.0), two(2.0);
    const Interval s = iv_sqrt(p.mu);
    const Interval inner = (two * s + (one + p.mu) * (two * consts::pi() - two * iv_atan(s))) /
                           (Interval(8.0) * p.mu * s * (one + p.mu));
    return iv_sqrt(inner);
}

// ---- complex-interval helpers and K0 along the ray z = b r -------------------

namespace detail {

struct CIv {
    Interval re, im;
};

inline CIv cadd(const CIv& a, const CIv& b) { return {a.re + b.re, a.im + b.im}; }
inline CIv csub(const CIv& a, const CIv& b) { return {a.re - b.re, a.im - b.im}; }
inline CIv cmul(const CIv& a, const CIv& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CIv cscale(const CIv& a, const Interval& s) { return {a.re * s, a.im * s}; }
inline Interval cmod(const CIv& a) { return iv_sqrt(sqr(a.re) + sqr(a.im)); }

// fixed complex data of the ray z = b r, b = sqrt(2) a - i sqrt(mu)/(2 sqrt(2) a)
struct RayConstants {
    Interval sqrt2a;   // Re b
    Interval q;        // -Im b
    Interval abs_b;    // (1 + mu)^{1/4}
    Interval arg_b;    // in (-pi/2, 0)
    CIv bsq4;          // b^2 / 4 = (-1 - i sqrt(mu)) / 4, exact closed form
    CIv lnb2;          // log(b / 2)
    CIv inv_b;         // 1 / b
    CIv rsqrt_b;       // b^{-1/2}
};

inline RayConstants make_ray(const Interval& mu, const Interval& a) {
    RayConstants rc;
    const Interval one(1.0);
    const Interval smu = iv_sqrt(mu);
    rc.sqrt2a = consts::sqrt2() * a;
    rc.q = smu / (Interval(2.0) * rc.sqrt2a);
    rc.bsq4 = {Interval(-0.25), Interval(-0.25) * smu};
    const Interval babs2 = iv_sqrt(one + mu);  // |b|^2 = |b^2| = sqrt(1 + mu)
    rc.abs_b = iv_sqrt(babs2);
    rc.arg_b = -iv_atan((one + babs2) / smu);  // q / (sqrt2 a) = (1 + sqrt(1+mu)) / sqrt(mu)
    rc.lnb2 = {iv_log(rc.abs_b / Interval(2.0)), rc.arg_b};
    rc.inv_b = {rc.sqrt2a / babs2, rc.q / babs2};
    const Interval m = Interval(1.0) / iv_sqrt(rc.abs_b);
    const Interval half = Interval(-0.5) * rc.arg_b;  // in (0, pi/4)
    rc.rsqrt_b = {m * iv_cos(half), m * iv_sin(half)};
    return rc;
}

// ascending series K0(z) = -(log(z/2) + gamma) I0(z) + sum_{k>=1} H_k (z^2/4)^k / (k!)^2
// parametrized by r (z = b r), sound for any r with r.lo > 0; practical for |z| <= 8
inline CIv k0_series(const RayConstants& rc, const Interval& r) {
    const CIv w = cscale(rc.bsq4, sqr(r));  // z^2 / 4
    const Interval wmax(cmod(w).hi);
    constexpr int K = 48;
    const double rho = wmax.hi / double((K + 2) * (K + 2));
    if (!(rho < 0.5)) throw iteration_error("k0_series: argument too large for the series branch");
    CIv term{Interval(1.0), Interval(0.0)};  // w^k / (k!)^2
    CIv i0 = term;
    CIv s{Interval(0.0), Interval(0.0)};
    Interval harm(0.0);
    Interval tail_base = Interval(1.0);  // becomes wmax^{K+1} / ((K+1)!)^2
    for (int k = 1; k <= K; ++k) {
        const Interval inv_k2 = Interval(1.0) / Interval(double(k) * double(k));
        term = cscale(cmul(term, w), inv_k2);
        harm += Interval(1.0) / Interval(double(k));
        i0 = cadd(i0, term);
        s = cadd(s, cscale(term, harm));
        tail_base = tail_base * wmax * inv_k2;
    }
    tail_base = tail_base * wmax / Interval(double(K + 1) * double(K + 1));
    const Interval geo = Interval(1.0) - Interval(rho);
    const Interval t_i0 = tail_base / geo;
    const Interval t_s = (harm + Interval(1.0)) * tail_base / geo +
                         tail_base * Interval(rho) / sqr(geo);
    const CIv lnf{iv_log(r) + rc.lnb2.re + consts::euler_gamma(), rc.lnb2.im};
    CIv k0 = csub(s, cmul(lnf, i0));
    const double err = ((cmod(lnf) * t_i0) + t_s).hi;
    k0.re += Interval(-err, err);
    k0.im += Interval(-err, err);
    return k0;
}

// asymptotic form K0(z) = e^{-z} [ sum_{k<n} g_k (2z)^{-k-1/2} + E ],
// g_k = binom(-1/2, k) Gamma(k + 1/2), |E| <= |g_n| (2 Re z)^{-n-1/2};
// follows from K0(z) = e^{-z} int_0^inf e^{-2zt} t^{-1/2} (1+t)^{-1/2} dt and
// the Lagrange remainder of the binomial series of (1+t)^{-1/2}
inline CIv k0_asym(const RayConstants& rc, const Interval& r) {
    const Interval rez = rc.sqrt2a * r;
    if (!(rez.lo > 0.0)) throw iteration_error("k0_asym: needs Re z > 0");
    // pick the truncation order with the smallest remainder envelope
    const double x = 2.0 * rez.lo;
    double g_run = 1.7724538509055161;  // sqrt(pi), double guidance only
    double pow_run = std::sqrt(x);
    double best = g_run / pow_run;
    int n_best = 0;
    for (int n = 1; n <= 24; ++n) {
        g_run *= double((2 * n - 1) * (2 * n - 1)) / (4.0 * double(n));
        pow_run *= x;
        if (g_run / pow_run < best) {
            best = g_run / pow_run;
            n_best = n;
        }
    }
    const CIv t = cscale(rc.inv_b, Interval(0.5) / r);  // 1 / (2z)
    const CIv sqrt_t = cscale(rc.rsqrt_b, Interval(1.0) / iv_sqrt(Interval(2.0) * r));
    CIv pw = sqrt_t;  // (2z)^{-k-1/2}
    CIv sum{Interval(0.0), Interval(0.0)};
    Interval g = iv_sqrt(consts::pi());
    Interval g_abs = g;
    for (int k = 0; k < n_best; ++k) {
        if (k > 0) {
            const Interval f = Interval(double((2 * k - 1) * (2 * k - 1))) / Interval(4.0 * double(k));
            g = g * (-f);
            g_abs = g_abs * f;
            pw = cmul(pw, t);
        }
        sum = cadd(sum, cscale(pw, g));
    }
    if (n_best > 0) {
        const Interval f = Interval(double((2 * n_best - 1) * (2 * n_best - 1))) /
                           Interval(4.0 * double(n_best));
        g_abs = g_abs * f;
    }
    const Interval two_re = Interval(2.0) * rez;
    const Interval e_bound = g_abs / (ipow(two_re, unsigned(n_best)) * iv_sqrt(two_re));
    const Interval qr = rc.q * r;
    const Interval em = iv_exp(-rez);
    const CIv ez{em * iv_cos(qr), em * iv_sin(qr)};
    CIv k0 = cmul(ez, sum);
    const double err = (em * e_bound).hi;
    k0.re += Interval(-err, err);
    k0.im += Interval(-err, err);
    return k0;
}

inline CIv k0_on_ray(const RayConstants& rc, const Interval& r) {
    if ((rc.abs_b * Interval(r.hi)).hi <= 8.0) return k0_series(rc, r);
    return k0_asym(rc, r);
}

}  // namespace detail

// ---- C0 sup certification ----------------------------------------------------

struct C0Options {
    double r1 = 1e-6;          // analytic bound handles (0, r1]
    double rstar_mult = 20.0;  // tail majorant from R* = rstar_mult / a on
    double tol = 5e-4;         // absolute gap between the sup bracket sides
    int max_cells = 20000;
};

inline Interval c0_sup(const Interval& mu, const Interval& a, const C0Options& opts = {}) {
    if (!(mu.lo > 0.0) || !(a.lo > 0.0)) throw config_error("c0_sup: needs mu > 0 and a > 0");
    if (!(opts.r1 > 0.0 && opts.r1 < 0.1)) throw config_error("c0_sup: r1 out of range");
    const detail::RayConstants rc = detail::make_ray(mu, a);
    const Interval smu = iv_sqrt(mu);
    const double r_end = (Interval(opts.rstar_mult) / a).hi;

    // crude bound on (0, r1]: Im K0(b r) = -arg(b) + O(r^2 log r) spelled out
    // through |Im I0|, |Re I0 - 1| <= |w| e^{|w|} and |Im S| <= |w| e^{|w|}
    const Interval r1(opts.r1);
    const Interval w1 = sqr(rc.abs_b * r1) * Interval(0.25);
    const Interval s1 = w1 * iv_exp(w1);
    const Interval q_small = (iv_abs(rc.lnb2.re) + consts::euler_gamma() + Interval(1.0) +
                              iv_abs(rc.arg_b)) * s1 +
                             sqr(rc.abs_b) * Interval(0.25) * iv_exp(w1) * sqr(r1) *
                                 iv_abs(iv_log(r1));
    const double head_ub = ((iv_abs(rc.arg_b) + q_small) * iv_exp(rc.sqrt2a * r1) / smu).hi;

    // monotone tail majorant for r >= r_end
    const double tail_ub =
        (iv_sqrt(consts::pi() / (Interval(2.0) * rc.sqrt2a * Interval(r_end))) / smu).hi;

    struct Cell {
        double lo, hi, fup;
    };
    std::vector<Cell> cells;
    double lb = 0.0;
    const auto integrand = [&](const Interval& r) {
        return iv_exp(rc.sqrt2a * r) * iv_abs(detail::k0_on_ray(rc, r).im) / smu;
    };
    std::priority_queue<std::pair<double, std::size_t>> heap;
    const auto add_cell = [&](double lo, double hi) {
        const Interval f = integrand(Interval(lo, hi));
        cells.push_back({lo, hi, f.hi});
        heap.push({f.hi, cells.size() - 1});
        lb = std::max(lb, integrand(Interval(0.5 * (lo + hi))).lo);
    };
    const int n_init = 256;
    const double lg0 = std::log(opts.r1), lg1 = std::log(r_end);
    double prev = opts.r1;
    for (int i = 1; i <= n_init; ++i) {
        const double knot =
            (i == n_init) ? r_end : std::exp(lg0 + (lg1 - lg0) * double(i) / n_init);
        add_cell(prev, knot);
        prev = knot;
    }
    while (int(cells.size()) < opts.max_cells && !heap.empty()) {
        const auto [fu, idx] = heap.top();
        heap.pop();
        if (cells[idx].fup != fu) continue;  // stale entry
        if (fu <= lb + opts.tol) break;
        const double mid = 0.5 * (cells[idx].lo + cells[idx].hi);
        if (!(mid > cells[idx].lo && mid < cells[idx].hi)) break;  // cannot split further
        const double hi = cells[idx].hi;
        const Interval f_left = integrand(Interval(cells[idx].lo, mid));
        cells[idx].hi = mid;
        cells[idx].fup = f_left.hi;
        heap.push({f_left.hi, idx});
        lb = std::max(lb, integrand(Interval(0.5 * (cells[idx].lo + mid))).lo);
        add_cell(mid, hi);
    }
    double grid_ub = 0.0;
    for (const Cell& c : cells) grid_ub = std::max(grid_ub, c.fup);
    if (tail_ub > std::max(grid_ub, head_ub))
        throw config_error(
            "c0_sup: tail majorant exceeds the interior bound; increase rstar_mult");
    const double ub = std::max({grid_ub, head_ub, lb});
    return Interval(lb, ub);
}

// ---- decay constants ----------------------------------------------------------

inline DecayConstants decay_constants(const SHParams& p, const C0Options& opts = {}) {
    validate_params(p);
    const Interval one(1.0), two(2.0), four(4.0);
    DecayConstants dc;
    dc.a = iv_sqrt(iv_sqrt(one + p.mu) - one) * Interval(0.5);
    dc.b_re = consts::sqrt2() * dc.a;
    dc.b_im = -iv_sqrt(p.mu) / (two * consts::sqrt2() * dc.a);
    dc.C0 = c0_sup(p.mu, dc.a, opts);
    const Interval& a = dc.a;
    const Interval d(p.d);
    const Interval e_ad = iv_exp(-a * d);
    const Interval e_2ad = iv_exp(-two * a * d);
    const Interval ei = iv_exp(Interval(-1.0));
    const Interval om = one - e_ad;
    const Interval mid = e_2ad * (four * d + e_2ad / a);  // e^{-2ad}(4d + e^{-2ad}/a)
    dc.C1 = four * ((two * a * d + one + e_2ad) / sqr(a) + mid +
                    ((one + e_2ad) / a + two * d) * (two * ei + one) / (a * om)) +
            four * sqr(two * ei + one) / (sqr(a) * sqr(om)) +
            (two / a) * ((one + e_2ad) / a + two * d + mid + (two * ei + one) / (a * om));
    dc.C12 = Interval(8.0) * (two * d + one / (two * a)) *
             (two * d + (one + e_2ad) / (two * a) +
              (two * d + (Interval(3.0) + e_2ad) / (two * a)) / om +
              (four * ei + one + e_2ad) / (two * a * sqr(om)));
    dc.C2 = (two / a) * ((one + e_2ad) / a + two * d + mid + (two * ei + e_2ad) / (a * om));
    return dc;
}

// ---- exponential-weight Fourier data ------------------------------------------

struct ESequences {
    SymSequence E1;   // coefficients of 1_{Omega_0} cosh(2 a x1)
    SymSequence E2;   // coefficients of 1_{Omega_0} cosh(2 a x2)
    SymSequence E12;  // coefficients of 1_{Omega_0} cosh(2 a x1) cosh(2 a x2)
};

// two-sided coefficient of cos(pi m x / d) in the cosine series of cosh(2 a x)
inline Interval e1_coefficient(const Interval& a, double d, int m) {
    if (!(a.lo > 0.0)) throw config_error("e1_coefficient: a must be positive");
    const Interval dv(d);
    const Interval num = Interval(2.0) * a * iv_sinh(Interval(2.0) * a * dv);
    const Interval den = dv * (Interval(4.0) * sqr(a) + sqr(consts::pi() * Interval(double(m)) / dv));
    Interval c = num / den;
    if (m % 2 != 0) c = -c;
    return c;
}

// the weights are even in both coordinates but swap under x1 <-> x2, so D4
// cannot represent E1 and E2 individually
inline ESequences E_sequences(const Interval& a, double d, int order, const SymmetryGroup& g) {
    if (!(a.lo > 0.0)) throw config_error("E_sequences: a must be positive");
    if (!(d > 0.0) || order < 0) throw config_error("E_sequences: bad domain or order");
    if (g.name == GroupName::D4)
        throw symmetry_error("E_sequences: the weights are not D4-symmetric; use D2 or Z2xZ1");
    std::vector<Interval> e(std::size_t(order) + 1, Interval(0.0));
    for (int m = 0; m <= order; ++m) e[std::size_t(m)] = e1_coefficient(a, d, m);
    FullGrid g1(order), g2(order), g12(order);
    for (int m1 = -order; m1 <= order; ++m1) {
        g1.re[g1.idx(m1, 0)] = e[std::size_t(std::abs(m1))];
        g2.re[g2.idx(0, m1)] = e[std::size_t(std::abs(m1))];
        for (int m2 = -order; m2 <= order; ++m2)
            g12.re[g12.idx(m1, m2)] =
                e[std::size_t(std::abs(m1))] * e[std::size_t(std::abs(m2))];
    }
    const auto table = make_table(g, order);
    return {reduce(g1, table, d), reduce(g2, table, d), reduce(g12, table, d)};
}

inline ESequences E_sequences(const Interval& a, double d, int order) {
    return E_sequences(a, d, order, build_group(GroupName::D2));
}

}  // namespace shcert

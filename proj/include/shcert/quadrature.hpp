#pragma once
// Rigorous integrals: rotation-overlap integrals for phi(w, theta), L^2 norms
// of symbol ratios over R^2, and interval evaluation of trig polynomials and
// rotated sums.
//
// Overlap integrals use two paths.  Quarter-turn angles map the Fourier
// lattice to itself, so the integral collapses to an exact coefficient-space
// inner product.  Generic angles triangulate the square-intersection polygon
// and integrate a centered Taylor form of configurable order on each cell
// (the mean-value form is the order-0 case; low orders cannot reach the
// default tolerance at realistic truncations, so the default order is 6).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "shcert/elementary.hpp"
#include "shcert/seqspace.hpp"

namespace shcert {

// ---- points and polygons ----------------------------------------------------

struct Point2 {
    Interval x1, x2;
};

struct ConvexPolygon {
    std::vector<Point2> vertices;  // counterclockwise
};

// shoelace area of a counterclockwise polygon, clamped at 0
inline Interval polygon_area(const ConvexPolygon& p) {
    const std::size_t n = p.vertices.size();
    if (n < 3) throw shape_error("polygon_area: need at least 3 vertices");
    Interval s(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = p.vertices[i];
        const Point2& b = p.vertices[(i + 1) % n];
        s += a.x1 * b.x2 - b.x1 * a.x2;
    }
    Interval area = Interval(0.5) * s;
    if (area.lo < 0.0) area.lo = 0.0;
    if (area.hi < 0.0) area.hi = 0.0;
    return area;
}

// ---- exact rational angles --------------------------------------------------

// theta = 2*pi*num/den.  Carrying the rational lets lattice angles (quarter
// turns) be recognized exactly, which the overlap integral exploits.
struct Angle {
    long num = 0;
    long den = 1;

    static Angle fraction(long k, long j) {
        if (j <= 0) throw config_error("angle denominator must be positive");
        long n = k % j;
        if (n < 0) n += j;
        const long g = std::gcd(n == 0 ? j : n, j);
        return Angle{n / g, j / g};
    }

    Interval value() const {
        return consts::two_pi() * Interval(double(num)) / Interval(double(den));
    }
    bool quarter_lattice() const { return (4 * num) % den == 0; }
    int quarter_turns() const {
        if (!quarter_lattice()) throw inconsistency_error("angle is not a quarter turn");
        return int(((4 * num) / den) % 4);
    }
};

// ---- trig-polynomial evaluation ---------------------------------------------

namespace detail {

// one Fourier term: contributes cre*cos(2 pi q.x) - cim*sin(2 pi q.x)
struct FreqTerm {
    Interval q1, q2;
    Interval cre, cim;
};

// terms of y -> w(R_phi y): frequencies are R_{-phi} applied to n/(2d)
inline std::vector<FreqTerm> freq_terms(const SymSequence& u, const Interval& cphi,
                                        const Interval& sphi) {
    const FullGrid g = unfold(u);
    const Interval two_d = Interval(2.0) * Interval(u.d);
    std::vector<FreqTerm> out;
    for (int m1 = -g.M; m1 <= g.M; ++m1) {
        for (int m2 = -g.M; m2 <= g.M; ++m2) {
            const Interval re = g.re_at(m1, m2);
            const Interval im = g.im_at(m1, m2);
            if (re.lo == 0.0 && re.hi == 0.0 && im.lo == 0.0 && im.hi == 0.0) continue;
            const Interval f1 = Interval(double(m1)) / two_d;
            const Interval f2 = Interval(double(m2)) / two_d;
            FreqTerm t;
            t.q1 = cphi * f1 + sphi * f2;
            t.q2 = -sphi * f1 + cphi * f2;
            t.cre = re;
            t.cim = im;
            out.push_back(t);
        }
    }
    return out;
}

inline Interval eval_terms(const std::vector<FreqTerm>& terms, const Interval& x1,
                           const Interval& x2) {
    Interval s(0.0);
    for (const auto& t : terms) {
        const Interval phase = consts::two_pi() * (t.q1 * x1 + t.q2 * x2);
        s += t.cre * iv_cos(phase) - t.cim * iv_sin(phase);
    }
    return s;
}

}  // namespace detail

// gamma^dagger(U)(x): the series value inside Omega_0 = (-d,d)^2, zero outside,
// and the hull of both when x straddles the boundary
inline Interval eval_trigpoly(const SymSequence& u, const Point2& x) {
    const double d = u.d;
    const bool outside = x.x1.lo >= d || x.x1.hi <= -d || x.x2.lo >= d || x.x2.hi <= -d;
    if (outside) return Interval(0.0);
    const auto terms = detail::freq_terms(u, Interval(1.0), Interval(0.0));
    const Interval series = detail::eval_terms(terms, x.x1, x.x2);
    const bool inside = x.x1.lo > -d && x.x1.hi < d && x.x2.lo > -d && x.x2.hi < d;
    if (inside) return series;
    return hull(series, Interval(0.0));
}

// formal rotation average w0 = (1/j) sum_k R_{2 pi k/j} u0
struct RotatedSum {
    SymSequence base;
    int j = 1;
    bool collapsed = true;  // true when the sum equals base (j in {1,2,4} matching)
};

inline Interval eval_rotated_sum(const RotatedSum& w0, const Point2& x) {
    if (w0.j < 1) throw config_error("rotation count must be >= 1");
    if (w0.collapsed || w0.j == 1) return eval_trigpoly(w0.base, x);
    Interval s(0.0);
    for (int k = 0; k < w0.j; ++k) {
        const Interval th = Angle::fraction(k, w0.j).value();
        const Interval c = iv_cos(th), sn = iv_sin(th);
        const Point2 rx{c * x.x1 - sn * x.x2, sn * x.x1 + c * x.x2};
        s += eval_trigpoly(w0.base, rx);
    }
    return s / Interval(double(w0.j));
}

// ---- square intersection ----------------------------------------------------

// Omega_0 intersect R_theta Omega_0.  Reduced mod pi/2 (the square is
// invariant under quarter turns); for theta in [0, pi/2] the intersection is
// the octagon with vertices on the square edges at tan(theta/2) and
// tan(pi/4 - theta/2) fractions of d.
inline ConvexPolygon square_intersection(const Interval& theta, double d) {
    if (!(d > 0.0)) throw config_error("square_intersection: d must be positive");
    const Interval half_pi = consts::half_pi();
    const double q = std::floor(theta.mid() / half_pi.mid());
    const Interval th = theta - Interval(q) * half_pi;
    if (th.width() > 0.7855)
        throw config_error("square_intersection: angle interval too wide");
    if (th.lo < -0.01 || th.hi > half_pi.hi + 0.01)
        throw config_error("square_intersection: angle reduction failed");

    const auto clamped_tan = [](const Interval& a) {
        Interval t = iv_sin(a) / iv_cos(a);
        if (t.lo < 0.0) t.lo = 0.0;
        if (t.hi > 1.0) t.hi = 1.0;
        if (t.lo > t.hi) t.lo = t.hi;
        return t;
    };
    const Interval half = th * Interval(0.5);
    const Interval t = clamped_tan(half);
    const Interval s = clamped_tan(consts::quarter_pi() - half);

    const Interval dd(d);
    const Interval td = t * dd, sd = s * dd;
    ConvexPolygon p;
    p.vertices = {Point2{dd, td},   Point2{sd, dd},   Point2{-td, dd},  Point2{-dd, sd},
                  Point2{-dd, -td}, Point2{-sd, -dd}, Point2{td, -dd},  Point2{dd, -sd}};
    return p;
}

// ---- overlap integral -------------------------------------------------------

struct QuadOptions {
    double tol = -1.0;  // absolute enclosure-radius target; <0 means 1e-8*|Omega_0|
    int taylor_order = 8;
    std::size_t max_cells = 40000;
    bool allow_exact_lattice = true;
};

struct QuadResult {
    Interval value;
    bool converged = false;
    bool used_exact_lattice = false;
    std::size_t cells = 0;
};

namespace detail {

// out(p) = in(R_k p) with R the counterclockwise quarter turn
inline FullGrid rotate_grid_quarters(const FullGrid& g, int k) {
    FullGrid r(g.M, g.has_im());
    const int kk = ((k % 4) + 4) % 4;
    for (int p1 = -g.M; p1 <= g.M; ++p1)
        for (int p2 = -g.M; p2 <= g.M; ++p2) {
            int s1 = p1, s2 = p2;
            for (int i = 0; i < kk; ++i) {
                const int t1 = -s2, t2 = s1;
                s1 = t1;
                s2 = t2;
            }
            r.re[r.idx(p1, p2)] = g.re_at(s1, s2);
            if (g.has_im()) r.im[r.idx(p1, p2)] = g.im_at(s1, s2);
        }
    return r;
}

inline double exact_factorial_d(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;  // exact for n <= 18
}

inline Interval pow_iv(double x, int k) {
    Interval r(1.0);
    const Interval b(x);
    for (int i = 0; i < k; ++i) r = r * b;
    return r;
}

constexpr int kMaxJetOrder = 10;

// per-term data reused across cells: amplitude and powers of 2 pi q
struct JetTerm {
    Interval q1, q2;
    Interval cre, cim;
    std::vector<Interval> pw1, pw2;  // (2 pi q)^a, a = 0..K+1
    double amp_mag = 0.0;
};

inline std::vector<JetTerm> prepare_jet_terms(const std::vector<FreqTerm>& terms, int K) {
    std::vector<JetTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        JetTerm c;
        c.q1 = t.q1;
        c.q2 = t.q2;
        c.cre = t.cre;
        c.cim = t.cim;
        c.amp_mag = iv_sqrt(sqr(t.cre) + sqr(t.cim)).hi;
        c.pw1.assign(std::size_t(K) + 2, Interval(1.0));
        c.pw2.assign(std::size_t(K) + 2, Interval(1.0));
        const Interval w1 = consts::two_pi() * t.q1;
        const Interval w2 = consts::two_pi() * t.q2;
        for (int a = 1; a <= K + 1; ++a) {
            c.pw1[std::size_t(a)] = c.pw1[std::size_t(a) - 1] * w1;
            c.pw2[std::size_t(a)] = c.pw2[std::size_t(a) - 1] * w2;
        }
        out.push_back(std::move(c));
    }
    return out;
}

// sup bounds of |D^(a,b) factor| via amplitude sums
inline std::vector<double> derivative_sups(const std::vector<JetTerm>& ts, int K) {
    const int stride = K + 2;
    std::vector<double> s(std::size_t(stride) * stride, 0.0);
    for (int a = 0; a <= K + 1; ++a)
        for (int b = 0; b <= K + 1; ++b) {
            Interval acc(0.0);
            for (const auto& t : ts)
                acc += Interval(t.amp_mag) * Interval(t.pw1[std::size_t(a)].mag()) *
                       Interval(t.pw2[std::size_t(b)].mag());
            s[std::size_t(a) * stride + b] = acc.hi;
        }
    return s;
}

// all precomputed data for integrating g(y) = w(y) * w(R_{-theta} y)
struct OverlapIntegrand {
    int K = 6;
    int stride = 8;
    std::vector<JetTerm> tw, th;
    std::vector<double> rem_bound;    // |D^alpha g| bound, |alpha| = K+1
    std::vector<Interval> inv_fact;   // 1/(a! b!)
    std::vector<Interval> moment_mn;  // p! q! / (p+q+2)!
    double sup_g = 0.0;

    void build(const SymSequence& w, const Interval& theta, int order) {
        if (order < 0 || order > kMaxJetOrder)
            throw config_error("taylor_order out of range");
        K = order;
        stride = K + 2;
        tw = prepare_jet_terms(freq_terms(w, Interval(1.0), Interval(0.0)), K);
        th = prepare_jet_terms(freq_terms(w, iv_cos(theta), -iv_sin(theta)), K);
        const auto sw = derivative_sups(tw, K);
        const auto sh = derivative_sups(th, K);
        sup_g = sw[0] * sh[0];

        inv_fact.assign(std::size_t(stride) * stride, Interval(0.0));
        moment_mn.assign(std::size_t(stride) * stride, Interval(0.0));
        for (int a = 0; a <= K + 1; ++a)
            for (int b = 0; a + b <= K + 1; ++b) {
                inv_fact[std::size_t(a) * stride + b] =
                    Interval(1.0) / (factorial(a) * factorial(b));
                moment_mn[std::size_t(a) * stride + b] =
                    factorial(a) * factorial(b) / factorial(a + b + 2);
            }

        rem_bound.assign(std::size_t(stride) * stride, 0.0);
        for (int a = 0; a <= K + 1; ++a) {
            const int b = K + 1 - a;
            Interval acc(0.0);
            for (int i = 0; i <= a; ++i)
                for (int j = 0; j <= b; ++j) {
                    const double c1 = exact_factorial_d(a) /
                                      (exact_factorial_d(i) * exact_factorial_d(a - i));
                    const double c2 = exact_factorial_d(b) /
                                      (exact_factorial_d(j) * exact_factorial_d(b - j));
                    acc += Interval(c1 * c2) * Interval(sw[std::size_t(i) * stride + j]) *
                           Interval(sh[std::size_t(a - i) * stride + (b - j)]);
                }
            rem_bound[std::size_t(a) * stride + b] = acc.hi;
        }
    }
};

struct JetScratch {
    std::vector<Interval> jw, jh, jg;
    void resize(int stride) {
        jw.assign(std::size_t(stride) * stride, Interval(0.0));
        jh.assign(std::size_t(stride) * stride, Interval(0.0));
        jg.assign(std::size_t(stride) * stride, Interval(0.0));
    }
};

// derivative values D^(a,b) of one factor at the point (c1, c2)
inline void jet_of_factor(const std::vector<JetTerm>& ts, int K, int stride, double c1,
                          double c2, std::vector<Interval>& jet) {
    std::fill(jet.begin(), jet.end(), Interval(0.0));
    const Interval x1(c1), x2(c2);
    for (const auto& t : ts) {
        const Interval phase = consts::two_pi() * (t.q1 * x1 + t.q2 * x2);
        const Interval co = iv_cos(phase), si = iv_sin(phase);
        const Interval cyc_c[4] = {co, -si, -co, si};
        const Interval cyc_s[4] = {si, co, -si, -co};
        for (int a = 0; a <= K; ++a)
            for (int b = 0; b <= K - a; ++b) {
                const int k = (a + b) % 4;
                jet[std::size_t(a) * stride + b] +=
                    t.pw1[std::size_t(a)] * t.pw2[std::size_t(b)] *
                    (t.cre * cyc_c[k] - t.cim * cyc_s[k]);
            }
    }
}

struct QuadCell {
    double ax, ay, bx, by, cx, cy;
    Interval val;
    double width = 0.0;
};

// centered Taylor enclosure of int_T g over the triangle cell
inline void integrate_cell(const OverlapIntegrand& f, JetScratch& ws, QuadCell& cell) {
    const int K = f.K;
    const int stride = f.stride;

    const double xlo = std::min({cell.ax, cell.bx, cell.cx});
    const double xhi = std::max({cell.ax, cell.bx, cell.cx});
    const double ylo = std::min({cell.ay, cell.by, cell.cy});
    const double yhi = std::max({cell.ay, cell.by, cell.cy});
    const double c1 = 0.5 * (xlo + xhi), c2 = 0.5 * (ylo + yhi);
    const double h1 = std::max((Interval(xhi) - Interval(c1)).hi,
                               (Interval(c1) - Interval(xlo)).hi);
    const double h2 = std::max((Interval(yhi) - Interval(c2)).hi,
                               (Interval(c2) - Interval(ylo)).hi);

    jet_of_factor(f.tw, K, stride, c1, c2, ws.jw);
    jet_of_factor(f.th, K, stride, c1, c2, ws.jh);

    // to Taylor coefficients, then truncated product
    for (int a = 0; a <= K; ++a)
        for (int b = 0; b <= K - a; ++b) {
            const std::size_t i = std::size_t(a) * stride + b;
            ws.jw[i] = ws.jw[i] * f.inv_fact[i];
            ws.jh[i] = ws.jh[i] * f.inv_fact[i];
        }
    std::fill(ws.jg.begin(), ws.jg.end(), Interval(0.0));
    for (int a1 = 0; a1 <= K; ++a1)
        for (int b1 = 0; b1 <= K - a1; ++b1) {
            const Interval& wa = ws.jw[std::size_t(a1) * stride + b1];
            if (wa.lo == 0.0 && wa.hi == 0.0) continue;
            for (int a2 = 0; a1 + a2 <= K; ++a2)
                for (int b2 = 0; a1 + a2 + b1 + b2 <= K; ++b2)
                    ws.jg[std::size_t(a1 + a2) * stride + (b1 + b2)] +=
                        wa * ws.jh[std::size_t(a2) * stride + b2];
        }

    // triangle moments int_T (y-c)^alpha dy by trinomial expansion over the
    // reference simplex
    const Interval u1 = Interval(cell.ax) - Interval(c1);
    const Interval u2 = Interval(cell.ay) - Interval(c2);
    const Interval e11 = Interval(cell.bx) - Interval(cell.ax);
    const Interval e12 = Interval(cell.by) - Interval(cell.ay);
    const Interval e21 = Interval(cell.cx) - Interval(cell.ax);
    const Interval e22 = Interval(cell.cy) - Interval(cell.ay);
    const Interval jac = iv_abs(e11 * e22 - e12 * e21);

    std::vector<Interval> pu1(std::size_t(K) + 1, Interval(1.0)), pa1 = pu1, pb1 = pu1,
                          pu2 = pu1, pa2 = pu1, pb2 = pu1;
    for (int i = 1; i <= K; ++i) {
        pu1[std::size_t(i)] = pu1[std::size_t(i) - 1] * u1;
        pa1[std::size_t(i)] = pa1[std::size_t(i) - 1] * e11;
        pb1[std::size_t(i)] = pb1[std::size_t(i) - 1] * e21;
        pu2[std::size_t(i)] = pu2[std::size_t(i) - 1] * u2;
        pa2[std::size_t(i)] = pa2[std::size_t(i) - 1] * e12;
        pb2[std::size_t(i)] = pb2[std::size_t(i) - 1] * e22;
    }

    Interval total(0.0);
    for (int al = 0; al <= K; ++al)
        for (int be = 0; be <= K - al; ++be) {
            const Interval& g = ws.jg[std::size_t(al) * stride + be];
            if (g.lo == 0.0 && g.hi == 0.0) continue;
            Interval mom(0.0);
            for (int i = 0; i <= al; ++i)
                for (int j = 0; i + j <= al; ++j) {
                    const int k = al - i - j;
                    const double t1 = exact_factorial_d(al) /
                                      (exact_factorial_d(i) * exact_factorial_d(j) *
                                       exact_factorial_d(k));
                    for (int l = 0; l <= be; ++l)
                        for (int m = 0; l + m <= be; ++m) {
                            const int n = be - l - m;
                            const double t2 =
                                exact_factorial_d(be) /
                                (exact_factorial_d(l) * exact_factorial_d(m) *
                                 exact_factorial_d(n));
                            mom += Interval(t1 * t2) * pu1[std::size_t(i)] *
                                   pa1[std::size_t(j)] * pb1[std::size_t(k)] *
                                   pu2[std::size_t(l)] * pa2[std::size_t(m)] *
                                   pb2[std::size_t(n)] *
                                   f.moment_mn[std::size_t(j + m) * stride + (k + n)];
                        }
                }
            total += g * jac * mom;
        }

    // Lagrange remainder of total order K+1 over the cell bounding box
    Interval rem_mag(0.0);
    for (int a = 0; a <= K + 1; ++a) {
        const int b = K + 1 - a;
        rem_mag += Interval(f.rem_bound[std::size_t(a) * stride + b]) *
                   f.inv_fact[std::size_t(a) * stride + b] * pow_iv(h1, a) * pow_iv(h2, b);
    }
    const Interval area = jac * Interval(0.5);
    total += Interval(-rem_mag.hi, rem_mag.hi) * area;

    cell.val = total;
    cell.width = total.width();
}

}  // namespace detail

inline QuadResult overlap_integral(const SymSequence& w, const Angle& angle,
                                   QuadOptions opts = {}) {
    const Interval omega0 = sqr(Interval(2.0 * w.d));
    const double tol = opts.tol > 0.0 ? opts.tol : 1e-8 * omega0.hi;

    QuadResult res;
    if (angle.quarter_lattice() && opts.allow_exact_lattice) {
        const FullGrid g = unfold(w);
        const FullGrid gr = detail::rotate_grid_quarters(g, (4 - angle.quarter_turns()) % 4);
        res.value = omega0 * inner2_grid(g, gr);
        res.converged = true;
        res.used_exact_lattice = true;
        return res;
    }

    const Interval theta = angle.value();
    detail::OverlapIntegrand f;
    f.build(w, theta, opts.taylor_order);

    const ConvexPolygon poly = square_intersection(theta, w.d);
    double eps = 0.0, perim = 0.0;
    std::vector<std::array<double, 2>> mv;
    for (const auto& v : poly.vertices) {
        mv.push_back({v.x1.mid(), v.x2.mid()});
        eps = std::max({eps, v.x1.rad(), v.x2.rad()});
    }
    for (std::size_t i = 0; i < mv.size(); ++i) {
        const auto& a = mv[i];
        const auto& b = mv[(i + 1) % mv.size()];
        perim += std::hypot(a[0] - b[0], a[1] - b[1]);
    }
    // the true boundary lies within sqrt(2)*eps of the midpoint polygon's
    double cx = 0.0, cy = 0.0;
    for (const auto& v : mv) {
        cx += v[0];
        cy += v[1];
    }
    cx /= double(mv.size());
    cy /= double(mv.size());

    detail::JetScratch ws;
    ws.resize(f.stride);

    std::vector<detail::QuadCell> cells;
    for (std::size_t i = 0; i < mv.size(); ++i) {
        detail::QuadCell c;
        c.ax = cx;
        c.ay = cy;
        c.bx = mv[i][0];
        c.by = mv[i][1];
        c.cx = mv[(i + 1) % mv.size()][0];
        c.cy = mv[(i + 1) % mv.size()][1];
        detail::integrate_cell(f, ws, c);
        cells.push_back(c);
    }

    const Interval boundary_corr = [&] {
        const Interval e(eps);
        const Interval band = (Interval(perim) * Interval(1.0000001) + Interval(16.0) * e) *
                              Interval(2.0) * Interval(std::sqrt(2.0) * 1.0000001) * e;
        const double m = (Interval(f.sup_g) * band).hi;
        return Interval(-m, m);
    }();

    const auto exact_width_sum = [&] {
        double s = boundary_corr.width();
        for (const auto& c : cells) s += c.width;
        return s;
    };
    double width_sum = exact_width_sum();
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t i = 0; i < cells.size(); ++i) heap.push({cells[i].width, i});

    std::size_t resync = 0;
    while (cells.size() < opts.max_cells && !heap.empty()) {
        // the incremental sum absorbs rounding error when early cells are
        // enormous, so confirm any apparent convergence with an exact pass
        if (width_sum <= 2.0 * tol || ++resync == 4096) {
            width_sum = exact_width_sum();
            resync = 0;
            if (width_sum <= 2.0 * tol) break;
        }
        const auto [w_top, worst] = heap.top();
        heap.pop();
        if (cells[worst].width != w_top) continue;  // stale entry
        detail::QuadCell c = cells[worst];
        // split the longest edge PQ at the rounded midpoint M; the children
        // (P,M,R) and (M,Q,R) tile the parent up to the sliver triangle PMQ
        // (M need not lie exactly on PQ), which is accounted for below
        const double l_ab = std::hypot(c.bx - c.ax, c.by - c.ay);
        const double l_bc = std::hypot(c.cx - c.bx, c.cy - c.by);
        const double l_ca = std::hypot(c.ax - c.cx, c.ay - c.cy);
        detail::QuadCell c1 = c, c2 = c;
        double px, py, qx, qy, mx, my;
        if (l_ab >= l_bc && l_ab >= l_ca) {
            px = c.ax;
            py = c.ay;
            qx = c.bx;
            qy = c.by;
            mx = 0.5 * (px + qx);
            my = 0.5 * (py + qy);
            c1.bx = mx;
            c1.by = my;
            c2.ax = mx;
            c2.ay = my;
        } else if (l_bc >= l_ca) {
            px = c.bx;
            py = c.by;
            qx = c.cx;
            qy = c.cy;
            mx = 0.5 * (px + qx);
            my = 0.5 * (py + qy);
            c1.cx = mx;
            c1.cy = my;
            c2.bx = mx;
            c2.by = my;
        } else {
            px = c.cx;
            py = c.cy;
            qx = c.ax;
            qy = c.ay;
            mx = 0.5 * (px + qx);
            my = 0.5 * (py + qy);
            c1.ax = mx;
            c1.ay = my;
            c2.cx = mx;
            c2.cy = my;
        }
        detail::integrate_cell(f, ws, c1);
        detail::integrate_cell(f, ws, c2);
        {
            const Interval P1(px), P2(py), Q1(qx), Q2(qy), M1(mx), M2(my);
            const Interval two_signed =
                P1 * M2 - M1 * P2 + (M1 * Q2 - Q1 * M2) + (Q1 * P2 - P1 * Q2);
            const double e =
                (Interval(f.sup_g) * Interval(0.5) * iv_abs(two_signed)).hi;
            c1.val += Interval(-e, e);
            c1.width = c1.val.width();
        }
        width_sum += c1.width + c2.width - c.width;
        cells[worst] = c1;
        cells.push_back(c2);
        heap.push({c1.width, worst});
        heap.push({c2.width, cells.size() - 1});
    }

    Interval total(0.0);
    for (const auto& c : cells) total += c.val;
    total += boundary_corr;

    res.value = total;
    res.converged = total.rad() <= tol * 1.0000001;
    res.cells = cells.size();
    return res;
}

// convenience form matching the operation signature
inline Interval overlap_integral(const SymSequence& w, const Angle& angle, double tol) {
    QuadOptions o;
    o.tol = tol;
    return overlap_integral(w, angle, o).value;
}

// ---- phi(w, theta) ----------------------------------------------------------

struct PhiResult {
    Interval value;
    bool quad_converged = true;
    bool used_exact_lattice = false;
};

// encloses phi(w^{N1}, theta) + 2 sqrt|Omega_0| ||W^{N1} - W||_2 with
// phi = sqrt(2|Omega_0| ||W^{N1}||_2^2 - 2 * overlap); the radicand is
// clamped at 0 (phi^2 >= 0 analytically, quadrature slack can dip below)
inline PhiResult phi_rotation_ex(const SymSequence& w, const Angle& angle, int n1,
                                 QuadOptions opts = {}) {
    if (n1 > w.N()) throw config_error("phi_rotation: N1 exceeds the truncation");
    const SymSequence wn = project(w, n1, ProjectSide::inside);
    const SymSequence tail = project(w, n1, ProjectSide::outside);
    const Interval omega0 = sqr(Interval(2.0 * w.d));

    PhiResult r;
    Interval rad2;
    if (angle.quarter_lattice() && opts.allow_exact_lattice) {
        // ||W||^2 - <W, W o R> as one sum: when the rotation permutes the grid
        // onto equal entries the terms cancel exactly, so invariant sequences
        // get phi = 0 instead of a rounding-limited residual
        const FullGrid g = unfold(wn);
        const FullGrid gr = detail::rotate_grid_quarters(g, (4 - angle.quarter_turns()) % 4);
        Interval diff(0.0);
        for (std::size_t i = 0; i < g.re.size(); ++i)
            diff += g.re[i] * (g.re[i] - gr.re[i]);
        if (g.has_im())
            for (std::size_t i = 0; i < g.im.size(); ++i)
                diff += g.im[i] * (g.im[i] - gr.im[i]);
        rad2 = Interval(2.0) * omega0 * diff;
        r.quad_converged = true;
        r.used_exact_lattice = true;
    } else {
        const QuadResult ov = overlap_integral(wn, angle, opts);
        rad2 = Interval(2.0) * omega0 * sqr(norm_2(wn)) - Interval(2.0) * ov.value;
        r.quad_converged = ov.converged;
        r.used_exact_lattice = ov.used_exact_lattice;
    }
    if (rad2.hi < 0.0) rad2.hi = 0.0;
    if (rad2.lo < 0.0) rad2.lo = 0.0;

    r.value = iv_sqrt(rad2) + Interval(2.0) * iv_sqrt(omega0) * norm_2(tail);
    return r;
}

inline Interval phi_rotation(const SymSequence& w, const Angle& angle, int n1,
                             double tol) {
    QuadOptions o;
    o.tol = tol;
    return phi_rotation_ex(w, angle, n1, o).value;
}

// ---- symbol-ratio L2 norms --------------------------------------------------

enum class SymbolKind { zero, one, l, l0, l1, lpartial };

namespace detail {

// fixed-length 1D jet (Taylor coefficients at a center, possibly interval)
struct Jet1 {
    std::vector<Interval> c;
    explicit Jet1(std::size_t n) : c(n, Interval(0.0)) {}
};

inline Jet1 jet1_mul(const Jet1& a, const Jet1& b) {
    Jet1 r(a.c.size());
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].lo == 0.0 && a.c[i].hi == 0.0) continue;
        for (std::size_t j = 0; i + j < a.c.size(); ++j)
            r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}

inline Jet1 jet1_recip(const Jet1& a) {
    Jet1 r(a.c.size());
    r.c[0] = Interval(1.0) / a.c[0];
    for (std::size_t k = 1; k < a.c.size(); ++k) {
        Interval s(0.0);
        for (std::size_t i = 1; i <= k; ++i) s += a.c[i] * r.c[k - i];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

// jet of the squared denominator symbol at center x (den(r) as radial profile)
inline Jet1 radial_den_sq_jet(SymbolKind den, const Interval& x, const Interval& mu,
                              std::size_t n) {
    Jet1 r(n);
    r.c[0] = x;
    if (n > 1) r.c[1] = Interval(1.0);
    const Jet1 r2 = jet1_mul(r, r);
    const Interval fourpi2 = Interval(4.0) * sqr(consts::pi());
    Jet1 d(n);
    switch (den) {
        case SymbolKind::l: {
            Jet1 q(n);
            for (std::size_t i = 0; i < n; ++i) q.c[i] = -fourpi2 * r2.c[i];
            q.c[0] += Interval(1.0);
            d = jet1_mul(q, q);
            d.c[0] = sqr(q.c[0]) + mu;  // sqr keeps c0 >= mu when q straddles 0
            break;
        }
        case SymbolKind::l1: {
            Jet1 q(n);
            for (std::size_t i = 0; i < n; ++i) q.c[i] = -fourpi2 * r2.c[i];
            q.c[0] += Interval(1.0);
            d = jet1_mul(q, q);
            d.c[0] = sqr(q.c[0]) + Interval(1.0);
            break;
        }
        case SymbolKind::l0: {
            for (std::size_t i = 0; i < n; ++i) d.c[i] = fourpi2 * r2.c[i];
            d.c[0] += Interval(1.0);  // |l0| = 4 pi^2 r^2 + 1
            break;
        }
        default:
            throw unsupported_error("symbol_ratio_l2: unsupported denominator");
    }
    Jet1 d2 = jet1_mul(d, d);
    d2.c[0] = sqr(d.c[0]);
    return d2;
}

// jet of f(r) = r^p / den(r)^2 at center x
inline Jet1 radial_integrand_jet(SymbolKind den, int p, const Interval& x,
                                 const Interval& mu, std::size_t n) {
    const Jet1 dsq = radial_den_sq_jet(den, x, mu, n);
    Jet1 f = jet1_recip(dsq);
    Jet1 r(n);
    r.c[0] = x;
    if (n > 1) r.c[1] = Interval(1.0);
    for (int i = 0; i < p; ++i) f = jet1_mul(f, r);
    return f;
}

}  // namespace detail

// encloses (int_{R^2} |num/den|^2 dxi)^{1/2}.  Angular reduction: num = one
// gives 2 pi int r/den^2 dr; num = lpartial gives 4 pi^3 int r^3/den^2 dr.
// Beyond tail_R the quartic denominators are minorized by
// 16 pi^4 r^4 (1 - 1/(4 pi^2 R^2))^2, giving closed-form tail bounds.
inline Interval symbol_ratio_l2(SymbolKind num, SymbolKind den, const Interval& mu,
                                double tail_R, double tol = 1e-12) {
    if (num == SymbolKind::zero) return Interval(0.0);
    int p = 0;
    Interval angular(0.0);
    if (num == SymbolKind::one) {
        p = 1;
        angular = consts::two_pi();
    } else if (num == SymbolKind::lpartial) {
        p = 3;
        angular = Interval(4.0) * consts::pi() * sqr(consts::pi());
    } else {
        throw unsupported_error("symbol_ratio_l2: unsupported numerator");
    }
    if (den != SymbolKind::l && den != SymbolKind::l0 && den != SymbolKind::l1)
        throw unsupported_error("symbol_ratio_l2: unsupported denominator");
    if (den == SymbolKind::l && !(mu.lo > 0.0))
        throw unsupported_error("symbol_ratio_l2: l requires mu > 0");

    const Interval pi2 = sqr(consts::pi());
    const Interval R(tail_R);
    if (!(tail_R > 0.0)) throw unsupported_error("symbol_ratio_l2: tail_R must be positive");
    const Interval fourpi2R2 = Interval(4.0) * pi2 * sqr(R);

    Interval tail;
    if (den == SymbolKind::l0) {
        // exact: int_R^inf r / (4 pi^2 r^2 + 1)^2 dr = 1 / (8 pi^2 (4 pi^2 R^2 + 1))
        if (p != 1)
            throw unsupported_error("symbol_ratio_l2: lpartial/l0 is not integrable");
        tail = angular / (Interval(8.0) * pi2 * (fourpi2R2 + Interval(1.0)));
    } else {
        // den >= (4 pi^2 r^2 - 1)^2 >= 16 pi^4 r^4 (1 - 1/(4 pi^2 R^2))^2 for r >= R
        if (!(fourpi2R2.lo > 1.0))
            throw unsupported_error("symbol_ratio_l2: tail_R too small for the majorant");
        const Interval eta = sqr(Interval(1.0) - Interval(1.0) / fourpi2R2);
        const Interval denom_lead = Interval(256.0) * sqr(sqr(pi2)) * sqr(eta);
        if (p == 1)
            tail = angular / (denom_lead * Interval(6.0) * ipow(R, 6));
        else
            tail = angular / (denom_lead * Interval(4.0) * ipow(R, 4));
        tail = Interval(0.0, tail.hi);
    }

    constexpr std::size_t kOrder = 12;  // even: (x-c)^K integrates to >= 0
    struct Cell {
        double a, b;
        Interval val;
        double width;
    };
    const auto integrate = [&](double a, double b) {
        // centered jet at cm (cm need not be the exact midpoint: moments are
        // computed from the actual endpoints); the top coefficient is the jet
        // at the interval cell and kOrder is even, so (x-cm)^kOrder >= 0
        const double cm = 0.5 * (a + b);
        const Interval lo_off = Interval(a) - Interval(cm);
        const Interval hi_off = Interval(b) - Interval(cm);
        const detail::Jet1 jp =
            detail::radial_integrand_jet(den, p, Interval(cm), mu, kOrder + 1);
        const detail::Jet1 jb =
            detail::radial_integrand_jet(den, p, Interval(a, b), mu, kOrder + 1);
        Interval s(0.0);
        for (std::size_t k = 0; k <= kOrder; ++k) {
            // int_a^b (x-cm)^k dx
            const Interval m = (ipow(hi_off, int(k) + 1) - ipow(lo_off, int(k) + 1)) /
                               Interval(double(k + 1));
            s += (k == kOrder ? jb.c[k] : jp.c[k]) * m;
        }
        return s;
    };

    std::vector<Cell> cells;
    const int initial = 8;
    for (int i = 0; i < initial; ++i) {
        Cell c;
        c.a = tail_R * double(i) / initial;
        c.b = tail_R * double(i + 1) / initial;
        c.val = integrate(c.a, c.b);
        c.width = c.val.width();
        cells.push_back(c);
    }
    const auto exact_width_sum = [&] {
        double s = 0.0;
        for (const auto& c : cells) s += c.width;
        return s;
    };
    double width_sum = exact_width_sum();
    std::priority_queue<std::pair<double, std::size_t>> heap;
    for (std::size_t i = 0; i < cells.size(); ++i) heap.push({cells[i].width, i});

    const std::size_t max_cells = 200000;
    std::size_t resync = 0;
    while (cells.size() < max_cells && !heap.empty()) {
        if (width_sum <= 2.0 * tol || ++resync == 4096) {
            width_sum = exact_width_sum();  // incremental sums absorb error
            resync = 0;
            if (width_sum <= 2.0 * tol) break;
        }
        const auto [w_top, worst] = heap.top();
        heap.pop();
        if (cells[worst].width != w_top) continue;  // stale entry
        Cell c = cells[worst];
        const double m = 0.5 * (c.a + c.b);
        Cell c1{c.a, m, Interval(0.0), 0.0}, c2{m, c.b, Interval(0.0), 0.0};
        c1.val = integrate(c1.a, c1.b);
        c1.width = c1.val.width();
        c2.val = integrate(c2.a, c2.b);
        c2.width = c2.val.width();
        width_sum += c1.width + c2.width - c.width;
        cells[worst] = c1;
        cells.push_back(c2);
        heap.push({c1.width, worst});
        heap.push({c2.width, cells.size() - 1});
    }

    Interval radial(0.0);
    for (const auto& c : cells) radial += c.val;
    Interval total = angular * radial + tail;
    if (total.lo < 0.0) total.lo = 0.0;
    return iv_sqrt(total);
}

}  // namespace shcert

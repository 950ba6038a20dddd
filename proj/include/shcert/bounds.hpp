#pragma once
// Certified constants for the radii-polynomial contraction argument.
//
// Given a candidate U0 and an approximate inverse section (plain or bordered),
// the routines here enclose the defect bound Y0, the contraction bound Z1, the
// quadratic bound Z2(r) = slope * r + intercept, and the symmetrisation
// corrections Ys / Zs used on the averaged and unfolded paths.  Conventions
// shared by everything below:
//
//  * finite sections act on sqrt(K_n)-orthonormal coordinates of the reduced
//    index set, matching conv_operator_matrix and the builders in approx.hpp;
//  * on the unfolded path the extra scalar coordinate comes first, sections
//    are (1+n) x (1+n), and the border column and row both hold
//    g_n = 2 d sqrt(K_n) (dx2 U0^N)_n / rho;
//  * suprema of 1/|l| over the complement of the index set are evaluated on
//    its inner ring, where the quartic symbol is smallest;
//  * the section of the tail product V0^N pi_N V0^N is obtained from the
//    self-convolution, conv(V0^N * V0^N) - conv(V0^N)^2, so no enlarged
//    index set is ever materialised;
//  * radicands that are nonnegative by theory but may dip below zero through
//    interval slack are clamped at zero; a strictly negative enclosure raises
//    inconsistency_error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "shcert/approx.hpp"

namespace shcert {

enum class BoundVariant { plain, symmetrized, bordered };

inline const char* variant_name(BoundVariant v) {
    switch (v) {
        case BoundVariant::plain: return "plain";
        case BoundVariant::symmetrized: return "symmetrized";
        case BoundVariant::bordered: return "bordered";
    }
    return "unknown";
}

// Z2(r) = slope * r + intercept, both certified upper enclosures
struct Z2Coeffs {
    Interval slope{0.0};
    Interval intercept{0.0};

    Interval at(const Interval& r) const { return slope * r + intercept; }
};

struct BoundSet {
    Interval Y0{0.0};
    Interval Ys{0.0};
    Interval Z1{0.0};
    Interval Zs{0.0};
    Z2Coeffs Z2;
    BoundVariant variant = BoundVariant::plain;
    std::string digest;  // human-readable echo of the producing inputs

    Interval z2_at(const Interval& r) const { return Z2.at(r); }

    bool finite() const {
        return std::isfinite(Y0.hi) && std::isfinite(Ys.hi) && std::isfinite(Z1.hi) &&
               std::isfinite(Zs.hi) && std::isfinite(Z2.slope.hi) &&
               std::isfinite(Z2.intercept.hi);
    }
};

// ---- block-norm combination --------------------------------------------------
// Spectral norm of the 2x2 matrix [[z11, z12], [z13, z14]] of nonnegative
// entries: the largest singular value in closed form.  The discriminant is
// written as a sum of squares so it cannot go negative through cancellation;
// negative lower endpoints of the inputs (arithmetic slack on quantities that
// are norms) are clamped at zero, which keeps the enclosure valid because the
// norm is monotone in each entry.
inline Interval combine_phi(const Interval& z11, const Interval& z12, const Interval& z13,
                            const Interval& z14) {
    const auto clip = [](Interval x) {
        if (x.hi < 0.0) x.hi = 0.0;
        if (x.lo < 0.0) x.lo = 0.0;
        return x;
    };
    const Interval a = clip(z11), b = clip(z12), c = clip(z13), e = clip(z14);
    const Interval trace = sqr(a) + sqr(b) + sqr(c) + sqr(e);
    const Interval disc =
        sqr(sqr(a) + sqr(b) - sqr(c) - sqr(e)) + Interval(4.0) * sqr(a * c + b * e);
    return iv_sqrt((trace + iv_sqrt(disc)) * Interval(0.5));
}

// ---- rotation-average partial sums --------------------------------------------
// R_{k,j} = |sum_{p=0}^{k-1} e^{2 pi i p / j}|, split into its cosine and sine
// partial sums.  The index is periodic, so k is reduced mod j first.
inline Interval R_kj(long k, long j) {
    if (j < 2) throw config_error("R_kj: j must be at least 2");
    const long kr = ((k % j) + j) % j;
    Interval c(0.0), s(0.0);
    for (long p = 0; p < kr; ++p)
        c += iv_cos(consts::two_pi() * Interval(double(p)) / Interval(double(j)));
    for (long p = 1; p < kr; ++p)
        s += iv_sin(consts::two_pi() * Interval(double(p)) / Interval(double(j)));
    return iv_sqrt(sqr(c) + sqr(s));
}

namespace detail {

inline Interval iv_max(const Interval& x, const Interval& y) {
    return Interval(std::max(x.lo, y.lo), std::max(x.hi, y.hi));
}

inline Interval iv_max1(const Interval& x) { return iv_max(Interval(1.0), x); }

// clamp an analytically nonnegative radicand; a strictly negative enclosure
// means the inputs contradict the theory
inline Interval nonneg_radicand(Interval x, const char* where) {
    if (x.hi < 0.0) throw inconsistency_error(std::string(where) + ": negative radicand");
    if (x.lo < 0.0) x.lo = 0.0;
    return x;
}

// sup over the complement of the index set of 1/|l(n / (2d))|.  Complement
// points satisfy max(|n1|, |n2|) >= N + 1, hence |n / (2d)| >= rho0 with
// rho0 = (N + 1) / (2d).  Once the ring lies at or beyond the unit circle of
// the symbol (4 pi^2 rho0^2 >= 1) the symbol grows radially and the supremum
// sits on the ring; otherwise 1/mu is the global bound.  The point
// (N + 1, 0) realises the ring radius, which gives the lower endpoint.
inline Interval tail_linv_max(int N, double d, const Interval& mu) {
    const Interval rho0 = Interval(double(N + 1)) / (Interval(2.0) * Interval(d));
    const Interval q = Interval(1.0) - Interval(4.0) * sqr(consts::pi()) * sqr(rho0);
    const Interval ring = Interval(1.0) / (sqr(q) + mu);
    if (q.hi <= 0.0) return ring;
    return Interval(ring.lo, (Interval(1.0) / mu).hi);
}

// entries of a sequence re-tabulated on another index set of the same group;
// orbits outside the source box are zero
inline SymSequence restrict_to_table(const SymSequence& u,
                                     std::shared_ptr<const OrbitTable> table) {
    if (table->group.name != u.group().name || table->group.j != u.group().j)
        throw symmetry_error("restrict_to_table: group mismatch");
    SymSequence v(std::move(table), u.d);
    for (std::size_t s = 0; s < v.table->size(); ++s) {
        const auto& n = v.table->reps[s];
        if (u.table->in_box(n)) v.entries[s] = u.at(n);
    }
    return v;
}

// per-slot interval values of the symbol l at n / (2d)
inline std::vector<Interval> symbol_l_values(const OrbitTable& t, double d, const SHParams& p) {
    const Interval twod = Interval(2.0) * Interval(d);
    std::vector<Interval> l(t.size());
    for (std::size_t s = 0; s < t.size(); ++s)
        l[s] = symbol(SymbolKind::l, Interval(double(t.reps[s][0])) / twod,
                      Interval(double(t.reps[s][1])) / twod, p);
    return l;
}

// finite section of I + V0^N L^{-1} in sqrt(K)-orthonormal coordinates:
// the convolution section with each column divided by l at its column index
inline IntervalMatrix mn_section(const IntervalMatrix& Cii, const std::vector<Interval>& l) {
    IntervalMatrix m(Cii.rows, Cii.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            m.at(i, j) = Cii.at(i, j) / l[j] + Interval(i == j ? 1.0 : 0.0);
    return m;
}

// finite section of V0^N pi_N V0^N: multiplication by the self-convolution
// minus the squared inside section
inline IntervalMatrix tail_quadratic_section(const SymSequence& V0N, const IntervalMatrix& Cii,
                                             int N) {
    const SymSequence Vr = restrict_to_table(V0N, make_table(V0N.group(), 2 * N));
    const SymSequence VV = convolve(Vr, Vr, 2 * N);
    return conv_operator_matrix(VV, N) - Cii * Cii;
}

// rows and columns scaled by the same diagonal (used for L^{-1} T L^{-1})
inline IntervalMatrix scale_sym(const IntervalMatrix& m, const std::vector<Interval>& linv) {
    IntervalMatrix r(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) r.at(i, j) = linv[i] * m.at(i, j) * linv[j];
    return r;
}

// 1D convolution of a real grid with a symmetric kernel c[|k|] along one axis;
// the kernel must reach across the whole box (length >= 2M + 1)
inline FullGrid axis_conv(const FullGrid& g, const std::vector<Interval>& c, int axis) {
    if (g.has_im()) throw inconsistency_error("axis_conv: expected a real grid");
    if (int(c.size()) < 2 * g.M + 1) throw inconsistency_error("axis_conv: kernel too short");
    FullGrid out(g.M, false);
    for (int m1 = -g.M; m1 <= g.M; ++m1) {
        for (int m2 = -g.M; m2 <= g.M; ++m2) {
            Interval s(0.0);
            for (int k = -g.M; k <= g.M; ++k) {
                const int off = (axis == 0) ? m1 - k : m2 - k;
                const Interval& v =
                    (axis == 0) ? g.re[g.idx(k, m2)] : g.re[g.idx(m1, k)];
                s += c[std::size_t(std::abs(off))] * v;
            }
            out.re[out.idx(m1, m2)] = s;
        }
    }
    return out;
}

// cosine rows of the unfolding: the part of the function even in x2
inline FullGrid even_grid(const FullGrid& g) {
    FullGrid h(g.M, false);
    h.re = g.re;
    return h;
}

// sine rows as a plain real array: quadratic pairings of the odd part reduce
// to real sums over these coefficients
inline FullGrid odd_grid(const FullGrid& g) {
    FullGrid h(g.M, false);
    if (g.has_im()) h.re = g.im;
    return h;
}

inline IntervalMatrix assemble_bordered(const BorderedMatrix& b) {
    const std::size_t n = b.block.rows;
    if (b.block.cols != n || b.row.size() != n || b.col.size() != n)
        throw shape_error("bordered section: inconsistent border sizes");
    IntervalMatrix m(n + 1, n + 1);
    m.at(0, 0) = b.corner;
    for (std::size_t i = 0; i < n; ++i) {
        m.at(0, 1 + i) = b.row[i];
        m.at(1 + i, 0) = b.col[i];
        for (std::size_t j = 0; j < n; ++j) m.at(1 + i, 1 + j) = b.block.at(i, j);
    }
    return m;
}

// interval border g_n = 2 d sqrt(K_n) (dx2 U0^N)_n / rho of the augmented
// section, in the same order as the table at order N
inline std::vector<Interval> border_vector(const SymSequence& U0, int N, double rho) {
    const SymSequence dU = project(derivative_x2(U0), N, ProjectSide::inside);
    const auto tN = make_table(U0.group(), N);
    const Interval pref = (Interval(2.0) * Interval(U0.d)) / Interval(rho);
    std::vector<Interval> g(tN->size());
    for (std::size_t s = 0; s < tN->size(); ++s)
        g[s] = pref * iv_sqrt(Interval(double(quad_weight(*tN, s)))) * dU.at(tN->reps[s]);
    return g;
}

// number (order) whose reduced index set has exactly `rows` slots
inline int order_from_rows(const SymmetryGroup& g, std::size_t rows) {
    for (int n = 0;; ++n) {
        const std::size_t sz = make_table(g, n)->size();
        if (sz == rows) return n;
        if (sz > rows) throw shape_error("section size does not match any truncation order");
    }
}

}  // namespace detail

// ---- Y0: the defect ------------------------------------------------------------
// Y0 = sqrt|Omega_0| (|B^N F(U0)|_2^2 + |(pi^{3 N0} - pi^N) F(U0)|_2^2)^{1/2}.
// The residual F(U0) is exact on the 3 N0 box, so the tail term is the exact
// norm of its outside part.  A bordered section (rows = n + 1) is accepted by
// prepending a zero scalar coordinate to the residual.
inline Interval bound_Y0(const SymSequence& U0, const IntervalMatrix& BN, const SHParams& p,
                         int N0, int N) {
    validate_params(p);
    if (U0.N() != N0) throw config_error("bound_Y0: U0 must be supported at order N0");
    if (N < 0 || N > N0) throw config_error("bound_Y0: need 0 <= N <= N0");
    if (BN.rows != BN.cols) throw shape_error("bound_Y0: section must be square");

    const SymSequence F = residual_F(U0, p);
    const auto tN = make_table(U0.group(), N);
    const std::size_t n = tN->size();

    std::vector<Interval> f;
    if (BN.rows == n + 1) f.push_back(Interval(0.0));
    else if (BN.rows != n) throw shape_error("bound_Y0: section size does not match the table");
    for (std::size_t s = 0; s < n; ++s)
        f.push_back(F.at(tN->reps[s]) * iv_sqrt(Interval(double(quad_weight(*tN, s)))));

    Interval head(0.0);
    for (const Interval& yi : matvec(BN, f)) head += sqr(yi);
    const Interval tail = norm_2(project(F, N, ProjectSide::outside));
    return Interval(2.0) * Interval(U0.d) * iv_sqrt(head + sqr(tail));
}

inline Interval bound_Y0(const SymSequence& U0, const BorderedMatrix& B, const SHParams& p,
                         int N0, int N) {
    return bound_Y0(U0, detail::assemble_bordered(B), p, N0, N);
}

// ---- Zu: the periodic-to-plane defect -------------------------------------------
// Quantifies how far the inverse of the periodic symbol is from the inverse of
// the plane symbol when composed with the multiplication by V0^N.  All inner
// products (V, V * E) against the exponential-weight sequences E1, E2, E12 are
// separable, so they are evaluated with 1D kernel convolutions on the
// unfolding, split into the parts even and odd in x2.
inline Interval bound_Zu(const SymSequence& U0, const SHParams& p, int N, double d) {
    validate_params(p);
    if (!(d > 0.0)) throw config_error("bound_Zu: d must be positive");
    if (N < 0 || N > U0.N()) throw config_error("bound_Zu: need 0 <= N <= order of U0");

    SHParams q = p;
    q.d = d;
    const DecayConstants dc = decay_constants(q);
    const LinearizationData lin = v0_and_W(U0, p, N);
    const SymSequence V = detail::restrict_to_table(lin.V0N, make_table(U0.group(), 2 * N));
    const FullGrid gV = unfold(V);

    std::vector<Interval> ker(std::size_t(4 * N + 1));
    for (int k = 0; k <= 4 * N; ++k) ker[std::size_t(k)] = e1_coefficient(dc.a, d, k);

    std::vector<FullGrid> parts;
    parts.push_back(detail::even_grid(gV));
    if (gV.has_im()) parts.push_back(detail::odd_grid(gV));

    const Interval omega0 = sqr(Interval(2.0) * Interval(d));
    const Interval e2ad = iv_exp(-(Interval(2.0) * dc.a * Interval(d)));
    const Interval lead = sqr(dc.C0) * e2ad * omega0 / sqr(dc.a);
    const Interval lead2 = sqr(dc.C0) * sqr(e2ad) * omega0;

    Interval zu1sq(0.0), zu2(0.0);
    for (const FullGrid& gs : parts) {
        const FullGrid t1 = detail::axis_conv(gs, ker, 0);
        const FullGrid t2 = detail::axis_conv(gs, ker, 1);
        const FullGrid t12 = detail::axis_conv(t1, ker, 1);
        const Interval a1 = inner2_grid(gs, t1);
        const Interval a2 = inner2_grid(gs, t2);
        const Interval a12 = inner2_grid(gs, t12);
        zu1sq += lead * (a1 + a2);
        const Interval part2 =
            lead * (a1 + a2) + lead2 * (dc.C1 * a1 + dc.C12 * a12 + dc.C2 * a2);
        zu2 += iv_sqrt(detail::nonneg_radicand(part2, "bound_Zu"));
    }
    return iv_sqrt(detail::nonneg_radicand(zu1sq, "bound_Zu") + sqr(zu2));
}

// ---- Z1, plain path --------------------------------------------------------------
// Z1 = phi(Z11, Z12, Z13, Z14) + max{1, |B^N|} (Zu + |V0 - V0^N|_1 / mu), with
//   Z11 = |I - B^N M^N|,                    M^N = I + V0^N L^{-1} section,
//   Z12 = sup 1/|l| sqrt(|B^N T B^N*|),    T  = V0^N pi_N V0^N section,
//   Z13 = sqrt(|L^{-1} T L^{-1}|),
//   Z14 = sup 1/|l| |V0^N|_1,
// the suprema running over the complement of the index set.
inline Interval bound_Z1_plain(const SymSequence& U0, const IntervalMatrix& BN,
                               const SHParams& p, int N, int N0) {
    validate_params(p);
    if (U0.N() != N0) throw config_error("bound_Z1_plain: U0 must be supported at order N0");
    if (N < 0 || N > N0) throw config_error("bound_Z1_plain: need 0 <= N <= N0");
    const auto tN = make_table(U0.group(), N);
    const std::size_t n = tN->size();
    if (BN.rows != n || BN.cols != n)
        throw shape_error("bound_Z1_plain: section size does not match the table");

    const LinearizationData lin = v0_and_W(U0, p, N);
    const IntervalMatrix Cii = conv_operator_matrix(lin.V0N, N);
    const std::vector<Interval> l = detail::symbol_l_values(*tN, U0.d, p);
    std::vector<Interval> linv(n);
    for (std::size_t s = 0; s < n; ++s) linv[s] = Interval(1.0) / l[s];

    const IntervalMatrix MN = detail::mn_section(Cii, l);
    const Interval z11 = mat_norm2_upper(IntervalMatrix::identity(n) - BN * MN, true);

    const Interval tail = detail::tail_linv_max(N, U0.d, p.mu);
    const IntervalMatrix T = detail::tail_quadratic_section(lin.V0N, Cii, N);
    const Interval z12 = tail * iv_sqrt(mat_norm2_upper(BN * T * BN.transpose(), true));
    const Interval z13 = iv_sqrt(mat_norm2_upper(detail::scale_sym(T, linv), true));
    const Interval z14 = tail * norm_1(lin.V0N);

    const Interval bnorm = detail::iv_max1(mat_norm2_upper(BN, true));
    const Interval zu = bound_Zu(U0, p, N, U0.d);
    const Interval vtail = norm_1(project(lin.V0, 2 * N, ProjectSide::outside)) / p.mu;
    return combine_phi(z11, z12, z13, z14) + bnorm * (zu + vtail);
}

// ---- Ys: averaged defect ----------------------------------------------------------
// Defect introduced by averaging the candidate over the rotation orbit.  The
// result is the raw sum Ys1 + Ys2; the caller scales it by max{1, |B^N|} on
// the averaged path or by C_B on the unfolded one.  |1/l0|_2 = 1/(2 sqrt(pi))
// in closed form for l0 = 1 + 4 pi^2 |xi|^2.
inline Interval bound_Ys(const SymSequence& U0, int j, const SHParams& p, int N1, double tol) {
    validate_params(p);
    if (j < 2) throw config_error("bound_Ys: j must be at least 2");
    if (!(tol > 0.0)) throw config_error("bound_Ys: tol must be positive");
    const int n1 = (N1 < 0) ? U0.N() : N1;

    const Angle ang = Angle::fraction(1, j);
    const Interval phi_u = phi_rotation(U0, ang, n1, tol);
    const SymSequence L0u = apply_symbol(U0, symbol_fn(SymbolKind::l0, p));
    const Interval phi_L = phi_rotation(L0u, ang, n1, tol);
    const Interval invl0 = Interval(1.0) / (Interval(2.0) * iv_sqrt(consts::pi()));
    const Interval J = Interval(double(j));

    std::vector<Interval> R(std::size_t(j), Interval(0.0));
    for (int k = 0; k < j; ++k) R[std::size_t(k)] = R_kj(k, j);
    const auto Rm = [&](long k) { return R[std::size_t(((k % j) + j) % j)]; };

    Interval s2(0.0);
    for (long k = 0; k < j; ++k)
        for (long q = 0; q < j; ++q) s2 += sqr(Rm(q - k));
    const Interval ys1 = invl0 * iv_abs(p.nu1) / (Interval(2.0) * sqr(J)) * phi_u * phi_L * s2;

    Interval s3(0.0);
    for (long k = 0; k < j; ++k)
        for (long c = 0; c < j; ++c)
            for (long q = 0; q < j; ++q)
                s3 += Rm(c - k) * (Rm(k - q) * phi_L + Rm(k - c) * phi_L);
    const Interval ys2 = invl0 * iv_abs(p.nu2) / (J * J * J) * norm_1(U0) * phi_u * s3;
    return ys1 + ys2;
}

// ---- Zs: averaged contraction defect ------------------------------------------------
// Zs = 2 kappa max{1, |B^N|} (|nu1| + 3 |nu2| |U0|_1) phi(u0, R) / j * sum_k R_{k,j}
inline Interval bound_Zs(const SymSequence& U0, int j, const IntervalMatrix& BN,
                         const SHParams& p, int N1, double tol) {
    validate_params(p);
    if (j < 2) throw config_error("bound_Zs: j must be at least 2");
    if (!(tol > 0.0)) throw config_error("bound_Zs: tol must be positive");
    const int n1 = (N1 < 0) ? U0.N() : N1;

    const Interval phi_u = phi_rotation(U0, Angle::fraction(1, j), n1, tol);
    Interval sumR(0.0);
    for (int k = 0; k < j; ++k) sumR += R_kj(k, j);
    const Interval bnorm = detail::iv_max1(mat_norm2_upper(BN, true));
    return Interval(2.0) * kappa(p) * bnorm *
           (iv_abs(p.nu1) + Interval(3.0) * iv_abs(p.nu2) * norm_1(U0)) * phi_u * sumR /
           Interval(double(j));
}

// ---- Z2: the quadratic coefficient ---------------------------------------------------
// Affine-in-r certificate Z2(r) = slope * r + intercept valid for every
// 0 <= r <= r_probe (in fact for all r >= 0; r_probe is recorded for digests).
// Plain / averaged path, with BN the plain section:
//   slope     = 3 |nu2| kappa^2 / mu * max{1, |B^N|}
//   intercept = kappa / mu * max{2 |nu1|, sqrt(|W B^N*|^2 + |W|_1^2)}
//               (+ 6 kappa^2 |nu2| / j * max{1, |B^N|} phi(u0) sum_k R_{k,j}
//                when the averaged correction is active).
inline Z2Coeffs bound_Z2(BoundVariant variant, const SymSequence& U0, const IntervalMatrix& BN,
                         const SHParams& p, int j, const Interval& r_probe, int N1 = -1,
                         double tol = 1e-10) {
    validate_params(p);
    if (variant == BoundVariant::bordered)
        throw config_error("bound_Z2: the bordered variant takes the bordered section");
    if (r_probe.lo < 0.0) throw config_error("bound_Z2: r_probe must be nonnegative");
    if (BN.rows != BN.cols) throw shape_error("bound_Z2: section must be square");
    const int N = detail::order_from_rows(U0.group(), BN.rows);
    if (N > U0.N()) throw config_error("bound_Z2: section order exceeds the support of U0");

    const LinearizationData lin = v0_and_W(U0, p, N);
    const Interval kap = kappa(p);
    const Interval bnorm = detail::iv_max1(mat_norm2_upper(BN, true));

    Z2Coeffs out;
    out.slope = Interval(3.0) * iv_abs(p.nu2) * sqr(kap) / p.mu * bnorm;

    const SymSequence WW = convolve(lin.W, lin.W, 2 * N);
    const IntervalMatrix CW = conv_operator_matrix(WW, N);
    const Interval wb2 = mat_norm2_upper(BN * CW * BN.transpose(), true);
    const Interval w1 = norm_1(lin.W);
    out.intercept = kap / p.mu *
                    detail::iv_max(Interval(2.0) * iv_abs(p.nu1),
                                   iv_sqrt(detail::nonneg_radicand(wb2 + sqr(w1), "bound_Z2")));

    if (variant == BoundVariant::symmetrized) {
        if (j < 2) throw config_error("bound_Z2: averaged variant needs j >= 2");
        if (!(tol > 0.0)) throw config_error("bound_Z2: tol must be positive");
        const int n1 = (N1 < 0) ? U0.N() : N1;
        const Interval phi_u = phi_rotation(U0, Angle::fraction(1, j), n1, tol);
        Interval sumR(0.0);
        for (int k = 0; k < j; ++k) sumR += R_kj(k, j);
        out.intercept += Interval(6.0) * sqr(kap) * iv_abs(p.nu2) / Interval(double(j)) *
                         bnorm * phi_u * sumR;
    }
    return out;
}

// Unfolded path.  The bulk block plays the role of B^N in the quadratic terms;
// the border functional contributes the constant terms
//   Z23 = kappa / mu * sqrt(|W|_1^2 + |W|_1^2)   (operator norm of the
//         multiplication by W bounded through Young's inequality), and
//   Z24 = 6 |nu2| kappa^2 / j * phi(u0) sum_k R_{k,j},
// both scaled by max{1, |b12|_2}.
inline Z2Coeffs bound_Z2(BoundVariant variant, const SymSequence& U0, const BorderedMatrix& B,
                         const SHParams& p, int j, const Interval& r_probe, int N1 = -1,
                         double tol = 1e-10) {
    validate_params(p);
    if (variant != BoundVariant::bordered)
        throw config_error("bound_Z2: bordered section requires the bordered variant");
    if (r_probe.lo < 0.0) throw config_error("bound_Z2: r_probe must be nonnegative");
    if (j < 2) throw config_error("bound_Z2: j must be at least 2");
    if (!(tol > 0.0)) throw config_error("bound_Z2: tol must be positive");
    const int N = detail::order_from_rows(U0.group(), B.block.rows);
    if (N > U0.N()) throw config_error("bound_Z2: section order exceeds the support of U0");

    const LinearizationData lin = v0_and_W(U0, p, N);
    const Interval kap = kappa(p);
    const Interval bnorm = detail::iv_max1(mat_norm2_upper(B.block, true));
    const int n1 = (N1 < 0) ? U0.N() : N1;
    const Interval phi_u = phi_rotation(U0, Angle::fraction(1, j), n1, tol);
    Interval sumR(0.0);
    for (int k = 0; k < j; ++k) sumR += R_kj(k, j);
    const Interval J = Interval(double(j));

    Z2Coeffs out;
    out.slope = Interval(3.0) * iv_abs(p.nu2) * sqr(kap) / p.mu * bnorm;

    const SymSequence WW = convolve(lin.W, lin.W, 2 * N);
    const IntervalMatrix CW = conv_operator_matrix(WW, N);
    const Interval wb2 = mat_norm2_upper(B.block * CW * B.block.transpose(), true);
    const Interval w1 = norm_1(lin.W);
    out.intercept = kap / p.mu *
                    detail::iv_max(Interval(2.0) * iv_abs(p.nu1),
                                   iv_sqrt(detail::nonneg_radicand(wb2 + sqr(w1), "bound_Z2")));
    out.intercept += Interval(6.0) * sqr(kap) * iv_abs(p.nu2) / J * bnorm * phi_u * sumR;

    Interval row2(0.0);
    for (const Interval& r : B.row) row2 += sqr(r);
    const Interval b12 = iv_sqrt(row2);
    const Interval z23 = kap / p.mu * iv_sqrt(sqr(w1) + sqr(w1));
    const Interval z24 = Interval(6.0) * iv_abs(p.nu2) * sqr(kap) / J * phi_u * sumR;
    out.intercept += detail::iv_max1(b12) * (z23 + z24);
    return out;
}

// ---- C_B: the column bound of the bordered inverse ------------------------------------
// C_B = sqrt(|b12|_2^2 + max{1, |b22|}^2) dominates the norm of the sequence
// column of the bordered inverse acting into the augmented space.
inline Interval bound_CB(const BorderedMatrix& B) {
    Interval row2(0.0);
    for (const Interval& r : B.row) row2 += sqr(r);
    return iv_sqrt(row2 + sqr(detail::iv_max1(mat_norm2_upper(B.block, true))));
}

// ---- Z1, unfolded path ------------------------------------------------------------------
// Same block structure as the plain path on the augmented section with the
// extra scalar coordinate first.  The augmented M^N has corner 0 (corner -1 of
// the derivative matrix plus the identity) and symmetric borders g; when the
// border vanishes identically the corner is kept at -1 so that the section
// stays invertible, matching the convention of the builder in approx.hpp.
// Two extra corrections appear: C_B * Zu and the tail defect of the border,
//   |B|_{H2} phi(0, sqrt|Omega_0|/rho |dx2 U0 - dx2 U0^N|_2, same, |V0 - V0^N|_1 / mu).
inline Interval bound_Z1_bordered(const SymSequence& U0, const BorderedMatrix& B,
                                  const SHParams& p, int N, double rho) {
    validate_params(p);
    if (!(rho > 0.0)) throw config_error("bound_Z1_bordered: rho must be positive");
    if (!is_z2z1(*U0.table))
        throw unsupported_error("bound_Z1_bordered: the unfolded path needs the Z2xZ1 group");
    if (N < 0 || N > U0.N()) throw config_error("bound_Z1_bordered: need 0 <= N <= order of U0");
    const auto tN = make_table(U0.group(), N);
    const std::size_t n = tN->size();
    if (B.block.rows != n || B.block.cols != n)
        throw shape_error("bound_Z1_bordered: section size does not match the table");

    const LinearizationData lin = v0_and_W(U0, p, N);
    const IntervalMatrix Cii = conv_operator_matrix(lin.V0N, N);
    const std::vector<Interval> l = detail::symbol_l_values(*tN, U0.d, p);
    std::vector<Interval> linv(n);
    for (std::size_t s = 0; s < n; ++s) linv[s] = Interval(1.0) / l[s];

    const std::vector<Interval> g = detail::border_vector(U0, N, rho);
    bool gzero = true;
    for (const Interval& gi : g) gzero = gzero && gi.lo == 0.0 && gi.hi == 0.0;

    IntervalMatrix MNb(n + 1, n + 1);
    MNb.at(0, 0) = Interval(gzero ? -1.0 : 0.0);
    const IntervalMatrix MN = detail::mn_section(Cii, l);
    for (std::size_t i = 0; i < n; ++i) {
        MNb.at(0, 1 + i) = g[i];
        MNb.at(1 + i, 0) = g[i];
        for (std::size_t jj = 0; jj < n; ++jj) MNb.at(1 + i, 1 + jj) = MN.at(i, jj);
    }
    const IntervalMatrix Bb = detail::assemble_bordered(B);
    const Interval z11 = mat_norm2_upper(IntervalMatrix::identity(n + 1) - Bb * MNb, true);

    const Interval tail = detail::tail_linv_max(N, U0.d, p.mu);
    const IntervalMatrix T = detail::tail_quadratic_section(lin.V0N, Cii, N);
    IntervalMatrix Tb(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jj = 0; jj < n; ++jj) Tb.at(1 + i, 1 + jj) = T.at(i, jj);
    const Interval z12 = tail * iv_sqrt(mat_norm2_upper(Bb * Tb * Bb.transpose(), true));
    const Interval z13 = iv_sqrt(mat_norm2_upper(detail::scale_sym(T, linv), true));
    const Interval z14 = tail * norm_1(lin.V0N);

    const Interval zu = bound_Zu(U0, p, N, U0.d);
    const Interval bh2 = detail::iv_max1(mat_norm2_upper(Bb, true));
    const Interval dtail = (Interval(2.0) * Interval(U0.d) / Interval(rho)) *
                           norm_2(derivative_x2(project(U0, N, ProjectSide::outside)));
    const Interval vtail = norm_1(project(lin.V0, 2 * N, ProjectSide::outside)) / p.mu;
    return combine_phi(z11, z12, z13, z14) + bound_CB(B) * zu +
           bh2 * combine_phi(Interval(0.0), dtail, dtail, vtail);
}

// ---- Zs, unfolded path -----------------------------------------------------------------
// Zs = |B|_{H2} phi(0, Zs1, Zs1, Zs2) with
//   Zs1 = kappa_partial / (j rho) phi(L1 u0, R) sum_k R_{k,j}
//         (kappa_partial = |l_partial / l1|_2, the derivative defect), and
//   Zs2 = 2 kappa (|nu1| + 3 |nu2| |U0|_1) phi(u0, R) / j * sum_k R_{k,j}.
inline Interval bound_Zs_bordered(const SymSequence& U0, const BorderedMatrix& B,
                                  const SHParams& p, int j, double rho, int N1, double tol) {
    validate_params(p);
    if (j < 2) throw config_error("bound_Zs_bordered: j must be at least 2");
    if (!(rho > 0.0)) throw config_error("bound_Zs_bordered: rho must be positive");
    if (!(tol > 0.0)) throw config_error("bound_Zs_bordered: tol must be positive");
    if (!is_z2z1(*U0.table))
        throw unsupported_error("bound_Zs_bordered: the unfolded path needs the Z2xZ1 group");
    const int n1 = (N1 < 0) ? U0.N() : N1;
    const Angle ang = Angle::fraction(1, j);
    const Interval J = Interval(double(j));

    Interval sumR(0.0);
    for (int k = 0; k < j; ++k) sumR += R_kj(k, j);

    const Interval kpartial =
        symbol_ratio_l2(SymbolKind::lpartial, SymbolKind::l1, p.mu, 8.0, tol);
    const SymSequence L1u = apply_symbol(U0, symbol_fn(SymbolKind::l1, p));
    const Interval zs1 =
        kpartial / (J * Interval(rho)) * phi_rotation(L1u, ang, n1, tol) * sumR;

    const Interval zs2 = Interval(2.0) * kappa(p) *
                         (iv_abs(p.nu1) + Interval(3.0) * iv_abs(p.nu2) * norm_1(U0)) *
                         phi_rotation(U0, ang, n1, tol) * sumR / J;

    const Interval bh2 = detail::iv_max1(mat_norm2_upper(detail::assemble_bordered(B), true));
    return bh2 * combine_phi(Interval(0.0), zs1, zs1, zs2);
}

}  // namespace shcert

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "shcert/bounds.hpp"

using namespace shcert;

namespace {

SHParams desk_d2() {
    SHParams p;
    p.mu = Interval(0.27);
    p.nu1 = Interval(-1.6);
    p.nu2 = Interval(1.0);
    p.d = 10.0;
    p.j = 2;
    return p;
}

SymSequence random_seq(const SymmetryGroup& g, int n_order, double d, unsigned seed,
                       double amp = 0.5) {
    SymSequence u(make_table(g, n_order), d);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    for (auto& e : u.entries) e = Interval(dist(rng));
    return u;
}

SymSequence zero_seq(const SymmetryGroup& g, int n_order, double d) {
    return SymSequence(make_table(g, n_order), d);
}

// D4-symmetric data re-tabulated on the Z2xZ1 index set
SymSequence d4_on_z2z1(int n_order, double d, unsigned seed) {
    const SymSequence u4 = random_seq(build_group(GroupName::D4), n_order, d, seed);
    return reduce(unfold(u4), make_table(build_group(GroupName::Z2xZ1), n_order), d);
}

double sigma_max(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

TEST_CASE("combine_phi closed form") {
    const Interval one(1.0), zero(0.0);

    SECTION("unit corner") {
        const Interval r = combine_phi(one, zero, zero, zero);
        CHECK(r.lo <= 1.0);
        CHECK(r.hi >= 1.0);
        CHECK(r.hi <= 1.0 + 1e-14);
    }
    SECTION("all zeros") {
        const Interval r = combine_phi(zero, zero, zero, zero);
        CHECK(r.lo == 0.0);
        CHECK(r.hi == 0.0);
    }
    SECTION("all ones is rank one") {
        const Interval r = combine_phi(one, one, one, one);
        CHECK(r.lo <= 2.0);
        CHECK(r.hi >= 2.0);
        CHECK(r.hi <= 2.0 + 1e-14);
    }
    SECTION("random 2x2 against dense SVD") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> dist(0.0, 3.0);
        for (int it = 0; it < 20; ++it) {
            const double a = dist(rng), b = dist(rng), c = dist(rng), e = dist(rng);
            Eigen::MatrixXd m(2, 2);
            m << a, b, c, e;
            const double sv = sigma_max(m);
            const Interval r = combine_phi(Interval(a), Interval(b), Interval(c), Interval(e));
            CHECK(r.lo <= sv + 1e-12);
            CHECK(r.hi >= sv - 1e-12);
        }
    }
    SECTION("negative lower endpoints are clamped, not fatal") {
        const Interval wobbly(-1e-17, 1.0);
        const Interval r = combine_phi(wobbly, zero, zero, zero);
        CHECK(r.lo >= 0.0);
        CHECK(r.hi >= 1.0);
    }
}

TEST_CASE("R_kj partial sums") {
    SECTION("spot values") {
        for (long j : {2L, 3L, 5L, 8L}) {
            const Interval r0 = R_kj(0, j);
            CHECK(r0.lo == 0.0);
            CHECK(r0.hi == 0.0);
            const Interval r1 = R_kj(1, j);
            CHECK(r1.lo <= 1.0);
            CHECK(r1.hi >= 1.0);
            CHECK(r1.hi <= 1.0 + 1e-14);
        }
        const Interval r24 = R_kj(2, 4);
        CHECK(r24.lo <= std::sqrt(2.0));
        CHECK(r24.hi >= std::sqrt(2.0));
        CHECK(r24.hi - r24.lo <= 1e-14);
    }
    SECTION("indices wrap mod j") {
        const Interval a = R_kj(-1, 5);
        const Interval b = R_kj(4, 5);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
        const Interval c = R_kj(9, 5);
        CHECK(c.lo == b.lo);
        CHECK(c.hi == b.hi);
    }
    SECTION("matches the complex geometric sum") {
        for (long j = 3; j <= 8; ++j) {
            for (long k = 0; k < j; ++k) {
                std::complex<double> s(0.0, 0.0);
                for (long p = 0; p < k; ++p)
                    s += std::exp(std::complex<double>(0.0, 2.0 * M_PI * double(p) / double(j)));
                const double want = std::abs(s);
                const Interval got = R_kj(k, j);
                CHECK(got.lo <= want + 1e-12);
                CHECK(got.hi >= want - 1e-12);
            }
        }
    }
    SECTION("j below 2 rejected") { CHECK_THROWS_AS(R_kj(0, 1), config_error); }
}

TEST_CASE("tail symbol maximum on the inner ring") {
    const Interval mu(0.27);

    SECTION("never exceeds 1/mu") {
        for (int N : {0, 1, 3, 10, 40}) {
            const Interval t = detail::tail_linv_max(N, 10.0, mu);
            CHECK(t.hi <= (Interval(1.0) / mu).hi + 1e-15);
            CHECK(t.lo >= 0.0);
        }
    }
    SECTION("equals the ring value once outside the symbol circle") {
        // ring radius rho0 = (N+1)/(2d) beyond 1/(2pi): direct evaluation
        const int N = 40;
        const double d = 10.0;
        const Interval t = detail::tail_linv_max(N, d, mu);
        const Interval rho0 = Interval(double(N + 1)) / Interval(2.0 * d);
        const Interval l =
            sqr(Interval(1.0) - Interval(4.0) * sqr(consts::pi()) * sqr(rho0)) + mu;
        const Interval want = Interval(1.0) / l;
        CHECK(t.lo == want.lo);
        CHECK(t.hi == want.hi);
    }
    SECTION("non-increasing as the section grows") {
        double prev = (Interval(1.0) / mu).hi + 1.0;
        for (int N = 0; N <= 60; N += 5) {
            const double cur = detail::tail_linv_max(N, 10.0, mu).hi;
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("bound_Y0") {
    const SHParams p = desk_d2();
    const SymmetryGroup d2 = build_group(GroupName::D2);

    SECTION("zero candidate has zero defect") {
        const SymSequence u0 = zero_seq(d2, 4, p.d);
        const auto tN = make_table(d2, 3);
        const IntervalMatrix bn = IntervalMatrix::identity(tN->size());
        const Interval y0 = bound_Y0(u0, bn, p, 4, 3);
        CHECK(y0.hi == 0.0);
    }
    SECTION("identity section reproduces the split residual norm") {
        const SymSequence u0 = random_seq(d2, 4, p.d, 11);
        const auto tN = make_table(d2, 3);
        const IntervalMatrix bn = IntervalMatrix::identity(tN->size());
        const Interval y0 = bound_Y0(u0, bn, p, 4, 3);
        // with B = I the head/tail split reassembles the full residual norm
        const Interval want =
            Interval(2.0) * Interval(p.d) * norm_2(residual_F(u0, p));
        CHECK(y0.lo <= want.hi + 1e-12);
        CHECK(y0.hi >= want.lo - 1e-12);
        CHECK(std::abs(y0.mid() - want.mid()) <= 1e-9 * (1.0 + std::abs(want.mid())));
    }
    SECTION("monotone in the nonlinearity for nonnegative data") {
        SymSequence u0(make_table(d2, 3), p.d);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> dist(0.0, 0.4);
        for (auto& e : u0.entries) e = Interval(dist(rng));
        SHParams q = p;
        q.nu1 = Interval(1.3);
        q.nu2 = Interval(0.8);
        SHParams q2 = q;
        q2.nu1 = Interval(2.6);
        q2.nu2 = Interval(1.6);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d2, 2)->size());
        const Interval y1 = bound_Y0(u0, bn, q, 3, 2);
        const Interval y2 = bound_Y0(u0, bn, q2, 3, 2);
        CHECK(y2.hi >= y1.hi);
        CHECK(y2.lo >= y1.lo - 1e-15);
    }
    SECTION("bordered sections prepend a zero coordinate") {
        const SymSequence u0 = random_seq(d2, 3, p.d, 21);
        const auto tN = make_table(d2, 2);
        const std::size_t n = tN->size();
        const IntervalMatrix bn = IntervalMatrix::identity(n);
        BorderedMatrix b;
        b.corner = Interval(5.0);  // multiplies the zero coordinate only
        b.row.assign(n, Interval(0.0));
        b.col.assign(n, Interval(0.0));
        b.block = bn;
        const Interval plain = bound_Y0(u0, bn, p, 3, 2);
        const Interval bord = bound_Y0(u0, b, p, 3, 2);
        CHECK(std::abs(plain.lo - bord.lo) <= 1e-15);
        CHECK(std::abs(plain.hi - bord.hi) <= 1e-15);
    }
    SECTION("shape and order validation") {
        const SymSequence u0 = random_seq(d2, 3, p.d, 31);
        const IntervalMatrix bad(4, 4);
        CHECK_THROWS_AS(bound_Y0(u0, bad, p, 3, 2), shape_error);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d2, 2)->size());
        CHECK_THROWS_AS(bound_Y0(u0, bn, p, 3, 4), config_error);
        CHECK_THROWS_AS(bound_Y0(u0, bn, p, 2, 2), config_error);
    }
}

TEST_CASE("bound_Zu") {
    const SHParams p = desk_d2();

    SECTION("zero candidate gives zero") {
        const SymSequence u0 = zero_seq(build_group(GroupName::D2), 3, p.d);
        const Interval zu = bound_Zu(u0, p, 2, p.d);
        CHECK(zu.hi == 0.0);
    }
    SECTION("decays as the domain grows") {
        const SymSequence u0 = random_seq(build_group(GroupName::D2), 3, 20.0, 13);
        double prev = 1e300;
        for (double d : {20.0, 30.0, 40.0}) {
            const double cur = bound_Zu(u0, p, 2, d).hi;
            CHECK(cur < prev);
            prev = cur;
        }
    }
    SECTION("exponential-weight pairings are nonnegative") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        SHParams q = p;
        q.d = 20.0;
        const DecayConstants dc = decay_constants(q);
        const int M = 4;
        std::vector<Interval> ker(std::size_t(2 * M + 1));
        for (int k = 0; k <= 2 * M; ++k) ker[std::size_t(k)] = e1_coefficient(dc.a, q.d, k);
        for (int it = 0; it < 10; ++it) {
            FullGrid v(M, false);
            for (auto& e : v.re) e = Interval(dist(rng));
            for (int axis : {0, 1}) {
                const Interval qf = inner2_grid(v, detail::axis_conv(v, ker, axis));
                CHECK(qf.hi >= 0.0);
            }
        }
    }
    SECTION("axis kernels match the dense grid convolution (Z2xZ1, complex)") {
        SHParams q = p;
        q.d = 20.0;
        const int N = 2;
        const SymmetryGroup gz = build_group(GroupName::Z2xZ1);
        const SymSequence u0 = random_seq(gz, N, q.d, 19);
        const Interval zu = bound_Zu(u0, q, N, q.d);

        // dense recomputation of the whole formula through convolve_grids
        const DecayConstants dc = decay_constants(q);
        const LinearizationData lin = v0_and_W(u0, q, N);
        const SymSequence V =
            detail::restrict_to_table(lin.V0N, make_table(gz, 2 * N));
        const FullGrid gv = unfold(V);
        const ESequences es = E_sequences(dc.a, q.d, 4 * N, gz);
        const FullGrid ge1 = unfold(es.E1), ge2 = unfold(es.E2), ge12 = unfold(es.E12);
        const auto pair_with = [&](const FullGrid& weight) {
            return inner2_grid(gv, convolve_grids(gv, weight, 2 * N));
        };
        const Interval a1 = pair_with(ge1), a2 = pair_with(ge2), a12 = pair_with(ge12);
        const Interval omega0 = sqr(Interval(2.0) * Interval(q.d));
        const Interval e2ad = iv_exp(-(Interval(2.0) * dc.a * Interval(q.d)));
        const Interval lead = sqr(dc.C0) * e2ad * omega0 / sqr(dc.a);
        const Interval lead2 = sqr(dc.C0) * sqr(e2ad) * omega0;
        // dense path has no even/odd split: Zu2 as a single square root
        const Interval zu1sq = lead * (a1 + a2);
        const Interval zu2sq =
            lead * (a1 + a2) + lead2 * (dc.C1 * a1 + dc.C12 * a12 + dc.C2 * a2);
        const Interval want = iv_sqrt(zu1sq + zu2sq);

        // the split version bounds the unsplit one from above (triangle
        // inequality across the parity parts) and stays within a factor sqrt 2
        CHECK(zu.hi >= want.lo - 1e-12);
        CHECK(zu.hi <= std::sqrt(2.0) * want.hi + 1e-12);
    }
    SECTION("axis kernels match the dense pairings exactly per part (D2, real)") {
        SHParams q = p;
        q.d = 20.0;
        const int N = 2;
        const SymmetryGroup d2 = build_group(GroupName::D2);
        const SymSequence u0 = random_seq(d2, N, q.d, 23);
        const DecayConstants dc = decay_constants(q);
        const LinearizationData lin = v0_and_W(u0, q, N);
        const SymSequence V =
            detail::restrict_to_table(lin.V0N, make_table(d2, 2 * N));
        const FullGrid gv = unfold(V);

        std::vector<Interval> ker(std::size_t(4 * N + 1));
        for (int k = 0; k <= 4 * N; ++k) ker[std::size_t(k)] = e1_coefficient(dc.a, q.d, k);
        const ESequences es = E_sequences(dc.a, q.d, 4 * N, d2);
        const FullGrid ge1 = unfold(es.E1);
        const FullGrid ge12 = unfold(es.E12);

        const Interval ax1 = inner2_grid(gv, detail::axis_conv(gv, ker, 0));
        const Interval dn1 = inner2_grid(gv, convolve_grids(gv, ge1, 2 * N));
        CHECK(std::abs(ax1.mid() - dn1.mid()) <= 1e-10 * (1.0 + std::abs(dn1.mid())));

        const Interval ax12 =
            inner2_grid(gv, detail::axis_conv(detail::axis_conv(gv, ker, 0), ker, 1));
        const Interval dn12 = inner2_grid(gv, convolve_grids(gv, ge12, 2 * N));
        CHECK(std::abs(ax12.mid() - dn12.mid()) <= 1e-10 * (1.0 + std::abs(dn12.mid())));
    }
}

TEST_CASE("bound_Z1_plain") {
    SECTION("trivial linearization with identity section") {
        SHParams p = desk_d2();
        p.nu1 = Interval(0.0);
        p.nu2 = Interval(0.0);
        const SymmetryGroup d2 = build_group(GroupName::D2);
        const SymSequence u0 = zero_seq(d2, 4, p.d);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d2, 3)->size());
        const Interval z1 = bound_Z1_plain(u0, bn, p, 3, 4);
        CHECK(z1.hi <= 1e-12);
    }
    SECTION("tail term never beats the symbol floor") {
        const SHParams p = desk_d2();
        const SymSequence u0 = random_seq(build_group(GroupName::D2), 3, p.d, 41);
        const LinearizationData lin = v0_and_W(u0, p, 2);
        const Interval z14 = detail::tail_linv_max(2, p.d, p.mu) * norm_1(lin.V0N);
        const Interval cap = norm_1(lin.V0N) / p.mu;
        CHECK(z14.hi <= cap.hi * (1.0 + 1e-13));
    }
    SECTION("dense 3N-section oracle never exceeds the certificate") {
        std::mt19937 rng(101);
        std::uniform_real_distribution<double> mu_d(0.2, 0.5), nu1_d(-2.0, -0.5),
            nu2_d(0.5, 1.5);
        const GroupName names[3] = {GroupName::D2, GroupName::D4, GroupName::Z2xZ1};
        for (int it = 0; it < 20; ++it) {
            const SymmetryGroup g = build_group(names[it % 3]);
            SHParams p;
            p.mu = Interval(mu_d(rng));
            p.nu1 = Interval(nu1_d(rng));
            p.nu2 = Interval(nu2_d(rng));
            p.d = 10.0;
            p.j = g.j;
            const int N0 = (it % 2 == 0) ? 3 : 4;
            const int N = N0 - 1;
            const SymSequence u0 = random_seq(g, N0, p.d, 500 + unsigned(it), 0.3);
            const IntervalMatrix bn = build_BN(u0, p, N);
            const Interval z1 = bound_Z1_plain(u0, bn, p, N, N0);

            // dense compression of I - A (I + V0^N L^{-1}) onto the 3N box;
            // A acts as B^N on the section and as L^{-1} outside it
            const LinearizationData lin = v0_and_W(u0, p, N);
            const auto t3 = make_table(g, 3 * N);
            const auto tN = make_table(g, N);
            const std::size_t n3 = t3->size();
            const IntervalMatrix c3 = conv_operator_matrix(lin.V0N, 3 * N);
            const std::vector<Interval> l3 = detail::symbol_l_values(*t3, p.d, p);

            Eigen::MatrixXd mn = Eigen::MatrixXd::Zero(Eigen::Index(n3), Eigen::Index(n3));
            for (std::size_t i = 0; i < n3; ++i)
                for (std::size_t jj = 0; jj < n3; ++jj)
                    mn(Eigen::Index(i), Eigen::Index(jj)) =
                        c3.at(i, jj).mid() / l3[jj].mid() + (i == jj ? 1.0 : 0.0);

            Eigen::MatrixXd amat = Eigen::MatrixXd::Zero(Eigen::Index(n3), Eigen::Index(n3));
            for (std::size_t i = 0; i < n3; ++i) {
                if (tN->in_box(t3->reps[i])) {
                    const std::size_t mi = tN->slot(t3->reps[i]);
                    for (std::size_t jj = 0; jj < n3; ++jj) {
                        if (!tN->in_box(t3->reps[jj])) continue;
                        const std::size_t mj = tN->slot(t3->reps[jj]);
                        amat(Eigen::Index(i), Eigen::Index(jj)) = bn.at(mi, mj).mid();
                    }
                } else {
                    amat(Eigen::Index(i), Eigen::Index(i)) = 1.0 / l3[i].mid();
                }
            }
            const Eigen::MatrixXd r =
                Eigen::MatrixXd::Identity(Eigen::Index(n3), Eigen::Index(n3)) - amat * mn;
            CHECK(sigma_max(r) <= z1.hi + 1e-7);
        }
    }
}

TEST_CASE("bound_Ys") {
    SECTION("already symmetric data has no averaging defect") {
        const SHParams p = desk_d2();
        const SymSequence u4 = random_seq(build_group(GroupName::D4), 3, p.d, 51);
        const Interval ys = bound_Ys(u4, 4, p, 3, 1e-8);
        CHECK(ys.hi <= 1e-12);
    }
    SECTION("linear in nu1 when nu2 is off") {
        // small domain keeps the off-lattice quadrature cheap
        SHParams p = desk_d2();
        p.nu2 = Interval(0.0);
        p.d = 1.5;
        const SymSequence u0 = random_seq(build_group(GroupName::D2), 3, p.d, 53, 0.3);
        const Interval y1 = bound_Ys(u0, 6, p, 3, 1e-6);
        SHParams p2 = p;
        p2.nu1 = Interval(2.0) * p.nu1;
        const Interval y2 = bound_Ys(u0, 6, p2, 3, 1e-6);
        CHECK(y1.hi > 0.0);
        CHECK(std::abs(y2.mid() - 2.0 * y1.mid()) <= 1e-3 * y1.mid());
    }
}

TEST_CASE("bound_Zs") {
    SECTION("already symmetric data contracts for free") {
        const SHParams p = desk_d2();
        const SymSequence u4 = random_seq(build_group(GroupName::D4), 3, p.d, 61);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(build_group(GroupName::D4), 3)->size());
        const Interval zs = bound_Zs(u4, 4, bn, p, 3, 1e-8);
        CHECK(zs.hi <= 1e-12);
    }
    SECTION("quartic homogeneity in the candidate for the cubic term") {
        SHParams p = desk_d2();
        p.nu1 = Interval(0.0);
        p.d = 1.5;
        const SymmetryGroup d2 = build_group(GroupName::D2);
        const SymSequence u0 = random_seq(d2, 3, p.d, 63, 0.4);
        SymSequence uh = u0;
        for (auto& e : uh.entries) e = Interval(0.5) * e;
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d2, 3)->size());
        const Interval za = bound_Zs(u0, 6, bn, p, 3, 1e-6);
        const Interval zb = bound_Zs(uh, 6, bn, p, 3, 1e-6);
        // both the l1 norm and the rotation defect halve, so the product quarters
        CHECK(za.mid() > 0.0);
        const double ratio = za.mid() / zb.mid();
        CHECK(ratio >= 3.9);
        CHECK(ratio <= 4.1);
    }
}

TEST_CASE("bound_Z2") {
    const SymmetryGroup d2 = build_group(GroupName::D2);

    SECTION("pure quadratic nonlinearity has no slope") {
        SHParams p = desk_d2();
        p.nu2 = Interval(0.0);
        const SymSequence u0 = random_seq(d2, 3, p.d, 71);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d2, 2)->size());
        const Z2Coeffs z2 = bound_Z2(BoundVariant::plain, u0, bn, p, 2, Interval(1e-4));
        CHECK(z2.slope.lo == 0.0);
        CHECK(z2.slope.hi == 0.0);
        const Interval floor_ = Interval(2.0) * iv_abs(p.nu1) * kappa(p) / p.mu;
        CHECK(z2.intercept.hi >= floor_.lo);
    }
    SECTION("intercept dominated from below by the linear term") {
        const SHParams p = desk_d2();
        const SymSequence u0 = random_seq(d2, 3, p.d, 73);
        const IntervalMatrix bn = build_BN(u0, p, 2);
        const Z2Coeffs z2 = bound_Z2(BoundVariant::plain, u0, bn, p, 2, Interval(1e-4));
        const Interval floor_ = Interval(2.0) * iv_abs(p.nu1) * kappa(p) / p.mu;
        CHECK(z2.intercept.hi >= floor_.lo);
    }
    SECTION("averaged variant adds nothing on symmetric data") {
        const SHParams p = desk_d2();
        const SymmetryGroup d4 = build_group(GroupName::D4);
        const SymSequence u4 = random_seq(d4, 3, p.d, 75);
        const IntervalMatrix bn = IntervalMatrix::identity(make_table(d4, 2)->size());
        const Z2Coeffs plain = bound_Z2(BoundVariant::plain, u4, bn, p, 4, Interval(1e-4));
        const Z2Coeffs sym =
            bound_Z2(BoundVariant::symmetrized, u4, bn, p, 4, Interval(1e-4), 3, 1e-8);
        CHECK(std::abs(plain.slope.hi - sym.slope.hi) <= 1e-14);
        CHECK(sym.intercept.hi - plain.intercept.hi <= 1e-12);
        CHECK(sym.intercept.hi >= plain.intercept.hi - 1e-14);
    }
    SECTION("bordered variant runs and dominates its bulk version") {
        SHParams p = desk_d2();
        p.d = 1.5;
        const SymmetryGroup gz = build_group(GroupName::Z2xZ1);
        const SymSequence u0 = random_seq(gz, 3, p.d, 77, 0.3);
        const BorderedMatrix b = build_BN_bordered(u0, p, 2);
        const Z2Coeffs z2 =
            bound_Z2(BoundVariant::bordered, u0, b, p, 5, Interval(1e-4), 3, 1e-5);
        CHECK(std::isfinite(z2.slope.hi));
        CHECK(std::isfinite(z2.intercept.hi));
        CHECK(z2.slope.lo >= 0.0);
        // the border terms only add on top of the bulk intercept
        const Z2Coeffs bulk =
            bound_Z2(BoundVariant::symmetrized, u0, b.block, p, 5, Interval(1e-4), 3, 1e-5);
        CHECK(z2.intercept.hi >= bulk.intercept.lo);
        CHECK_THROWS_AS(bound_Z2(BoundVariant::plain, u0, b, p, 5, Interval(1e-4)),
                        config_error);
    }
}

TEST_CASE("bound_CB") {
    const std::size_t n = 6;
    BorderedMatrix b;
    b.block = IntervalMatrix::identity(n);
    b.row.assign(n, Interval(0.0));
    b.col.assign(n, Interval(0.0));
    b.corner = Interval(1.0);

    SECTION("zero border with identity block") {
        const Interval cb = bound_CB(b);
        CHECK(cb.lo <= 1.0);
        CHECK(cb.hi >= 1.0);
        CHECK(cb.hi <= 1.0 + 1e-12);
    }
    SECTION("unit border adds in quadrature") {
        b.row[2] = Interval(1.0);
        const Interval cb = bound_CB(b);
        CHECK(cb.lo <= std::sqrt(2.0) + 1e-15);
        CHECK(cb.hi >= std::sqrt(2.0) - 1e-15);
    }
    SECTION("never below one") {
        std::mt19937 rng(83);
        std::uniform_real_distribution<double> dist(-0.2, 0.2);
        for (auto& e : b.block.a) e = Interval(dist(rng));
        for (auto& e : b.row) e = Interval(dist(rng));
        CHECK(bound_CB(b).hi >= 1.0);
    }
}

TEST_CASE("bound_Z1_bordered") {
    const SymmetryGroup gz = build_group(GroupName::Z2xZ1);

    SECTION("zero candidate with its own builder section") {
        SHParams p = desk_d2();
        p.j = 5;
        const SymSequence u0 = zero_seq(gz, 3, p.d);
        const BorderedMatrix b = build_BN_bordered(u0, p, 3, 1.0);
        const Interval z1 = bound_Z1_bordered(u0, b, p, 3, 1.0);
        CHECK(z1.hi <= 1e-10);
    }
    SECTION("desk candidate stays finite and the N = N0 tails vanish") {
        SHParams p = desk_d2();
        p.mu = Interval(0.2);
        p.j = 5;
        const SymSequence u0 = initial_guess(5, 0.4, 1.0, p.d, 6);
        const double rho = (2.0 * p.d * norm_2(derivative_x2(u0)).mid());
        REQUIRE(rho > 0.0);
        const BorderedMatrix b = build_BN_bordered(u0, p, 6, rho);
        const Interval z1 = bound_Z1_bordered(u0, b, p, 6, rho);
        CHECK(std::isfinite(z1.hi));
        CHECK(z1.lo >= 0.0);
        // fully resolved section: both tail corrections are exact zeros
        CHECK(norm_2(derivative_x2(project(u0, 6, ProjectSide::outside))).hi == 0.0);
        const LinearizationData lin = v0_and_W(u0, p, 6);
        CHECK(norm_1(project(lin.V0, 12, ProjectSide::outside)).hi == 0.0);
    }
    SECTION("group and argument validation") {
        const SHParams p = desk_d2();
        const SymSequence d2u = zero_seq(build_group(GroupName::D2), 3, p.d);
        BorderedMatrix b;
        b.block = IntervalMatrix::identity(make_table(build_group(GroupName::D2), 3)->size());
        b.row.assign(b.block.rows, Interval(0.0));
        b.col.assign(b.block.rows, Interval(0.0));
        b.corner = Interval(-1.0);
        CHECK_THROWS_AS(bound_Z1_bordered(d2u, b, p, 3, 1.0), unsupported_error);
        const SymSequence u0 = zero_seq(gz, 3, p.d);
        const BorderedMatrix bz = build_BN_bordered(u0, p, 3, 1.0);
        CHECK_THROWS_AS(bound_Z1_bordered(u0, bz, p, 3, 0.0), config_error);
    }
}

TEST_CASE("bound_Zs_bordered") {
    const SymmetryGroup gz = build_group(GroupName::Z2xZ1);

    SECTION("symmetric data has no unfolding defect") {
        const SHParams p = desk_d2();
        const SymSequence u0 = d4_on_z2z1(3, p.d, 91);
        const BorderedMatrix b = build_BN_bordered(u0, p, 3);
        const Interval zs = bound_Zs_bordered(u0, b, p, 4, 1.0, 3, 1e-8);
        CHECK(zs.hi <= 1e-12);
    }
    SECTION("scales as 1/rho when the nonlinearity is off") {
        SHParams p = desk_d2();
        p.d = 1.5;
        p.nu1 = Interval(0.0);
        p.nu2 = Interval(0.0);
        const SymSequence u0 = random_seq(gz, 3, p.d, 93, 0.3);
        SHParams pb = desk_d2();
        pb.d = 1.5;
        const BorderedMatrix b = build_BN_bordered(u0, pb, 3);
        const Interval za = bound_Zs_bordered(u0, b, p, 5, 1.0, 3, 1e-5);
        const Interval zb = bound_Zs_bordered(u0, b, p, 5, 10.0, 3, 1e-5);
        CHECK(za.mid() > 0.0);
        const double ratio = za.mid() / zb.mid();
        CHECK(ratio >= 10.0 - 1e-6);
        CHECK(ratio <= 10.0 + 1e-6);
    }
}

TEST_CASE("bounds are inclusion monotone in the parameters") {
    const SymmetryGroup d2 = build_group(GroupName::D2);
    const SHParams p = desk_d2();
    SHParams wide = p;
    wide.mu = Interval(0.27 - 1e-6, 0.27 + 1e-6);
    wide.nu1 = Interval(-1.6 - 1e-6, -1.6 + 1e-6);
    const SymSequence u0 = random_seq(d2, 3, p.d, 97, 0.3);
    const IntervalMatrix bn = build_BN(u0, p, 2);

    const Interval y_pt = bound_Y0(u0, bn, p, 3, 2);
    const Interval y_w = bound_Y0(u0, bn, wide, 3, 2);
    CHECK(y_w.lo <= y_pt.lo);
    CHECK(y_w.hi >= y_pt.hi);

    const Z2Coeffs q_pt = bound_Z2(BoundVariant::plain, u0, bn, p, 2, Interval(1e-4));
    const Z2Coeffs q_w = bound_Z2(BoundVariant::plain, u0, bn, wide, 2, Interval(1e-4));
    CHECK(q_w.slope.lo <= q_pt.slope.lo);
    CHECK(q_w.slope.hi >= q_pt.slope.hi);
    CHECK(q_w.intercept.lo <= q_pt.intercept.lo);
    CHECK(q_w.intercept.hi >= q_pt.intercept.hi);
}

TEST_CASE("BoundSet bookkeeping") {
    BoundSet s;
    s.Y0 = Interval(1e-5);
    s.Z1 = Interval(0.1);
    s.Z2 = Z2Coeffs{Interval(4000.0), Interval(30.0)};
    s.variant = BoundVariant::plain;
    CHECK(s.finite());
    const Interval v = s.z2_at(Interval(1e-4));
    CHECK(v.hi >= 30.0 + 0.4 - 1e-9);
    CHECK(std::string(variant_name(s.variant)) == "plain");
    s.Z1 = Interval(0.0, std::numeric_limits<double>::infinity());
    CHECK(!s.finite());
}

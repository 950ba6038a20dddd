#pragma once
// Candidate construction: sech initial guess sampled to Fourier coefficients,
// damped Newton on the Galerkin projection, trace projection onto the
// zero-boundary-jet subspace, dihedral symmetrization, and the approximate
// inverses B^N (plain and bordered).  Everything in this header is
// floating-point numerics preparing inputs for the certified bounds; outputs
// are sequences and matrices of thin intervals.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shcert/errors.hpp"
#include "shcert/interval.hpp"
#include "shcert/interval_matrix.hpp"
#include "shcert/quadrature.hpp"
#include "shcert/seqspace.hpp"
#include "shcert/sh_model.hpp"
#include "shcert/symmetry.hpp"

namespace shcert {

// Bordered approximate inverse for the unfolding-parameter system: a scalar
// corner, border row/column over the pi^N representatives, and the bulk
// block, all in the X2-orthonormal coordinates (beta, sqrt(|Omega_0| K_n) u_n).
struct BorderedMatrix {
    Interval corner;
    std::vector<Interval> row;  // functional part (1,2)
    std::vector<Interval> col;  // column part (2,1)
    IntervalMatrix block;       // bulk (2,2)
};

namespace detail {

// ---- double-precision grids for the Newton inner loop ----------------------

struct MidGrid {
    int M = 0;
    bool cplx = false;
    std::vector<double> re, im;

    MidGrid() = default;
    MidGrid(int m, bool complex_parts) : M(m), cplx(complex_parts) {
        const std::size_t n = std::size_t(2 * m + 1) * std::size_t(2 * m + 1);
        re.assign(n, 0.0);
        if (cplx) im.assign(n, 0.0);
    }

    std::size_t idx(int m1, int m2) const {
        return std::size_t(m1 + M) * std::size_t(2 * M + 1) + std::size_t(m2 + M);
    }
    bool in_box(int m1, int m2) const { return std::abs(m1) <= M && std::abs(m2) <= M; }
    double re_at(int m1, int m2) const { return in_box(m1, m2) ? re[idx(m1, m2)] : 0.0; }
    double im_at(int m1, int m2) const {
        return (cplx && in_box(m1, m2)) ? im[idx(m1, m2)] : 0.0;
    }
};

inline MidGrid mid_grid(const SymSequence& u) {
    const FullGrid g = unfold(u);
    MidGrid m(g.M, g.has_im());
    for (std::size_t i = 0; i < g.re.size(); ++i) m.re[i] = g.re[i].mid();
    if (g.has_im())
        for (std::size_t i = 0; i < g.im.size(); ++i) m.im[i] = g.im[i].mid();
    return m;
}

inline MidGrid conv_mid(const MidGrid& a, const MidGrid& b, int m_out) {
    MidGrid r(m_out, a.cplx || b.cplx);
    for (int n1 = -m_out; n1 <= m_out; ++n1) {
        for (int n2 = -m_out; n2 <= m_out; ++n2) {
            double sre = 0.0, sim = 0.0;
            const int k1lo = std::max(-a.M, n1 - b.M), k1hi = std::min(a.M, n1 + b.M);
            const int k2lo = std::max(-a.M, n2 - b.M), k2hi = std::min(a.M, n2 + b.M);
            for (int k1 = k1lo; k1 <= k1hi; ++k1) {
                for (int k2 = k2lo; k2 <= k2hi; ++k2) {
                    const double ar = a.re[a.idx(k1, k2)];
                    const double ai = a.cplx ? a.im[a.idx(k1, k2)] : 0.0;
                    const double br = b.re[b.idx(n1 - k1, n2 - k2)];
                    const double bi = b.cplx ? b.im[b.idx(n1 - k1, n2 - k2)] : 0.0;
                    sre += ar * br - ai * bi;
                    sim += ar * bi + ai * br;
                }
            }
            r.re[r.idx(n1, n2)] = sre;
            if (r.cplx) r.im[r.idx(n1, n2)] = sim;
        }
    }
    return r;
}

// stored coordinate of a rep read straight off a grid (no symmetry check;
// inputs here are products of symmetric grids, symmetric up to roundoff)
inline double grid_coord(const MidGrid& g, const OrbitTable& t, std::size_t s) {
    const auto n = t.reps[s];
    if (!is_z2z1(t) || n[1] >= 0) return g.re_at(n[0], n[1]);
    return g.im_at(n[0], -n[1]);
}

inline SymSequence seq_from_mid(const MidGrid& g, std::shared_ptr<const OrbitTable> table,
                                double d) {
    SymSequence u(std::move(table), d);
    for (std::size_t s = 0; s < u.size(); ++s)
        u.entries[s] = Interval(grid_coord(g, *u.table, s));
    return u;
}

inline double symbol_l_mid(const SHParams& p, double d, const std::array<int, 2>& n) {
    const double pi = std::numbers::pi;
    const double f1 = double(n[0]) / (2.0 * d);
    const double f2 = double(n[1]) / (2.0 * d);
    const double q = 1.0 - 4.0 * pi * pi * (f1 * f1 + f2 * f2);
    return q * q + p.mu.mid();
}

// residual pi^{N0} F(U) in stored coordinates, plus its weighted l2 norm
inline std::vector<double> galerkin_residual(const SymSequence& U, const SHParams& p,
                                             double* norm_out) {
    const OrbitTable& t = *U.table;
    const int n0 = t.N;
    const MidGrid gu = mid_grid(U);
    const MidGrid g2 = conv_mid(gu, gu, 2 * n0);
    const MidGrid g3 = conv_mid(g2, gu, n0);
    const double nu1 = p.nu1.mid(), nu2 = p.nu2.mid();
    std::vector<double> f(t.size(), 0.0);
    double acc = 0.0;
    for (std::size_t s = 0; s < t.size(); ++s) {
        const double lu = symbol_l_mid(p, U.d, t.reps[s]) * grid_coord(gu, t, s);
        f[s] = lu + nu1 * grid_coord(g2, t, s) + nu2 * grid_coord(g3, t, s);
        acc += double(quad_weight(t, s)) * f[s] * f[s];
    }
    if (norm_out) *norm_out = std::sqrt(acc);
    return f;
}

// Orthonormalized Galerkin section of I + Conv(V0) L^{-1} at order N in
// midpoint arithmetic; same layout as conv_operator_matrix but in doubles,
// since the interval intermediate is wasteful at certification sizes.
inline Eigen::MatrixXd galerkin_section_mid(const SymSequence& V0, const SHParams& p,
                                            double d, int N) {
    const auto table = make_table(V0.group(), N);
    const OrbitTable& t = *table;
    const MidGrid ug = mid_grid(V0);
    const bool cplx = is_z2z1(t);
    const std::size_t n = t.size();
    const Eigen::Index dim = Eigen::Index(n);
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t col = 0; col < n; ++col) {
        const auto pts = slot_delta_points(t, col);
        const double linv = 1.0 / symbol_l_mid(p, d, t.reps[col]);
        const double invk = 1.0 / std::sqrt(double(quad_weight(t, col)));
        for (std::size_t row = 0; row < n; ++row) {
            const auto nr = t.reps[row];
            const bool want_im = cplx && nr[1] < 0;
            const std::array<int, 2> gidx = want_im ? std::array<int, 2>{nr[0], -nr[1]} : nr;
            double s = 0.0;
            for (const auto& pt : pts) {
                const double ur = ug.re_at(gidx[0] - pt.k[0], gidx[1] - pt.k[1]);
                const double ui = ug.im_at(gidx[0] - pt.k[0], gidx[1] - pt.k[1]);
                s += want_im ? (ur * pt.wim + ui * pt.wre) : (ur * pt.wre - ui * pt.wim);
            }
            const double ratio = std::sqrt(double(quad_weight(t, row))) * invk;
            m(Eigen::Index(row), Eigen::Index(col)) =
                (row == col ? 1.0 : 0.0) + ratio * s * linv;
        }
    }
    return m;
}

inline IntervalMatrix thin_matrix(const Eigen::MatrixXd& m) {
    IntervalMatrix r(std::size_t(m.rows()), std::size_t(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v)) throw decomposition_error("matrix inverse is not finite");
            r.at(std::size_t(i), std::size_t(j)) = Interval(v);
        }
    return r;
}

}  // namespace detail

// ---- initial guess ----------------------------------------------------------

// alpha * sum_k sech(beta |R_{2 pi k / j} x|); rotations preserve |x|, so the
// sum collapses to j * alpha * sech(beta |x|).  Fourier coefficients on
// Omega_0 by a midpoint-rule cosine transform, reduced to maximal_subgroup(j).
inline SymSequence initial_guess(int j, double alpha, double beta, double d, int N0) {
    if (j < 2) throw config_error("initial_guess requires j >= 2");
    if (!(d > 0.0)) throw config_error("initial_guess requires d > 0");
    if (N0 < 0) throw config_error("initial_guess requires N0 >= 0");
    const auto table = make_table(maximal_subgroup(j), N0);
    SymSequence u(table, d);
    if (alpha == 0.0) return u;

    const int S = std::max(4 * (N0 + 1), 64);
    std::vector<double> xs(S);
    for (int s = 0; s < S; ++s) xs[s] = -d + (double(s) + 0.5) * (2.0 * d / double(S));

    std::vector<double> g(std::size_t(S) * std::size_t(S));
    for (int s1 = 0; s1 < S; ++s1)
        for (int s2 = 0; s2 < S; ++s2) {
            const double r = std::hypot(xs[s1], xs[s2]);
            g[std::size_t(s1) * S + s2] = alpha * double(j) / std::cosh(beta * r);
        }

    // two-pass transform: A[s1][n2] then c[n1][n2], both plain cosine sums
    const double pi = std::numbers::pi;
    std::vector<double> amid(std::size_t(S) * std::size_t(N0 + 1));
    for (int s1 = 0; s1 < S; ++s1)
        for (int n2 = 0; n2 <= N0; ++n2) {
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                acc += g[std::size_t(s1) * S + s2] * std::cos(pi * n2 * xs[s2] / d);
            amid[std::size_t(s1) * (N0 + 1) + n2] = acc / double(S);
        }
    std::vector<double> c(std::size_t(N0 + 1) * std::size_t(N0 + 1));
    for (int n1 = 0; n1 <= N0; ++n1)
        for (int n2 = 0; n2 <= N0; ++n2) {
            double acc = 0.0;
            for (int s1 = 0; s1 < S; ++s1)
                acc += amid[std::size_t(s1) * (N0 + 1) + n2] * std::cos(pi * n1 * xs[s1] / d);
            c[std::size_t(n1) * (N0 + 1) + n2] = acc / double(S);
        }

    // the guess is even in both axes: e-basis coefficients equal the cosine
    // sums at |n1|, |n2|; odd-in-x2 slots of the order-2 group stay zero
    for (std::size_t s = 0; s < u.size(); ++s) {
        const auto n = u.table->reps[s];
        if (is_z2z1(*u.table) && n[1] < 0) continue;
        u.entries[s] = Interval(c[std::size_t(std::abs(n[0])) * (N0 + 1) + std::abs(n[1])]);
    }
    return u;
}

// ---- Newton on the Galerkin projection ---------------------------------------

// damped Newton for pi^{N0} F(U) = 0 on the table of U_init; the Jacobian
// section is L + Conv(2 nu1 U + 3 nu2 U*U).  Residual history is appended to
// *history when given and quoted in the non-convergence error.
inline SymSequence newton_galerkin(const SymSequence& U_init, const SHParams& p, double tol,
                                   int maxiter, std::vector<double>* history = nullptr) {
    validate_params(p);
    if (!(tol > 0.0)) throw config_error("newton_galerkin requires tol > 0");
    const OrbitTable& t = *U_init.table;
    const int n0 = t.N;
    SymSequence U = U_init;
    for (std::size_t s = 0; s < U.size(); ++s) U.entries[s] = Interval(U.entries[s].mid());

    std::vector<double> res_hist;
    double res = 0.0;
    std::vector<double> f = detail::galerkin_residual(U, p, &res);
    res_hist.push_back(res);

    int iter = 0;
    for (; iter < maxiter && res > tol; ++iter) {
        // V0 = 2 nu1 U + 3 nu2 U*U on the 2 N0 box, thin
        const detail::MidGrid gu = detail::mid_grid(U);
        detail::MidGrid v0g = detail::conv_mid(gu, gu, 2 * n0);
        const double nu1 = p.nu1.mid(), nu2 = p.nu2.mid();
        for (std::size_t i = 0; i < v0g.re.size(); ++i) v0g.re[i] *= 3.0 * nu2;
        if (v0g.cplx)
            for (std::size_t i = 0; i < v0g.im.size(); ++i) v0g.im[i] *= 3.0 * nu2;
        for (int m1 = -n0; m1 <= n0; ++m1)
            for (int m2 = -n0; m2 <= n0; ++m2) {
                v0g.re[v0g.idx(m1, m2)] += 2.0 * nu1 * gu.re_at(m1, m2);
                if (v0g.cplx) v0g.im[v0g.idx(m1, m2)] += 2.0 * nu1 * gu.im_at(m1, m2);
            }
        const SymSequence V0 =
            detail::seq_from_mid(v0g, make_table(U.group(), 2 * n0), U.d);

        // J in the orthonormalized basis: l(n~) on the diagonal plus the
        // convolution section; solve J dx = -sqrt(K) f
        Eigen::MatrixXd J = detail::galerkin_section_mid(V0, p, U.d, n0);
        Eigen::VectorXd rhs(Eigen::Index(t.size()));
        for (std::size_t s = 0; s < t.size(); ++s) {
            const double sk = std::sqrt(double(quad_weight(t, s)));
            J.col(Eigen::Index(s)) *= detail::symbol_l_mid(p, U.d, t.reps[s]);
            rhs(Eigen::Index(s)) = -sk * f[s];
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) throw decomposition_error("newton_galerkin: singular Jacobian");
        const double check = (J * dx - rhs).norm();
        if (!(check <= 1e-6 * (1.0 + rhs.norm())))
            throw decomposition_error("newton_galerkin: Jacobian solve failed");

        // step halving on residual increase
        double lambda = 1.0;
        SymSequence U_try = U;
        double res_try = res;
        std::vector<double> f_try;
        for (int h = 0; h <= 8; ++h) {
            U_try = U;
            for (std::size_t s = 0; s < t.size(); ++s) {
                const double sk = std::sqrt(double(quad_weight(t, s)));
                U_try.entries[s] =
                    Interval(U.entries[s].mid() + lambda * dx(Eigen::Index(s)) / sk);
            }
            f_try = detail::galerkin_residual(U_try, p, &res_try);
            if (res_try < res || h == 8) break;
            lambda *= 0.5;
        }
        U = U_try;
        f = f_try;
        res = res_try;
        res_hist.push_back(res);
    }
    if (history) history->insert(history->end(), res_hist.begin(), res_hist.end());
    if (res > tol) {
        std::ostringstream msg;
        msg << "newton_galerkin: no convergence after " << iter << " iterations; residuals:";
        for (double r : res_hist) msg << ' ' << r;
        throw iteration_error(msg.str());
    }
    return U;
}

// ---- trace projection ---------------------------------------------------------

namespace detail {

// Orthonormal basis of the per-line constraint space: the boundary value and
// the first three normal derivatives on an edge of the square reduce, for
// every frozen transverse index, to sum_n (-1)^n n^p coef_n = 0, p = 0..3.
inline std::vector<std::vector<double>> trace_line_basis(int n0, int* rank_out) {
    const int m = 2 * n0 + 1;
    std::vector<std::vector<double>> q;
    for (int pow = 0; pow < 4; ++pow) {
        std::vector<double> v(std::size_t(m), 0.0);
        for (int n = -n0; n <= n0; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            v[std::size_t(n + n0)] = sign * std::pow(double(n), double(pow));
        }
        double orig = 0.0;
        for (double x : v) orig += x * x;
        for (const auto& b : q) {
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += b[std::size_t(i)] * v[std::size_t(i)];
            for (int i = 0; i < m; ++i) v[std::size_t(i)] -= dot * b[std::size_t(i)];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        if (nrm <= 1e-24 * orig) continue;  // numerically dependent row: drop
        const double inv = 1.0 / std::sqrt(nrm);
        for (double& x : v) x *= inv;
        q.push_back(std::move(v));
    }
    if (rank_out) *rank_out = int(q.size());
    return q;
}

// (I - Q Q^T) along one axis of a coefficient plane
inline void project_lines(std::vector<double>& plane, int n0,
                          const std::vector<std::vector<double>>& q, bool along_rows) {
    const int m = 2 * n0 + 1;
    for (int fixed = 0; fixed < m; ++fixed) {
        for (const auto& b : q) {
            double dot = 0.0;
            for (int i = 0; i < m; ++i) {
                const std::size_t at = along_rows ? std::size_t(i) * m + fixed
                                                  : std::size_t(fixed) * m + i;
                dot += b[std::size_t(i)] * plane[at];
            }
            for (int i = 0; i < m; ++i) {
                const std::size_t at = along_rows ? std::size_t(i) * m + fixed
                                                  : std::size_t(fixed) * m + i;
                plane[at] -= dot * b[std::size_t(i)];
            }
        }
    }
}

// Group-plus-realness average read per orbit: like reduce() but averaging the
// orbit cells instead of checking they agree, for grids symmetric only up to
// floating-point roundoff.  Averaging against the unit-pattern cells (all of
// weight magnitude one) is the Euclidean projection onto the symmetric
// subspace, coordinate by coordinate.
inline SymSequence reduce_average(const MidGrid& g, std::shared_ptr<const OrbitTable> table,
                                  double d) {
    const OrbitTable& t = *table;
    SymSequence u(std::move(table), d);
    for (std::size_t s = 0; s < t.size(); ++s) {
        const auto pts = slot_delta_points(t, s);
        double acc = 0.0;
        for (const auto& p : pts)
            acc += p.wre * g.re_at(p.k[0], p.k[1]) + p.wim * g.im_at(p.k[0], p.k[1]);
        u.entries[s] = Interval(acc / double(pts.size()));
    }
    return u;
}

}  // namespace detail

// Euclidean projection of the unfolded coefficients onto the kernel of the
// boundary-jet trace map (vanishing value and first three normal derivatives
// on all four edges), followed by the group average.  The constraint space is
// C ox R^m + R^m ox C for a single four-dimensional line space C, so the
// orthogonal projector factorizes as (I - P_C) applied along each axis.
inline SymSequence trace_project(const SymSequence& U0, int* rank_out = nullptr) {
    const OrbitTable& t = *U0.table;
    if (!t.group.lattice_compatible) throw unsupported_error("trace_project: non-lattice group");
    const int n0 = t.N;

    int rank = 0;
    const auto q = detail::trace_line_basis(n0, &rank);
    if (rank < 4)
        std::cerr << "trace_project: constraint basis has numerical rank " << rank
                  << " < 4 on a line of length " << (2 * n0 + 1) << "\n";
    if (rank_out) *rank_out = rank;

    detail::MidGrid g = detail::mid_grid(U0);
    detail::project_lines(g.re, n0, q, true);
    detail::project_lines(g.re, n0, q, false);
    if (g.cplx) {
        detail::project_lines(g.im, n0, q, true);
        detail::project_lines(g.im, n0, q, false);
    }
    return detail::reduce_average(g, U0.table, U0.d);
}

// ---- symmetrization -----------------------------------------------------------

// w0 = (1/j) sum_k R_{2 pi k / j} u0 as a formal rotated sum; for j in {2,4}
// with the matching lattice group the rotations fix u0 and the sum collapses
inline RotatedSum symmetrize(const SymSequence& U0, int j) {
    if (j < 1) throw config_error("symmetrize requires j >= 1");
    RotatedSum w;
    w.base = U0;
    w.j = j;
    w.collapsed = (j == 1) || (j == 2 && U0.group().name == GroupName::D2) ||
                  (j == 4 && U0.group().name == GroupName::D4);
    return w;
}

// ---- approximate inverses -----------------------------------------------------

// floating inverse of pi^N (I + V0^N L^{-1}) pi^N in the orthonormalized
// basis, as a thin interval matrix
inline IntervalMatrix build_BN(const SymSequence& U0, const SHParams& p, int N) {
    validate_params(p);
    if (N > U0.N()) throw config_error("build_BN: N exceeds the candidate support");
    const LinearizationData lin = v0_and_W(U0, p, N);
    const Eigen::MatrixXd M = detail::galerkin_section_mid(lin.V0N, p, U0.d, N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    return detail::thin_matrix(lu.inverse());
}

// Bordered approximate inverse of the finite section of the unfolding system
// Q(0, U0) diag(1, L^{-1}) in the X2-orthonormal coordinates: both borders
// carry sqrt(|Omega_0| K_n) d_{x2} U0^N / rho and the corner of the section
// is zero.  rho <= 0 selects the default ||d_{x2} u0||_2 normalization.  A
// vanishing border leaves the scalar equation decoupled; the corner is then
// set to -1, the limit of the normalized system, so that U0 = 0 stays
// invertible instead of singular.
inline BorderedMatrix build_BN_bordered(const SymSequence& U0, const SHParams& p, int N,
                                        double rho = 0.0) {
    validate_params(p);
    if (!is_z2z1(*U0.table))
        throw unsupported_error("build_BN_bordered requires the order-2 group");
    if (N > U0.N()) throw config_error("build_BN_bordered: N exceeds the candidate support");

    const SymSequence dU = derivative_x2(U0);
    const double sqrt_omega = 2.0 * U0.d;
    if (!(rho > 0.0)) {
        rho = sqrt_omega * norm_2(dU).mid();
        if (!(rho > 0.0)) rho = 1.0;
    }

    const SymSequence dUN = project(dU, N, ProjectSide::inside);
    const auto table = make_table(U0.group(), N);
    const OrbitTable& t = *table;
    const std::size_t n = t.size();
    const Eigen::Index dim = Eigen::Index(n);
    Eigen::VectorXd g(dim);
    for (std::size_t s = 0; s < n; ++s) {
        const double sk = std::sqrt(double(quad_weight(t, s)));
        g(Eigen::Index(s)) = sqrt_omega * sk * dUN.at(t.reps[s]).mid() / rho;
    }

    const LinearizationData lin = v0_and_W(U0, p, N);
    const Eigen::MatrixXd M = detail::galerkin_section_mid(lin.V0N, p, U0.d, N);

    Eigen::MatrixXd A(dim + 1, dim + 1);
    A(0, 0) = (g.norm() == 0.0) ? -1.0 : 0.0;
    A.block(0, 1, 1, dim) = g.transpose();
    A.block(1, 0, dim, 1) = g;
    A.block(1, 1, dim, dim) = M;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd B = lu.inverse();
    if (!B.allFinite()) throw decomposition_error("build_BN_bordered: inversion failed");

    BorderedMatrix out;
    out.corner = Interval(B(0, 0));
    out.row.resize(n);
    out.col.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        out.row[s] = Interval(B(0, Eigen::Index(s + 1)));
        out.col[s] = Interval(B(Eigen::Index(s + 1), 0));
    }
    out.block = detail::thin_matrix(B.block(1, 1, Eigen::Index(n), Eigen::Index(n)));
    return out;
}

// ---- point evaluation (non-rigorous) -------------------------------------------

// midpoint evaluation of d^{p1}_{x1} d^{p2}_{x2} u at a point, straight from
// the unfolded coefficients; used for boundary and sample checks
inline double eval_partial_mid(const SymSequence& u, int p1, int p2, double x1, double x2) {
    const detail::MidGrid g = detail::mid_grid(u);
    const double pi = std::numbers::pi;
    const double w = pi / u.d;  // 2 pi n~ = pi n / d
    double acc = 0.0;
    for (int m1 = -g.M; m1 <= g.M; ++m1) {
        for (int m2 = -g.M; m2 <= g.M; ++m2) {
            const double cr = g.re_at(m1, m2);
            const double ci = g.im_at(m1, m2);
            if (cr == 0.0 && ci == 0.0) continue;
            // (i w m1)^{p1} (i w m2)^{p2} (cr + i ci) e^{i w (m1 x1 + m2 x2)}
            const double mag = std::pow(w * m1, p1) * std::pow(w * m2, p2);
            const double phase = w * (m1 * x1 + m2 * x2) + 0.5 * pi * double(p1 + p2);
            acc += mag * (cr * std::cos(phase) - ci * std::sin(phase));
        }
    }
    return acc;
}

}  // namespace shcert

#pragma once
// Dense interval matrices and the rigorous spectral-norm upper bound
// sqrt(norm1 * norminf), optionally sharpened by Gershgorin discs of M^T M.
// All reductions run in a fixed serial order so results are reproducible.

#include <cstddef>
#include <vector>

#include "shcert/interval.hpp"

namespace shcert {

struct IntervalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Interval> a;  // dense, row-major

    IntervalMatrix() = default;
    IntervalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    Interval& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Interval& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static IntervalMatrix identity(std::size_t n) {
        IntervalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Interval(1.0);
        return m;
    }

    IntervalMatrix transpose() const {
        IntervalMatrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }
};

inline IntervalMatrix operator+(const IntervalMatrix& x, const IntervalMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw shape_error("matrix add: shape mismatch");
    IntervalMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline IntervalMatrix operator-(const IntervalMatrix& x, const IntervalMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw shape_error("matrix sub: shape mismatch");
    IntervalMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline IntervalMatrix operator*(const IntervalMatrix& x, const IntervalMatrix& y) {
    if (x.cols != y.rows) throw shape_error("matrix mul: inner dimension mismatch");
    IntervalMatrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < y.cols; ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < x.cols; ++k) s += x.at(i, k) * y.at(k, j);
            r.at(i, j) = s;
        }
    }
    return r;
}

inline IntervalMatrix operator*(const Interval& c, const IntervalMatrix& y) {
    IntervalMatrix r(y.rows, y.cols);
    for (std::size_t i = 0; i < y.a.size(); ++i) r.a[i] = c * y.a[i];
    return r;
}

inline std::vector<Interval> matvec(const IntervalMatrix& m, const std::vector<Interval>& v) {
    if (m.cols != v.size()) throw shape_error("matvec: dimension mismatch");
    std::vector<Interval> r(m.rows, Interval(0.0));
    for (std::size_t i = 0; i < m.rows; ++i) {
        Interval s(0.0);
        for (std::size_t j = 0; j < m.cols; ++j) s += m.at(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

namespace detail {

// max over rows of the upward-rounded sum of entry magnitudes
inline double norm_inf_upper(const IntervalMatrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s = add_up(s, m.at(i, j).mag());
        best = std::max(best, s);
    }
    return best;
}

inline double norm_one_upper(const IntervalMatrix& m) {
    std::vector<double> col(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) col[j] = add_up(col[j], m.at(i, j).mag());
    double best = 0.0;
    for (double c : col) best = std::max(best, c);
    return best;
}

}  // namespace detail

// Upper bound on the spectral norm of every point matrix contained in M.
//
// Base bound: ||S||_2 <= sqrt(||S||_1 ||S||_inf).  With sharpen=true the
// bound is intersected with the Gershgorin estimate on M^T M: every
// eigenvalue of S^T S lies in a disc [G_ii - R_i, G_ii + R_i], so
// ||S||_2^2 <= max_i (G_ii + R_i).  The O(n^3) product makes sharpening
// optional.  The lower endpoint is an informative witness (largest certified
// column norm over all point matrices in M), never used by the proofs.
inline Interval mat_norm2_upper(const IntervalMatrix& m, bool sharpen = false) {
    using detail::add_down;
    using detail::add_up;
    using detail::mul_down;
    using detail::mul_up;
    if (m.rows == 0 || m.cols == 0) return Interval(0.0);

    double upper = detail::sqrt_up(mul_up(detail::norm_one_upper(m), detail::norm_inf_upper(m)));

    if (sharpen) {
        const IntervalMatrix g = m.transpose() * m;
        double lam = 0.0;
        for (std::size_t i = 0; i < g.cols; ++i) {
            double row = g.at(i, i).hi;
            for (std::size_t j = 0; j < g.cols; ++j)
                if (j != i) row = add_up(row, g.at(i, j).mag());
            lam = std::max(lam, row);
        }
        lam = std::max(lam, 0.0);  // S^T S is PSD, eigenvalues are nonnegative
        upper = std::min(upper, detail::sqrt_up(lam));
    }

    // witness: ||S e_j||_2 >= sqrt(sum_i mig^2) for every point matrix S in M
    double lower = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double g = m.at(i, j).mig();
            s = add_down(s, mul_down(g, g));
        }
        lower = std::max(lower, detail::sqrt_down(s));
    }
    lower = std::min(lower, upper);  // guard against crossing on degenerate input

    return Interval(lower, upper);
}

}  // namespace shcert

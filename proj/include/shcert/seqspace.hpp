#pragma once
// Symmetry-reduced sequence algebra: weighted norms, inner products,
// convolution via full-grid unfolding, projections, diagonal symbols, and
// convolution-operator matrices in the orthonormalized basis.
//
// Storage convention.  Entries are real intervals, one per orbit
// representative.  For D2/D4 every Fourier coefficient is real (reflection
// evenness in both axes plus reality), so an entry is the coefficient
// itself and the quadratic weight is alpha_n.  For the order-2 group
// ("Z2xZ1", even in x1 only) coefficients c_{(n1,n2)} with n2 != 0 are
// genuinely complex; reality ties c_{(n1,-n2)} = conj(c_{(n1,n2)}), so the
// representative pair (n1, +-n2) carries one complex number: the slot with
// n2 > 0 stores Re c_{(n1,n2)}, the slot with n2 < 0 stores Im c_{(n1,|n2|)}.
// The l2/inner-product weight is then K_n = alpha_n * (n2 == 0 ? 1 : 2), and
// the l1 norm pairs the two slots as 2 alpha sqrt(Re^2 + Im^2).  In function
// terms the Im slots are the sine-in-x2 coefficients.

#include <functional>
#include <memory>
#include <vector>

#include "shcert/interval_matrix.hpp"

#include "shcert/interval.hpp"
#include "shcert/symmetry.hpp"

namespace shcert {

struct SymSequence {
    std::shared_ptr<const OrbitTable> table;
    double d = 1.0;                 // domain half-width, Omega_0 = (-d, d)^2
    std::vector<Interval> entries;  // one per table rep

    SymSequence() = default;
    SymSequence(std::shared_ptr<const OrbitTable> t, double dd)
        : table(std::move(t)), d(dd), entries(table->size(), Interval(0.0)) {
        if (!(d > 0.0)) throw config_error("domain half-width must be positive");
    }

    const SymmetryGroup& group() const { return table->group; }
    int N() const { return table->N; }
    std::size_t size() const { return entries.size(); }

    Interval& at_slot(std::size_t s) { return entries[s]; }
    const Interval& at_slot(std::size_t s) const { return entries[s]; }

    // entry of the orbit containing n (n inside the truncation box)
    const Interval& at(const std::array<int, 2>& n) const { return entries[table->slot(n)]; }
};

inline std::shared_ptr<const OrbitTable> make_table(const SymmetryGroup& g, int N) {
    return std::make_shared<const OrbitTable>(reduced_index_set(g, N));
}

inline bool same_space(const SymSequence& a, const SymSequence& b) {
    return a.group().name == b.group().name && a.group().j == b.group().j &&
           a.table->N == b.table->N && a.d == b.d;
}

inline bool same_group_domain(const SymSequence& a, const SymSequence& b) {
    return a.group().name == b.group().name && a.group().j == b.group().j && a.d == b.d;
}

inline bool is_z2z1(const OrbitTable& t) { return t.group.name == GroupName::Z2xZ1; }

// quadratic weight K_n of a slot (see storage convention above)
inline int quad_weight(const OrbitTable& t, std::size_t s) {
    const int alpha = t.weights[s];
    if (is_z2z1(t) && t.reps[s][1] != 0) return 2 * alpha;
    return alpha;
}

// ---- linear arithmetic ----------------------------------------------------

inline SymSequence operator+(const SymSequence& a, const SymSequence& b) {
    if (!same_space(a, b)) throw shape_error("sequence add: space mismatch");
    SymSequence r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.entries[i] += b.entries[i];
    return r;
}

inline SymSequence operator-(const SymSequence& a, const SymSequence& b) {
    if (!same_space(a, b)) throw shape_error("sequence sub: space mismatch");
    SymSequence r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.entries[i] -= b.entries[i];
    return r;
}

inline SymSequence operator*(const Interval& c, const SymSequence& a) {
    SymSequence r = a;
    for (auto& e : r.entries) e = c * e;
    return r;
}

// ---- norms and inner products ---------------------------------------------

inline Interval norm_2(const SymSequence& u) {
    Interval s(0.0);
    for (std::size_t i = 0; i < u.size(); ++i)
        s += Interval(double(quad_weight(*u.table, i))) * sqr(u.entries[i]);
    return iv_sqrt(s);
}

inline Interval norm_1(const SymSequence& u) {
    const OrbitTable& t = *u.table;
    Interval s(0.0);
    if (!is_z2z1(t)) {
        for (std::size_t i = 0; i < u.size(); ++i)
            s += Interval(double(t.weights[i])) * iv_abs(u.entries[i]);
        return s;
    }
    // pair the (n1, +-n2) slots: alpha(|c| + |conj c|) = 2 alpha sqrt(Re^2+Im^2)
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto n = t.reps[i];
        if (n[1] < 0) continue;  // handled with its positive partner
        if (n[1] == 0) {
            s += Interval(double(t.weights[i])) * iv_abs(u.entries[i]);
            continue;
        }
        const std::size_t ip = t.slot({n[0], -n[1]});
        const Interval mod = iv_sqrt(sqr(u.entries[i]) + sqr(u.entries[ip]));
        s += Interval(2.0 * double(t.weights[i])) * mod;
    }
    return s;
}

inline Interval norm_p(const SymSequence& u, int p) {
    if (p == 1) return norm_1(u);
    if (p == 2) return norm_2(u);
    throw unsupported_error("norm_p supports p in {1,2}");
}

inline Interval inner2(const SymSequence& u, const SymSequence& v) {
    if (!same_space(u, v)) throw shape_error("inner2: space mismatch");
    Interval s(0.0);
    for (std::size_t i = 0; i < u.size(); ++i)
        s += Interval(double(quad_weight(*u.table, i))) * u.entries[i] * v.entries[i];
    return s;
}

// ---- full coefficient grids -----------------------------------------------

struct FullGrid {
    int M = 0;
    std::vector<Interval> re;  // (2M+1)^2 row-major, index (m1+M)*(2M+1)+(m2+M)
    std::vector<Interval> im;  // empty for grids known to be real

    FullGrid() = default;
    explicit FullGrid(int m, bool complex_parts = false) : M(m) {
        const std::size_t n = std::size_t(2 * m + 1) * std::size_t(2 * m + 1);
        re.assign(n, Interval(0.0));
        if (complex_parts) im.assign(n, Interval(0.0));
    }

    bool has_im() const { return !im.empty(); }
    bool in_box(int m1, int m2) const { return std::abs(m1) <= M && std::abs(m2) <= M; }
    std::size_t idx(int m1, int m2) const {
        return std::size_t(m1 + M) * std::size_t(2 * M + 1) + std::size_t(m2 + M);
    }

    Interval re_at(int m1, int m2) const { return in_box(m1, m2) ? re[idx(m1, m2)] : Interval(0.0); }
    Interval im_at(int m1, int m2) const {
        return (has_im() && in_box(m1, m2)) ? im[idx(m1, m2)] : Interval(0.0);
    }
};

inline FullGrid unfold(const SymSequence& u) {
    const OrbitTable& t = *u.table;
    if (!t.group.lattice_compatible) throw unsupported_error("unfold of non-lattice group");
    const bool cplx = is_z2z1(t);
    FullGrid g(t.N, cplx);
    for (int m1 = -t.N; m1 <= t.N; ++m1) {
        for (int m2 = -t.N; m2 <= t.N; ++m2) {
            if (!cplx) {
                g.re[g.idx(m1, m2)] = u.entries[t.slot({m1, m2})];
                continue;
            }
            const int a1 = std::abs(m1), a2 = std::abs(m2);
            g.re[g.idx(m1, m2)] = u.entries[t.slot({a1, a2})];
            if (m2 != 0) {
                const Interval b = u.entries[t.slot({a1, -a2})];
                g.im[g.idx(m1, m2)] = (m2 > 0) ? b : -b;
            }
        }
    }
    return g;
}

// Representative entries copied back from a grid; grid values at the other
// orbit members must be consistent enclosures (their intervals intersect the
// canonical one after the symmetry transformation), otherwise the input was
// not symmetric.
inline SymSequence reduce(const FullGrid& g, std::shared_ptr<const OrbitTable> table, double d) {
    const OrbitTable& t = *table;
    if (!t.group.lattice_compatible) throw unsupported_error("reduce of non-lattice group");
    if (g.M < t.N) throw shape_error("reduce: grid smaller than the table box");
    SymSequence u(std::move(table), d);
    const bool cplx = is_z2z1(t);
    for (std::size_t s = 0; s < t.size(); ++s) {
        const auto n = t.reps[s];
        if (!cplx) {
            u.entries[s] = g.re_at(n[0], n[1]);
            continue;
        }
        u.entries[s] = (n[1] >= 0) ? g.re_at(n[0], n[1]) : g.im_at(n[0], -n[1]);
    }
    // symmetry check within interval widths
    for (int m1 = -t.N; m1 <= t.N; ++m1) {
        for (int m2 = -t.N; m2 <= t.N; ++m2) {
            Interval want_re, want_im;
            if (!cplx) {
                want_re = u.entries[t.slot({m1, m2})];
                want_im = Interval(0.0);
            } else {
                const int a1 = std::abs(m1), a2 = std::abs(m2);
                want_re = u.entries[t.slot({a1, a2})];
                if (m2 == 0) {
                    want_im = Interval(0.0);
                } else {
                    const Interval b = u.entries[t.slot({a1, -a2})];
                    want_im = (m2 > 0) ? b : -b;
                }
            }
            if (!want_re.intersects(g.re_at(m1, m2)) || !want_im.intersects(g.im_at(m1, m2)))
                throw symmetry_error("grid is not symmetric under the claimed group");
        }
    }
    return u;
}

// direct O(M^4) interval convolution; complex-aware; fixed summation order
inline FullGrid convolve_grids(const FullGrid& a, const FullGrid& b, int m_out) {
    const bool cplx = a.has_im() || b.has_im();
    FullGrid r(m_out, cplx);
    for (int m1 = -m_out; m1 <= m_out; ++m1) {
        for (int m2 = -m_out; m2 <= m_out; ++m2) {
            Interval sre(0.0), sim(0.0);
            const int k1lo = std::max(-b.M, m1 - a.M), k1hi = std::min(b.M, m1 + a.M);
            const int k2lo = std::max(-b.M, m2 - a.M), k2hi = std::min(b.M, m2 + a.M);
            for (int k1 = k1lo; k1 <= k1hi; ++k1) {
                for (int k2 = k2lo; k2 <= k2hi; ++k2) {
                    const Interval ar = a.re[a.idx(m1 - k1, m2 - k2)];
                    const Interval br = b.re[b.idx(k1, k2)];
                    if (!cplx) {
                        sre += ar * br;
                        continue;
                    }
                    const Interval ai = a.im_at(m1 - k1, m2 - k2);
                    const Interval bi = b.im_at(k1, k2);
                    sre += ar * br - ai * bi;
                    sim += ar * bi + ai * br;
                }
            }
            r.re[r.idx(m1, m2)] = sre;
            if (cplx) r.im[r.idx(m1, m2)] = sim;
        }
    }
    return r;
}

inline SymSequence convolve(const SymSequence& u, const SymSequence& v, int out_order) {
    if (!same_group_domain(u, v)) throw shape_error("convolve: group/domain mismatch");
    if (out_order > u.N() + v.N())
        throw config_error("convolve: output order exceeds the support of the product");
    const FullGrid w = convolve_grids(unfold(u), unfold(v), out_order);
    return reduce(w, make_table(u.group(), out_order), u.d);
}

// ---- projections ------------------------------------------------------------

enum class ProjectSide { inside, outside };

// pi^N keeps the slots with |n1|, |n2| <= N (representatives of Z2xZ1 carry
// negative n2; the box is symmetric so membership is by absolute value)
inline SymSequence project(const SymSequence& u, int n_cut, ProjectSide side) {
    SymSequence r = u;
    for (std::size_t s = 0; s < u.size(); ++s) {
        const auto n = u.table->reps[s];
        const bool inside = std::abs(n[0]) <= n_cut && std::abs(n[1]) <= n_cut;
        if (inside != (side == ProjectSide::inside)) r.entries[s] = Interval(0.0);
    }
    return r;
}

// ---- diagonal symbols -------------------------------------------------------

using SymbolFn = std::function<Interval(const Interval&, const Interval&)>;

// entry n multiplied by sym(n/(2d)); the symbol must be invariant under the
// group action on frequencies (true for the radial symbols used here)
inline SymSequence apply_symbol(const SymSequence& u, const SymbolFn& sym) {
    SymSequence r = u;
    const Interval two_d = Interval(2.0) * Interval(u.d);
    for (std::size_t s = 0; s < u.size(); ++s) {
        const auto n = u.table->reps[s];
        const Interval f1 = Interval(double(n[0])) / two_d;
        const Interval f2 = Interval(double(n[1])) / two_d;
        r.entries[s] = u.entries[s] * sym(f1, f2);
    }
    return r;
}

// d/dx2 on the order-2 group: multiplies coefficient n by 2 pi i nt2, which in
// the Re/Im slot storage swaps the (n1, +-n2) pair with signs.  D2/D4
// sequences leave their symmetry class under d/dx2, so only Z2xZ1 is allowed.
inline SymSequence derivative_x2(const SymSequence& u) {
    if (!is_z2z1(*u.table)) throw unsupported_error("derivative_x2 requires the order-2 group");
    SymSequence r = u;
    const Interval two_d = Interval(2.0) * Interval(u.d);
    for (std::size_t s = 0; s < u.size(); ++s) {
        const auto n = u.table->reps[s];
        if (n[1] == 0) {
            r.entries[s] = Interval(0.0);
            continue;
        }
        const Interval factor = consts::two_pi() * Interval(double(std::abs(n[1]))) / two_d;
        const std::size_t partner = u.table->slot({n[0], -n[1]});
        // n2 > 0 slot: Re' = -2 pi nt2 Im; n2 < 0 slot: Im' = +2 pi nt2 Re
        r.entries[s] = (n[1] > 0) ? -factor * u.entries[partner] : factor * u.entries[partner];
    }
    return r;
}

// ---- convolution-operator matrix -------------------------------------------

namespace detail {

struct GridDelta {
    std::array<int, 2> k;
    double wre;
    double wim;
};

// the full-grid coefficient pattern of the slot's unit sequence
inline std::vector<GridDelta> slot_delta_points(const OrbitTable& t, std::size_t s) {
    std::vector<GridDelta> out;
    const auto n = t.reps[s];
    if (!is_z2z1(t)) {
        for (const auto& k : t.orbit_members[s]) out.push_back({k, 1.0, 0.0});
        return out;
    }
    if (n[1] == 0) {
        for (const auto& k : t.orbit_members[s]) out.push_back({k, 1.0, 0.0});
        return out;
    }
    // Re slot: c = 1 on orbit(n1,|n2|) and on its conjugate orbit;
    // Im slot: c = i on orbit(n1,|n2|), c = -i on the conjugate orbit
    const int a2 = std::abs(n[1]);
    const bool re_slot = n[1] > 0;
    const SymmetryGroup& g = t.group;
    for (const auto& k : orbit(g, {n[0], a2}))
        out.push_back({k, re_slot ? 1.0 : 0.0, re_slot ? 0.0 : 1.0});
    for (const auto& k : orbit(g, {n[0], -a2}))
        out.push_back({k, re_slot ? 1.0 : 0.0, re_slot ? 0.0 : -1.0});
    return out;
}

}  // namespace detail

// Matrix of the convolution operator (conv by U) restricted to the pi^N
// range, in the K_n-orthonormalized basis e_n/sqrt(K_n), so that
// mat_norm2_upper bounds the weighted l2 operator norm:
//   entry (m,n) = sqrt(K_m/K_n) * [stored coordinate m of U * e_n].
inline IntervalMatrix conv_operator_matrix(const SymSequence& u, int n_cut) {
    const OrbitTable& tu = *u.table;
    if (!tu.group.lattice_compatible)
        throw unsupported_error("conv operator of non-lattice group");
    const auto table = make_table(tu.group, n_cut);
    const OrbitTable& t = *table;
    const FullGrid ug = unfold(u);
    const bool cplx = is_z2z1(t);

    IntervalMatrix m(t.size(), t.size());
    for (std::size_t col = 0; col < t.size(); ++col) {
        const auto pts = detail::slot_delta_points(t, col);
        for (std::size_t row = 0; row < t.size(); ++row) {
            // stored coordinate `row` of the product reads Re or Im at a grid index
            const auto nr = t.reps[row];
            const bool want_im = cplx && nr[1] < 0;
            const std::array<int, 2> gidx =
                want_im ? std::array<int, 2>{nr[0], -nr[1]} : nr;
            Interval s(0.0);
            for (const auto& p : pts) {
                const int d1 = gidx[0] - p.k[0], d2 = gidx[1] - p.k[1];
                if (!ug.in_box(d1, d2)) continue;
                const Interval ur = ug.re_at(d1, d2);
                const Interval ui = ug.im_at(d1, d2);
                if (!want_im)
                    s += ur * Interval(p.wre) - ui * Interval(p.wim);
                else
                    s += ur * Interval(p.wim) + ui * Interval(p.wre);
            }
            const Interval ratio = iv_sqrt(Interval(double(quad_weight(t, row))) /
                                           Interval(double(quad_weight(t, col))));
            m.at(row, col) = ratio * s;
        }
    }
    return m;
}

// K-weighted orthonormal coordinates of a sequence (for matrix-vector checks
// and for norm computations through mat_norm2_upper conventions)
inline std::vector<Interval> ortho_coords(const SymSequence& u) {
    std::vector<Interval> v(u.size(), Interval(0.0));
    for (std::size_t s = 0; s < u.size(); ++s)
        v[s] = u.entries[s] * iv_sqrt(Interval(double(quad_weight(*u.table, s))));
    return v;
}

// full-grid weighted inner product Sum_m u_m conj(v_m) (real part); equals
// inner2 on the reduced representatives when both grids are symmetric
inline Interval inner2_grid(const FullGrid& a, const FullGrid& b) {
    const int m = std::min(a.M, b.M);
    Interval s(0.0);
    for (int m1 = -m; m1 <= m; ++m1)
        for (int m2 = -m; m2 <= m; ++m2) {
            s += a.re_at(m1, m2) * b.re_at(m1, m2);
            if (a.has_im() && b.has_im()) s += a.im_at(m1, m2) * b.im_at(m1, m2);
        }
    return s;
}

}  // namespace shcert

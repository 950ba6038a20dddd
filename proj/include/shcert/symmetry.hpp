#pragma once
// Square-lattice symmetry groups, their action on Fourier indices, orbits,
// and reduced index sets.
//
// Every group handled here is dihedral in structure: 2j elements
// { R_k, R_k S : k = 0..j-1 } with R_k the rotation by 2*pi*k/j and S the
// reflection x1 -> -x1.  The order-2 group acting only on x1 ("Z2xZ1") is
// the j = 1 case.  Groups with j in {1,2,4} act on the integer lattice by
// exact integer matrices; other rotation orders are kept as exact (k, j)
// angle labels and only ever enclosed by interval matrices on demand.
// All groups here have trivial translation part, so no phase factors are
// carried anywhere.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shcert/elementary.hpp"
#include "shcert/errors.hpp"
#include "shcert/interval.hpp"

namespace shcert {

enum class GroupName { Z2xZ1, D2, D4, Dj };

struct GroupElement {
    int k = 0;          // rotation index: action includes R_{2*pi*k/j}
    bool refl = false;  // true: element is R_k * S with S: x1 -> -x1
};

struct SymmetryGroup {
    GroupName name = GroupName::Z2xZ1;
    int j = 1;  // rotation order; |group| = 2j
    bool lattice_compatible = true;
    std::vector<GroupElement> elements;

    int order() const { return 2 * j; }

    // group law: (k1, r1)(k2, r2) = (k1 +/- k2 mod j, r1 xor r2),
    // from the dihedral relation S R_k = R_{-k} S
    GroupElement compose(const GroupElement& a, const GroupElement& b) const {
        int k = a.refl ? a.k - b.k : a.k + b.k;
        k %= j;
        if (k < 0) k += j;
        return GroupElement{k, a.refl != b.refl};
    }

    GroupElement inverse(const GroupElement& a) const {
        if (a.refl) return a;  // reflections are involutions
        return GroupElement{a.k == 0 ? 0 : j - a.k, false};
    }

    // exact integer matrix (row-major [m00,m01,m10,m11]); lattice groups only
    std::array<int, 4> int_matrix(const GroupElement& g) const {
        if (!lattice_compatible)
            throw unsupported_error("integer matrix requested for non-lattice group");
        // cos/sin of 2*pi*k/j for j in {1,2,4} are in {-1,0,1}
        const int quarter_turns = (4 / j) * g.k;  // angle as multiples of pi/2
        static constexpr int kCos[4] = {1, 0, -1, 0};
        static constexpr int kSin[4] = {0, 1, 0, -1};
        const int c = kCos[quarter_turns % 4];
        const int s = kSin[quarter_turns % 4];
        if (!g.refl) return {c, -s, s, c};
        return {-c, -s, -s, c};  // R_k * S
    }

    // rigorous interval matrix of the element's action (any rotation order)
    std::array<Interval, 4> iv_matrix(const GroupElement& g) const {
        if (lattice_compatible) {
            const auto m = int_matrix(g);
            return {Interval(double(m[0])), Interval(double(m[1])), Interval(double(m[2])),
                    Interval(double(m[3]))};
        }
        const Interval theta = rotation_angle(g.k);
        const Interval c = iv_cos(theta);
        const Interval s = iv_sin(theta);
        if (!g.refl) return {c, -s, s, c};
        return {-c, -s, -s, c};
    }

    // enclosure of 2*pi*k/j
    Interval rotation_angle(int k) const {
        return consts::two_pi() * Interval(double(k)) / Interval(double(j));
    }

    // action on a Fourier index (lattice groups only)
    std::array<int, 2> apply(const GroupElement& g, const std::array<int, 2>& n) const {
        const auto m = int_matrix(g);
        return {m[0] * n[0] + m[1] * n[1], m[2] * n[0] + m[3] * n[1]};
    }
};

inline std::string to_string(GroupName name) {
    switch (name) {
        case GroupName::Z2xZ1: return "Z2xZ1";
        case GroupName::D2: return "D2";
        case GroupName::D4: return "D4";
        case GroupName::Dj: return "Dj";
    }
    throw inconsistency_error("unknown group name");
}

namespace detail {

// finite verification of the group axioms and, on lattice groups, of the
// consistency of the matrix representation with the label-level group law
inline void verify_group(const SymmetryGroup& g) {
    const int n = int(g.elements.size());
    if (n != g.order()) throw inconsistency_error("group element count mismatch");
    auto find = [&](const GroupElement& e) {
        for (const auto& x : g.elements)
            if (x.k == e.k && x.refl == e.refl) return true;
        return false;
    };
    if (!find(GroupElement{0, false})) throw inconsistency_error("group misses identity");
    for (const auto& a : g.elements) {
        if (!find(g.inverse(a))) throw inconsistency_error("group misses an inverse");
        const auto ia = g.compose(g.inverse(a), a);
        if (ia.k != 0 || ia.refl) throw inconsistency_error("inverse law failed");
        for (const auto& b : g.elements) {
            const auto c = g.compose(a, b);
            if (!find(c)) throw inconsistency_error("group not closed");
            if (g.lattice_compatible) {
                const auto ma = g.int_matrix(a);
                const auto mb = g.int_matrix(b);
                const auto mc = g.int_matrix(c);
                const std::array<int, 4> prod = {
                    ma[0] * mb[0] + ma[1] * mb[2], ma[0] * mb[1] + ma[1] * mb[3],
                    ma[2] * mb[0] + ma[3] * mb[2], ma[2] * mb[1] + ma[3] * mb[3]};
                if (prod != mc)
                    throw inconsistency_error("matrix representation violates the group law");
            }
        }
    }
}

}  // namespace detail

inline SymmetryGroup build_group(GroupName name, int j_for_dj = 0) {
    SymmetryGroup g;
    g.name = name;
    switch (name) {
        case GroupName::Z2xZ1: g.j = 1; break;
        case GroupName::D2: g.j = 2; break;
        case GroupName::D4: g.j = 4; break;
        case GroupName::Dj:
            if (j_for_dj < 2) throw config_error("Dj requires j >= 2");
            g.j = j_for_dj;
            break;
    }
    g.lattice_compatible = (g.j == 1 || g.j == 2 || g.j == 4);
    for (int k = 0; k < g.j; ++k) g.elements.push_back(GroupElement{k, false});
    for (int k = 0; k < g.j; ++k) g.elements.push_back(GroupElement{k, true});
    detail::verify_group(g);
    return g;
}

// The maximal square-lattice space group fixing a j-fold pattern:
// D4 when 4 | j, D2 for the other even j, and the order-2 x1-reflection
// group for odd j (whose rotation content is not lattice-compatible).
inline SymmetryGroup maximal_subgroup(int j) {
    if (j < 2) throw config_error("maximal_subgroup requires j >= 2");
    if (j % 4 == 0) return build_group(GroupName::D4);
    if (j % 2 == 0) return build_group(GroupName::D2);
    return build_group(GroupName::Z2xZ1);
}

namespace detail {

inline bool in_canonical_region(const SymmetryGroup& g, const std::array<int, 2>& n) {
    switch (g.name) {
        case GroupName::Z2xZ1: return n[0] >= 0;
        case GroupName::D2: return n[0] >= 0 && n[1] >= 0;
        case GroupName::D4: return n[1] >= 0 && n[0] >= n[1];
        default: throw unsupported_error("canonical region of non-lattice group");
    }
}

}  // namespace detail

// exact orbit {g*n : g in group}, sorted lexicographically, duplicates removed
inline std::vector<std::array<int, 2>> orbit(const SymmetryGroup& g, const std::array<int, 2>& n) {
    if (!g.lattice_compatible) throw unsupported_error("orbit of non-lattice group");
    std::vector<std::array<int, 2>> out;
    for (const auto& e : g.elements) out.push_back(g.apply(e, n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// the orbit representative: lexicographically smallest member of the
// canonical region (deterministic serialization order)
inline std::array<int, 2> canonical_rep(const SymmetryGroup& g, const std::array<int, 2>& n) {
    const auto orb = orbit(g, n);
    for (const auto& m : orb)
        if (detail::in_canonical_region(g, m)) return m;  // orb is lex-sorted
    throw inconsistency_error("orbit does not meet the canonical region");
}

struct OrbitTable {
    SymmetryGroup group;
    int N = 0;
    std::vector<std::array<int, 2>> reps;
    std::vector<std::vector<std::array<int, 2>>> orbit_members;  // per rep
    std::vector<int> weights;                                    // alpha_n = |orbit|
    std::vector<int> slot_of_index;                              // dense (2N+1)^2 -> rep slot

    std::size_t size() const { return reps.size(); }

    bool in_box(const std::array<int, 2>& n) const {
        return std::abs(n[0]) <= N && std::abs(n[1]) <= N;
    }

    // rep slot of the orbit containing n; n must lie in [-N,N]^2
    std::size_t slot(const std::array<int, 2>& n) const {
        if (!in_box(n)) throw shape_error("index outside the truncation box");
        const int id = (n[0] + N) * (2 * N + 1) + (n[1] + N);
        const int s = slot_of_index[std::size_t(id)];
        if (s < 0) throw inconsistency_error("orbit table has an unmapped index");
        return std::size_t(s);
    }
};

inline OrbitTable reduced_index_set(const SymmetryGroup& g, int N) {
    if (!g.lattice_compatible) throw unsupported_error("reduced index set of non-lattice group");
    if (N < 0) throw config_error("truncation order must be nonnegative");
    OrbitTable t;
    t.group = g;
    t.N = N;
    const int w = 2 * N + 1;
    t.slot_of_index.assign(std::size_t(w) * std::size_t(w), -1);
    // orthogonal integer actions permute coordinates and signs, so the orbit
    // of a box index stays in the box and reps can be enumerated region-first
    for (int n1 = -N; n1 <= N; ++n1) {
        for (int n2 = -N; n2 <= N; ++n2) {
            const std::array<int, 2> n{n1, n2};
            if (!detail::in_canonical_region(g, n)) continue;
            if (canonical_rep(g, n) != n) continue;  // not the lex-smallest region member
            const auto orb = orbit(g, n);
            const int s = int(t.reps.size());
            t.reps.push_back(n);
            t.weights.push_back(int(orb.size()));
            for (const auto& m : orb)
                t.slot_of_index[std::size_t((m[0] + N) * w + (m[1] + N))] = s;
            t.orbit_members.push_back(orb);
        }
    }
    // partition check: every box index must be covered exactly once
    std::size_t covered = 0;
    for (int s : t.slot_of_index)
        if (s >= 0) ++covered;
    if (covered != t.slot_of_index.size())
        throw inconsistency_error("orbits do not cover the truncation box");
    return t;
}

}  // namespace shcert

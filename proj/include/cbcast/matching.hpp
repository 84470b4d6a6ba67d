#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbcast/distributions.hpp"
#include "cbcast/errors.hpp"
#include "cbcast/permutations.hpp"

namespace cbcast::matching {

using Cell = std::pair<int, int>;  // (row, col) = (w1' value, w2' value), 0-indexed

/// Matching instance: w1', w2', w1 uniform and independent, and
/// w2 = pi[w1'][w2'](w1) for a grid of permutations on [m].
struct MatchingInstance {
    int m, m1, m2;
    std::vector<std::vector<Permutation>> pi;  // m1 x m2

    MatchingInstance(int m_, int m1_, int m2_, std::vector<std::vector<Permutation>> pi_)
        : m(m_), m1(m1_), m2(m2_), pi(std::move(pi_)) {
        if (m < 1 || m1 < 1 || m2 < 1) throw InvariantError("grid sizes must be positive");
        if (int(pi.size()) != m1) throw InvariantError("permutation table has wrong row count");
        for (const auto& row : pi) {
            if (int(row.size()) != m2) throw InvariantError("permutation table has wrong column count");
            for (const auto& p : row)
                if (p.size() != m) throw InvariantError("permutation not on [m]");
        }
    }
};

/// Closed alternating path on the grid: consecutive cells share a row on odd
/// steps and a column on even steps (1-indexed step numbering, wrapping).
struct GridCycle {
    std::vector<Cell> cells;
};

inline void validate_cycle(const MatchingInstance& inst, const GridCycle& cyc) {
    const auto& v = cyc.cells;
    const size_t n = v.size();
    if (n < 4 || n % 2) throw InvalidCycle("cycle length must be even and at least 4");
    for (size_t i = 0; i < n; ++i) {
        const Cell& a = v[i];
        const Cell& b = v[(i + 1) % n];
        if (a.first < 0 || a.first >= inst.m1 || a.second < 0 || a.second >= inst.m2)
            throw InvalidCycle("cell outside grid");
        if (i % 2 == 0) {  // odd step: same row, different column
            if (a.first != b.first || a.second == b.second)
                throw InvalidCycle("odd step must stay in the row and change column");
        } else {
            if (a.second != b.second || a.first == b.first)
                throw InvalidCycle("even step must stay in the column and change row");
        }
    }
}

/// pi(a1,b1) ∘ pi(a2,b2)^-1 ∘ pi(a3,b3) ∘ ... ∘ pi(aN,bN)^-1, rightmost first.
inline Permutation induced_permutation(const MatchingInstance& inst, const GridCycle& cyc) {
    validate_cycle(inst, cyc);
    Permutation acc = Permutation::identity(inst.m);
    for (size_t i = 0; i < cyc.cells.size(); ++i) {
        const auto& [r, c] = cyc.cells[i];
        const Permutation& p = inst.pi[r][c];
        acc = compose(acc, i % 2 == 0 ? p : p.inverse());
    }
    return acc;
}

/// Visit every simple cycle (no repeated cell) through the given cells exactly
/// once, in deterministic order. Each cycle is produced in its canonical
/// description: it starts at its lexicographically smallest cell and takes a
/// row step first, which also quotients out rotations and reflections. Throws
/// CycleBudgetExceeded when more than `cap` cycles are found.
inline void for_each_cycle_in(std::vector<Cell> cells, uint64_t cap,
                              const std::function<bool(const GridCycle&)>& visit) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (cells.empty()) return;

    // cells sharing a row / a column, precomputed in lexicographic order
    std::map<int, std::vector<Cell>> by_row, by_col;
    for (const Cell& c : cells) {
        by_row[c.first].push_back(c);
        by_col[c.second].push_back(c);
    }

    int max_col = 0;
    for (const Cell& c : cells) max_col = std::max(max_col, c.second);
    const int stride = max_col + 1;
    auto flat = [stride](const Cell& c) { return c.first * stride + c.second; };

    struct Dfs {
        const std::function<bool(const GridCycle&)>& visit;
        std::map<int, std::vector<Cell>>& by_row;
        std::map<int, std::vector<Cell>>& by_col;
        std::function<int(const Cell&)> flat;
        uint64_t cap;
        uint64_t count = 0;
        bool stop = false;
        std::vector<Cell> path;
        std::vector<char> used;

        // parity: cells on the path so far; odd count => next step is a row
        // step (shares the row of the last cell).
        void run(const Cell& start) {
            if (stop) return;
            const Cell last = path.back();
            const bool row_step = path.size() % 2 == 1;
            if (!row_step && path.size() >= 4 && last.second == start.second) {
                if (++count > cap)
                    throw CycleBudgetExceeded("cycle enumeration exceeded budget");
                if (!visit(GridCycle{path})) {
                    stop = true;
                    return;
                }
            }
            const auto& candidates = row_step ? by_row[last.first] : by_col[last.second];
            for (const Cell& nxt : candidates) {
                if (stop) return;
                if (nxt <= start || nxt == last) continue;  // start stays minimal
                if (used[flat(nxt)]) continue;
                used[flat(nxt)] = 1;
                path.push_back(nxt);
                run(start);
                path.pop_back();
                used[flat(nxt)] = 0;
            }
        }
    };

    Dfs dfs{visit, by_row, by_col, flat, cap, 0, false, {}, {}};
    dfs.used.assign((cells.back().first + 1) * stride, 0);
    for (const Cell& start : cells) {
        if (dfs.stop) return;
        dfs.used[flat(start)] = 1;
        dfs.path = {start};
        dfs.run(start);
        dfs.used[flat(start)] = 0;
    }
}

inline void for_each_cycle(int m1, int m2, uint64_t cap,
                           const std::function<bool(const GridCycle&)>& visit) {
    std::vector<Cell> cells;
    for (int r = 0; r < m1; ++r)
        for (int c = 0; c < m2; ++c) cells.push_back({r, c});
    for_each_cycle_in(std::move(cells), cap, visit);
}

inline std::vector<GridCycle> enumerate_cycles(int m1, int m2, uint64_t cap = 1000000) {
    std::vector<GridCycle> out;
    for_each_cycle(m1, m2, cap, [&](const GridCycle& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

enum class StructureClass { Maximal, Minimal, Neither, NotMaximalUndetermined };

inline std::string to_string(StructureClass c) {
    switch (c) {
        case StructureClass::Maximal: return "maximal";
        case StructureClass::Minimal: return "minimal";
        case StructureClass::Neither: return "neither";
        default: return "not-maximal-undetermined";
    }
}

/// Standard-form bullet set and its cyclic translations. Cells are tracked
/// together with the translation (z1, z2) that produced them.
struct BulletSet {
    int m1, m2, z1, z2;
    std::vector<Cell> cells;  // sorted
};

namespace detail {

// Anchor row of column j in the standard form: the band cell below/right of
// the full first column. Equals j-1 when m1 >= m2; wraps otherwise.
inline int band_row(int j, int m1) { return (j - 1) % m1; }

}  // namespace detail

inline BulletSet standard_bullet_set(int m1, int m2) {
    std::vector<Cell> cells;
    for (int i = 0; i < m1; ++i) cells.push_back({i, 0});
    for (int j = 1; j < m2; ++j) cells.push_back({detail::band_row(j, m1), j});
    std::sort(cells.begin(), cells.end());
    return {m1, m2, 0, 0, std::move(cells)};
}

inline BulletSet translate(const BulletSet& bs, int z1, int z2) {
    std::vector<Cell> cells;
    for (const auto& [r, c] : bs.cells)
        cells.push_back({(r + z1) % bs.m1, (c + z2) % bs.m2});
    std::sort(cells.begin(), cells.end());
    return {bs.m1, bs.m2, (bs.z1 + z1) % bs.m1, (bs.z2 + z2) % bs.m2, std::move(cells)};
}

/// The m1+m2-1 translations whose bullet set contains `cell` (one per bullet
/// of the standard form, shifted onto the cell).
inline std::vector<BulletSet> acceptable_sets(int m1, int m2, const Cell& cell) {
    const BulletSet std_form = standard_bullet_set(m1, m2);
    std::vector<BulletSet> out;
    std::set<std::pair<int, int>> seen;
    for (const auto& [r, c] : std_form.cells) {
        const int z1 = ((cell.first - r) % m1 + m1) % m1;
        const int z2 = ((cell.second - c) % m2 + m2) % m2;
        if (seen.insert({z1, z2}).second) out.push_back(translate(std_form, z1, z2));
    }
    return out;
}

/// Permutation pair family with gamma_b ∘ delta_a = pi[a][b] on the bullet
/// cells. The gamma at the anchor column is the identity.
struct DeltaGammaScheme {
    BulletSet bullet;
    std::vector<Permutation> deltas;  // indexed by w1'
    std::vector<Permutation> gammas;  // indexed by w2'
};

inline DeltaGammaScheme build_delta_gamma(const MatchingInstance& inst, const BulletSet& bs) {
    const int m1 = inst.m1, m2 = inst.m2;
    const int anchor_col = bs.z2;
    std::vector<Permutation> deltas(m1, Permutation::identity(inst.m));
    std::vector<Permutation> gammas(m2, Permutation::identity(inst.m));
    // gamma at the anchor column is identity, so delta_i = pi[i][anchor].
    for (int i = 0; i < m1; ++i) deltas[i] = inst.pi[i][anchor_col];
    for (int j = 1; j < m2; ++j) {
        const int col = (bs.z2 + j) % m2;
        const int row = (detail::band_row(j, m1) + bs.z1) % m1;
        gammas[col] = compose(inst.pi[row][col], deltas[row].inverse());
    }
    return {bs, std::move(deltas), std::move(gammas)};
}

inline int encode_bullet(const DeltaGammaScheme& s, int w1p, int w1) {
    return s.deltas[w1p](w1);
}
inline int decode_user1(const DeltaGammaScheme& s, int sym, int w1p) {
    return s.deltas[w1p].inverse()(sym);
}
inline int decode_user2(const DeltaGammaScheme& s, int sym, int w2p) {
    return s.gammas[w2p](sym);
}

/// Maximality is decided by the O(m1·m2·m) factorization test: build the
/// delta/gamma family from the standard chain and check it reproduces the
/// whole table. Minimality needs the exhaustive cycle sweep, so it is subject
/// to the enumeration budget.
inline StructureClass classify(const MatchingInstance& inst, uint64_t cycle_cap = 1000000) {
    DeltaGammaScheme fam = build_delta_gamma(inst, standard_bullet_set(inst.m1, inst.m2));
    bool maximal = true;
    for (int i = 0; i < inst.m1 && maximal; ++i)
        for (int j = 0; j < inst.m2 && maximal; ++j)
            if (compose(fam.gammas[j], fam.deltas[i]) != inst.pi[i][j]) maximal = false;
    if (maximal) return StructureClass::Maximal;

    bool all_derangements = true;
    try {
        for_each_cycle(inst.m1, inst.m2, cycle_cap, [&](const GridCycle& cyc) {
            if (!induced_permutation(inst, cyc).is_derangement()) {
                all_derangements = false;
                return false;
            }
            return true;
        });
    } catch (const CycleBudgetExceeded&) {
        return StructureClass::NotMaximalUndetermined;
    }
    return all_derangements ? StructureClass::Minimal : StructureClass::Neither;
}

/// Capacity and optimal-cost bounds for a matching instance. The demand
/// numerator is 2·log2(m) (both users want one symbol of [m] per use).
struct MatchingBounds {
    StructureClass cls;
    double hstar_lb_bits;
    double hstar_ub_bits;
    double capacity_lb;
    double capacity_ub;
    bool tight;
    std::optional<double> hstar_bits;  // set when tight
};

inline MatchingBounds bounds(const MatchingInstance& inst, uint64_t cycle_cap = 1000000) {
    const double lg_m = std::log2(double(inst.m));
    const double gap =
        std::log2(double(inst.m1) * inst.m2) - std::log2(double(inst.m1 + inst.m2 - 1));
    MatchingBounds b;
    b.cls = classify(inst, cycle_cap);
    b.hstar_lb_bits = lg_m;
    b.hstar_ub_bits = lg_m + gap;
    b.capacity_ub = 2.0;
    b.capacity_lb = 2.0 * lg_m / (lg_m + gap);
    b.tight = b.cls == StructureClass::Maximal || b.cls == StructureClass::Minimal;
    if (b.cls == StructureClass::Maximal) b.hstar_bits = lg_m;
    if (b.cls == StructureClass::Minimal) b.hstar_bits = lg_m + gap;
    if (b.tight) {
        const double h = *b.hstar_bits;
        b.capacity_lb = b.capacity_ub = 2.0 * lg_m / h;
    }
    return b;
}

/// Single-use scheme for 4x3 grids: one selector bit names the diagonal-band
/// cell set or its complement, then delta_{w1'}(w1) is sent. Cost is
/// log2(m) + 1 bits and decoding is exact on the whole grid.
struct Scheme4x3 {
    std::vector<Cell> bullet_cells, circ_cells;
    std::vector<Permutation> bullet_deltas, bullet_gammas;
    std::vector<Permutation> circ_deltas, circ_gammas;

    bool in_bullet(int w1p, int w2p) const {
        return std::binary_search(bullet_cells.begin(), bullet_cells.end(), Cell{w1p, w2p});
    }
    std::pair<int, int> encode(int w1p, int w2p, int w1) const {
        if (in_bullet(w1p, w2p)) return {0, bullet_deltas[w1p](w1)};
        return {1, circ_deltas[w1p](w1)};
    }
    int decode1(int selector, int sym, int w1p) const {
        const auto& d = selector == 0 ? bullet_deltas : circ_deltas;
        return d[w1p].inverse()(sym);
    }
    int decode2(int selector, int sym, int w2p) const {
        const auto& g = selector == 0 ? bullet_gammas : circ_gammas;
        return g[w2p](sym);
    }
    static double cost_bits(int m) { return std::log2(double(m)) + 1.0; }
};

inline Scheme4x3 scheme_4x3(const MatchingInstance& inst) {
    if (inst.m1 != 4 || inst.m2 != 3) throw WrongShape("scheme_4x3 requires a 4x3 grid");
    const auto& pi = inst.pi;
    Scheme4x3 s;
    s.bullet_cells = {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 2}};
    s.circ_cells = {{0, 1}, {0, 2}, {1, 2}, {2, 0}, {3, 0}, {3, 1}};
    const Permutation id = Permutation::identity(inst.m);
    s.bullet_deltas.assign(4, id);
    s.bullet_gammas.assign(3, id);
    s.circ_deltas.assign(4, id);
    s.circ_gammas.assign(3, id);

    // Band chain: gamma1 = id; delta1, delta2 from column 1; gamma2 = pi22 d2^-1;
    // delta3 = g2^-1 pi32; gamma3 = pi33 d3^-1; delta4 = g3^-1 pi43.
    s.bullet_deltas[0] = pi[0][0];
    s.bullet_deltas[1] = pi[1][0];
    s.bullet_gammas[1] = compose(pi[1][1], s.bullet_deltas[1].inverse());
    s.bullet_deltas[2] = compose(s.bullet_gammas[1].inverse(), pi[2][1]);
    s.bullet_gammas[2] = compose(pi[2][2], s.bullet_deltas[2].inverse());
    s.bullet_deltas[3] = compose(s.bullet_gammas[2].inverse(), pi[3][2]);

    // Complement chain: gamma1 = id; delta3, delta4 from column 1;
    // gamma2 = pi42 d4^-1; delta1 = g2^-1 pi12; gamma3 = pi13 d1^-1;
    // delta2 = g3^-1 pi23.
    s.circ_deltas[2] = pi[2][0];
    s.circ_deltas[3] = pi[3][0];
    s.circ_gammas[1] = compose(pi[3][1], s.circ_deltas[3].inverse());
    s.circ_deltas[0] = compose(s.circ_gammas[1].inverse(), pi[0][1]);
    s.circ_gammas[2] = compose(pi[0][2], s.circ_deltas[0].inverse());
    s.circ_deltas[1] = compose(s.circ_gammas[2].inverse(), pi[1][2]);
    return s;
}

/// Per-broadcast-value feasibility audit of a single-use deterministic
/// encoder. For every broadcast value, the set of side-information cells that
/// can produce it must not contain a cycle whose induced permutation is a
/// derangement; on minimally structured instances the cell count is also
/// checked against m1+m2-1.
struct FeasibleSetReport {
    struct Entry {
        long long value;
        std::vector<Cell> cells;
        bool derangement_cycle;
        bool size_violation;
    };
    std::vector<Entry> entries;
    bool derangement_free = true;
    bool sizes_ok = true;
    size_t max_feasible = 0;
    bool size_cap_checked = false;

    bool pass() const { return derangement_free && sizes_ok; }
};

inline bool subset_has_derangement_cycle(const MatchingInstance& inst,
                                         const std::vector<Cell>& cells, uint64_t cap = 100000) {
    bool found = false;
    for_each_cycle_in(cells, cap, [&](const GridCycle& cyc) {
        if (induced_permutation(inst, cyc).is_derangement()) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

inline FeasibleSetReport feasible_set_check(
    const MatchingInstance& inst, const std::function<long long(int w1, int w1p, int w2p)>& encoder,
    uint64_t cycle_cap = 1000000) {
    FeasibleSetReport rep;
    rep.size_cap_checked = classify(inst, cycle_cap) == StructureClass::Minimal;
    std::map<long long, std::set<Cell>> feasible;
    for (int a = 0; a < inst.m1; ++a)
        for (int b = 0; b < inst.m2; ++b)
            for (int w1 = 0; w1 < inst.m; ++w1) feasible[encoder(w1, a, b)].insert({a, b});
    for (const auto& [value, cellset] : feasible) {
        FeasibleSetReport::Entry e;
        e.value = value;
        e.cells.assign(cellset.begin(), cellset.end());
        e.derangement_cycle = subset_has_derangement_cycle(inst, e.cells, cycle_cap);
        e.size_violation =
            rep.size_cap_checked && int(e.cells.size()) > inst.m1 + inst.m2 - 1;
        rep.max_feasible = std::max(rep.max_feasible, e.cells.size());
        rep.derangement_free = rep.derangement_free && !e.derangement_cycle;
        rep.sizes_ok = rep.sizes_ok && !e.size_violation;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

/// Exact uniform-atom pmf of the instance (m·m1·m2 atoms).
inline dist::GeneralCBInstance to_general(const MatchingInstance& inst) {
    const uint64_t n_atoms = uint64_t(inst.m) * inst.m1 * inst.m2;
    if (n_atoms > 1000000) throw TooLarge("to_general: m*m1*m2 exceeds 10^6");
    std::array<std::vector<std::string>, 4> alphabets;
    for (int v = 0; v < inst.m; ++v) {
        alphabets[0].push_back(std::to_string(v));
        alphabets[2].push_back(std::to_string(v));
    }
    for (int v = 0; v < inst.m1; ++v) alphabets[1].push_back(std::to_string(v));
    for (int v = 0; v < inst.m2; ++v) alphabets[3].push_back(std::to_string(v));
    std::vector<dist::Atom> atoms;
    atoms.reserve(n_atoms);
    const Rational p(BigInt(1), BigInt(n_atoms));
    for (int a = 0; a < inst.m1; ++a)
        for (int b = 0; b < inst.m2; ++b)
            for (int w1 = 0; w1 < inst.m; ++w1)
                atoms.push_back({{w1, a, inst.pi[a][b](w1), b}, p});
    return dist::GeneralCBInstance(std::move(alphabets), std::move(atoms));
}

}  // namespace cbcast::matching

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cbcast/distributions.hpp"
#include "cbcast/errors.hpp"
#include "cbcast/rational.hpp"

namespace cbcast::oracle {

/// Decodability conflicts of a single-use deterministic encoder: two support
/// tuples must get distinct broadcast values iff they agree on w1' but differ
/// on w1, or agree on w2' but differ on w2.
struct ConflictInstance {
    std::vector<Rational> probs;
    std::vector<std::pair<int, int>> conflicts;  // i < j
    size_t atom_count() const { return probs.size(); }
};

inline ConflictInstance build_conflicts(const dist::GeneralCBInstance& inst) {
    const auto& atoms = inst.atoms();
    if (atoms.size() > 4096) throw TooLarge("build_conflicts: more than 4096 support atoms");
    ConflictInstance ci;
    ci.probs.reserve(atoms.size());
    for (const auto& a : atoms) ci.probs.push_back(a.p);
    for (size_t i = 0; i < atoms.size(); ++i)
        for (size_t j = i + 1; j < atoms.size(); ++j) {
            const auto& a = atoms[i].v;
            const auto& b = atoms[j].v;
            if ((a[1] == b[1] && a[0] != b[0]) || (a[3] == b[3] && a[2] != b[2]))
                ci.conflicts.push_back({int(i), int(j)});
        }
    return ci;
}

struct ColoringResult {
    std::vector<int> colors;  // per atom, classes numbered in order of first use
    double h_bits = 0;
    bool optimal = false;
    bool budget_exceeded = false;
    uint64_t nodes = 0;
};

struct SearchOptions {
    uint64_t node_budget = 50000000;
    /// A proven lower bound on H(S) in bits (e.g. the converse denominator);
    /// reaching it certifies optimality early.
    std::optional<double> known_lower_bound;
};

namespace detail {

// Largest conflict-free atom set; bounds any color class size. Exact search
// with a node cap, falling back to n.
inline int max_class_size(int n, const std::vector<uint64_t>& adj) {
    int best = 1;
    uint64_t nodes = 0;
    const uint64_t cap = 2000000;
    std::vector<std::pair<uint64_t, int>> stack;  // (candidate set, chosen count)
    stack.push_back({(n == 64 ? ~0ull : ((1ull << n) - 1)), 0});
    while (!stack.empty()) {
        if (++nodes > cap) return n;
        auto [cand, count] = stack.back();
        stack.pop_back();
        if (count + std::popcount(cand) <= best) continue;
        if (!cand) {
            best = std::max(best, count);
            continue;
        }
        const int v = std::countr_zero(cand);
        stack.push_back({cand & ~(1ull << v), count});          // skip v
        stack.push_back({cand & ~(1ull << v) & ~adj[v], count + 1});  // take v
        best = std::max(best, count + 1);
    }
    return best;
}

struct Search {
    int n;
    int cap;  // max atoms per class
    std::vector<uint64_t> adj;
    std::vector<Rational> probs;
    std::vector<double> probs_d;  // sorted-desc copy is rebuilt per node suffix
    SearchOptions opts;

    std::vector<uint64_t> class_mask;
    std::vector<Rational> class_prob;
    std::vector<double> class_prob_d;
    std::vector<int> assignment;

    double best_h = 0;
    std::vector<int> best_assignment;
    bool have_best = false;
    bool budget_hit = false;
    uint64_t nodes = 0;

    // Admissible lower bound on the entropy of any completion from atom k on:
    // a fictitious distribution whose prefix sums dominate every completion
    // (top classes each absorb up to `cap` of the largest unassigned atoms).
    double lower_bound(int k) const {
        std::vector<double> q = class_prob_d;
        std::sort(q.begin(), q.end(), std::greater<>());
        std::vector<double> rest(probs_d.begin() + k, probs_d.end());
        // probs_d is in assignment order; sort the suffix descending.
        std::sort(rest.begin(), rest.end(), std::greater<>());
        double h = 0, mass_left = 1.0;
        size_t ri = 0;
        for (size_t ci = 0; mass_left > 1e-15; ++ci) {
            double d = ci < q.size() ? q[ci] : 0.0;
            for (int t = 0; t < cap && ri < rest.size(); ++t) d += rest[ri++];
            if (d <= 0) break;
            d = std::min(d, mass_left);
            h -= d * std::log2(d);
            mass_left -= d;
        }
        return h;
    }

    double leaf_entropy() const {
        double h = 0;
        for (const auto& p : class_prob) h += entropy_term(p);
        return h;
    }

    bool certified() const {
        return have_best && opts.known_lower_bound &&
               best_h <= *opts.known_lower_bound + 1e-9;
    }

    void dfs(int k) {
        if (budget_hit || certified()) return;
        if (++nodes > opts.node_budget) {
            budget_hit = true;
            return;
        }
        if (k == n) {
            const double h = leaf_entropy();
            if (!have_best || h < best_h - 1e-12) {
                best_h = h;
                best_assignment = assignment;
                have_best = true;
            }
            return;
        }
        if (have_best && lower_bound(k) >= best_h - 1e-12) return;

        const uint64_t bit = 1ull << k;
        for (size_t c = 0; c < class_mask.size(); ++c) {
            if (class_mask[c] & adj[k]) continue;
            class_mask[c] |= bit;
            class_prob[c] += probs[k];
            class_prob_d[c] += probs_d[k];
            assignment[k] = int(c);
            dfs(k + 1);
            class_mask[c] &= ~bit;
            class_prob[c] = class_prob[c] - probs[k];
            class_prob_d[c] -= probs_d[k];
            if (budget_hit || certified()) return;
        }
        class_mask.push_back(bit);
        class_prob.push_back(probs[k]);
        class_prob_d.push_back(probs_d[k]);
        assignment[k] = int(class_mask.size()) - 1;
        dfs(k + 1);
        class_mask.pop_back();
        class_prob.pop_back();
        class_prob_d.pop_back();
    }
};

}  // namespace detail

/// Exact minimum-entropy conflict-respecting coloring. The search walks
/// restricted-growth assignments depth first, so the first optimum found is
/// the lexicographically smallest one; pruning keeps equal-value latecomers
/// out. Returns optimal=false (with the best coloring found) if the node
/// budget runs out.
inline ColoringResult min_entropy_coloring(const ConflictInstance& ci,
                                           const SearchOptions& opts = {}) {
    const int n = int(ci.atom_count());
    if (n == 0) return {{}, 0.0, true, false, 0};
    if (n > 64) throw TooLarge("min_entropy_coloring: more than 64 atoms");

    std::vector<uint64_t> adj(n, 0);
    for (auto [i, j] : ci.conflicts) {
        adj[i] |= 1ull << j;
        adj[j] |= 1ull << i;
    }

    if (ci.conflicts.empty()) {
        // everything fits in one class
        return {std::vector<int>(n, 0), 0.0, true, false, 1};
    }

    detail::Search s;
    s.n = n;
    s.adj = adj;
    s.probs = ci.probs;
    for (const auto& p : ci.probs) s.probs_d.push_back(p.to_double());
    s.cap = detail::max_class_size(n, adj);
    s.opts = opts;
    s.assignment.assign(n, -1);
    s.dfs(0);

    ColoringResult res;
    res.colors = s.best_assignment;
    res.h_bits = s.best_h;
    res.nodes = s.nodes;
    res.budget_exceeded = s.budget_hit;
    res.optimal = !s.budget_hit || s.certified();
    return res;
}

/// Best single-use rate R*_1 = H(w1,w2)/h_bits, with the gap to the converse
/// capacity bound (positive gap demonstrates multi-letter gain).
struct L1Report {
    ColoringResult coloring;
    dist::BoundsReport converse;
    double h_bits;
    double rstar1;
    double capacity_gap;  // capacity_ub - rstar1
};

inline L1Report brute_capacity_L1(const dist::GeneralCBInstance& inst,
                                  const SearchOptions& opts_in = {}) {
    dist::BoundsReport conv = dist::converse_bound(inst);
    SearchOptions opts = opts_in;
    if (!opts.known_lower_bound) opts.known_lower_bound = conv.converse_cost_lb_bits;
    ColoringResult col = min_entropy_coloring(build_conflicts(inst), opts);
    L1Report rep{std::move(col), conv, 0, 0, 0};
    rep.h_bits = rep.coloring.h_bits;
    if (conv.degenerate_demand) throw DegenerateDemand("H(w1,w2) = 0: rate undefined");
    rep.rstar1 = conv.h_w1w2_bits / rep.h_bits;
    rep.capacity_gap = conv.capacity_ub.value_or(rep.rstar1) - rep.rstar1;
    return rep;
}

}  // namespace cbcast::oracle

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbcast/errors.hpp"
#include "cbcast/gf_linalg.hpp"
#include "cbcast/rational.hpp"

namespace cbcast::dist {

/// Variable subsets are 4-bit masks in the fixed order (w1, w1p, w2, w2p).
enum VarBit : unsigned { W1 = 1, W1P = 2, W2 = 4, W2P = 8 };
constexpr unsigned kAllVars = 15;

inline const char* var_name(int i) {
    static const char* names[4] = {"w1", "w1p", "w2", "w2p"};
    return names[i];
}

struct Atom {
    std::array<int, 4> v;  // indices into the four alphabets
    Rational p;
};

/// Joint distribution of (w1, w1p, w2, w2p) over finite label alphabets with
/// exact rational probabilities. Zero-probability atoms are rejected.
class GeneralCBInstance {
  public:
    GeneralCBInstance(std::array<std::vector<std::string>, 4> alphabets, std::vector<Atom> atoms)
        : alphabets_(std::move(alphabets)), atoms_(std::move(atoms)) {
        validate();
    }

    const std::array<std::vector<std::string>, 4>& alphabets() const { return alphabets_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double l_max() const {
        double m = 0;
        for (const auto& a : alphabets_) m = std::max(m, std::log2(double(a.size())));
        return m;
    }

  private:
    void validate() const {
        for (int k = 0; k < 4; ++k)
            if (alphabets_[k].empty())
                throw InvariantError(std::string("empty alphabet for ") + var_name(k));
        Rational total(0);
        std::map<std::array<int, 4>, bool> seen;
        std::array<std::vector<bool>, 4> used;
        for (int k = 0; k < 4; ++k) used[k].assign(alphabets_[k].size(), false);
        for (const auto& a : atoms_) {
            if (!a.p.positive()) throw InvariantError("atom probability must be positive");
            for (int k = 0; k < 4; ++k) {
                if (a.v[k] < 0 || size_t(a.v[k]) >= alphabets_[k].size())
                    throw InvariantError("atom value outside alphabet");
                used[k][a.v[k]] = true;
            }
            if (seen.count(a.v)) throw InvariantError("duplicate support tuple");
            seen[a.v] = true;
            total += a.p;
        }
        if (total != Rational(1))
            throw InvariantError("pmf must sum to 1, got " + total.str());
        for (int k = 0; k < 4; ++k)
            for (size_t i = 0; i < used[k].size(); ++i)
                if (!used[k][i])
                    throw InvariantError(std::string("unused alphabet label for ") + var_name(k) +
                                         ": " + alphabets_[k][i]);
    }

    std::array<std::vector<std::string>, 4> alphabets_;
    std::vector<Atom> atoms_;
};

/// H of the marginal on the variables in `mask`, in bits. Exact rational
/// marginalization, entropy evaluated in double precision.
inline double entropy(const GeneralCBInstance& inst, unsigned mask) {
    if ((mask & kAllVars) == 0) return 0.0;
    std::map<std::array<int, 4>, Rational> marg;
    for (const auto& a : inst.atoms()) {
        std::array<int, 4> key{-1, -1, -1, -1};
        for (int k = 0; k < 4; ++k)
            if (mask & (1u << k)) key[k] = a.v[k];
        auto it = marg.find(key);
        if (it == marg.end())
            marg.emplace(key, a.p);
        else
            it->second += a.p;
    }
    double h = 0;
    for (const auto& [k, p] : marg) h += entropy_term(p);
    return h;
}

inline double cond_entropy(const GeneralCBInstance& inst, unsigned a, unsigned given) {
    return entropy(inst, a | given) - entropy(inst, given);
}

/// I(A;B|C) = H(A|C) + H(B|C) - H(A,B|C).
inline double mutual_info(const GeneralCBInstance& inst, unsigned a, unsigned b,
                          unsigned given = 0) {
    return entropy(inst, a | given) + entropy(inst, b | given) - entropy(inst, a | b | given) -
           entropy(inst, given);
}

/// All 15 nonempty subset entropies, indexed by mask. h[0] = 0.
struct EntropyProfile {
    std::array<double, 16> h{};
};

inline EntropyProfile entropy_profile(const GeneralCBInstance& inst) {
    EntropyProfile prof;
    for (unsigned mask = 1; mask <= kAllVars; ++mask) prof.h[mask] = entropy(inst, mask);
    return prof;
}

struct BoundsReport {
    double h_w1w2_bits = 0;
    double converse_cost_lb_bits = 0;
    std::optional<double> capacity_ub;
    std::optional<double> achiev_cost_ub_bits;
    std::optional<double> capacity_lb;
    bool tight = false;
    bool degenerate_demand = false;
};

/// General converse: broadcast cost is at least
///   H(w1|w1') + H(w2|w2') - min( I(w1; w2,w2'|w1'), I(w2; w1,w1'|w2') ),
/// equivalently the larger of the two genie bounds
///   H(w1|w1') + H(w2|w1,w1',w2')   and   H(w2|w2') + H(w1|w2,w2',w1').
inline BoundsReport converse_bound(const GeneralCBInstance& inst) {
    BoundsReport rep;
    rep.h_w1w2_bits = entropy(inst, W1 | W2);
    const double h1 = cond_entropy(inst, W1, W1P);
    const double h2 = cond_entropy(inst, W2, W2P);
    const double i1 = mutual_info(inst, W1, W2 | W2P, W1P);
    const double i2 = mutual_info(inst, W2, W1 | W1P, W2P);
    double denom = h1 + h2 - std::min(i1, i2);
    denom = std::max({denom, h1, h2, 0.0});
    rep.converse_cost_lb_bits = denom;
    if (rep.h_w1w2_bits <= 1e-12) {
        rep.degenerate_demand = true;
        rep.converse_cost_lb_bits = 0;
        return rep;
    }
    rep.capacity_ub = rep.h_w1w2_bits / denom;
    return rep;
}

/// Exhaustive uniform-X enumeration of a linear instance into an exact pmf.
/// Guarded at p^m <= 2^20; intended for desk-scale cross-validation.
template <typename LinearInstance>
GeneralCBInstance from_linear(const LinearInstance& lin) {
    const uint64_t p = lin.field.p();
    const size_t m = lin.m;
    uint64_t total = 1;
    for (size_t i = 0; i < m; ++i) {
        total *= p;
        if (total > (1u << 20)) throw TooLarge("from_linear: p^m exceeds 2^20");
    }
    const gf::FieldMatrix* vs[4] = {&lin.v1, &lin.v1p, &lin.v2, &lin.v2p};

    // Encode each projected value vector as a label string.
    auto label_of = [&](const gf::FieldMatrix& v, const std::vector<uint32_t>& x) {
        std::string s;
        for (size_t j = 0; j < v.cols(); ++j) {
            uint64_t acc = 0;
            for (size_t i = 0; i < m; ++i) acc += uint64_t(x[i]) * v.at(i, j);
            s += std::to_string(acc % p);
            s += ',';
        }
        return s;
    };

    std::array<std::map<std::string, int>, 4> label_ids;
    std::array<std::vector<std::string>, 4> alphabets;
    std::map<std::array<int, 4>, uint64_t> counts;
    std::vector<uint32_t> x(m, 0);
    for (uint64_t it = 0; it < total; ++it) {
        std::array<int, 4> key;
        for (int k = 0; k < 4; ++k) {
            std::string lab = label_of(*vs[k], x);
            auto [pos, inserted] = label_ids[k].emplace(lab, int(alphabets[k].size()));
            if (inserted) alphabets[k].push_back(lab);
            key[k] = pos->second;
        }
        ++counts[key];
        for (size_t i = 0; i < m; ++i) {
            if (++x[i] < p) break;
            x[i] = 0;
        }
    }
    std::vector<Atom> atoms;
    atoms.reserve(counts.size());
    for (const auto& [key, c] : counts)
        atoms.push_back({key, Rational(BigInt(c), BigInt(total))});
    return GeneralCBInstance(std::move(alphabets), std::move(atoms));
}

}  // namespace cbcast::dist

#pragma once

#include <vector>

#include "cbcast/binning_sim.hpp"
#include "cbcast/distributions.hpp"
#include "cbcast/instances.hpp"
#include "cbcast/lcb_solver.hpp"
#include "cbcast/matching.hpp"
#include "cbcast/oracle.hpp"
#include "cbcast/rng.hpp"

namespace th {

using namespace cbcast;

inline gf::FieldMatrix random_matrix(gf::PrimeField f, size_t rows, size_t cols, Rng& rng) {
    gf::FieldMatrix m(f, rows, cols);
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) m.at(i, j) = uint16_t(rng.uniform(f.p()));
    return m;
}

inline lcb::LinearCBInstance random_linear(Rng& rng, int max_m = 8) {
    static const uint32_t primes[3] = {2, 3, 5};
    gf::PrimeField f{primes[rng.uniform(3)]};
    const size_t m = 1 + rng.uniform(uint64_t(max_m));
    auto cols = [&](bool allow_empty) {
        return allow_empty ? rng.uniform(m + 1) : 1 + rng.uniform(m);
    };
    return lcb::LinearCBInstance(f, m, random_matrix(f, m, cols(false), rng),
                                 random_matrix(f, m, cols(true), rng),
                                 random_matrix(f, m, cols(false), rng),
                                 random_matrix(f, m, cols(true), rng));
}

inline matching::MatchingInstance random_matching(Rng& rng, int max_m = 6, int max_grid = 3) {
    const int m = 2 + int(rng.uniform(uint64_t(max_m - 1)));
    const int m1 = 1 + int(rng.uniform(uint64_t(max_grid)));
    const int m2 = 1 + int(rng.uniform(uint64_t(max_grid)));
    std::vector<std::vector<Permutation>> pi;
    for (int a = 0; a < m1; ++a) {
        std::vector<Permutation> row;
        for (int b = 0; b < m2; ++b) row.push_back(random_permutation(m, rng));
        pi.push_back(std::move(row));
    }
    return matching::MatchingInstance(m, m1, m2, std::move(pi));
}

/// pi[i][j] = gamma_j ∘ delta_i for random permutation families; such tables
/// are maximally structured by construction.
inline matching::MatchingInstance random_maximal(Rng& rng, int max_m = 8, int max_grid = 5) {
    const int m = 2 + int(rng.uniform(uint64_t(max_m - 1)));
    const int m1 = 1 + int(rng.uniform(uint64_t(max_grid)));
    const int m2 = 1 + int(rng.uniform(uint64_t(max_grid)));
    std::vector<Permutation> deltas, gammas;
    for (int i = 0; i < m1; ++i) deltas.push_back(random_permutation(m, rng));
    for (int j = 0; j < m2; ++j) gammas.push_back(random_permutation(m, rng));
    std::vector<std::vector<Permutation>> pi;
    for (int i = 0; i < m1; ++i) {
        std::vector<Permutation> row;
        for (int j = 0; j < m2; ++j) row.push_back(compose(gammas[j], deltas[i]));
        pi.push_back(std::move(row));
    }
    return matching::MatchingInstance(m, m1, m2, std::move(pi));
}

/// k independent uniform bits split as (w1, w1p, w2, w2p) = (b0, b1, b2, b3).
inline dist::GeneralCBInstance independent_bits() {
    std::array<std::vector<std::string>, 4> alphabets;
    for (auto& a : alphabets) a = {"0", "1"};
    std::vector<dist::Atom> atoms;
    for (int x = 0; x < 16; ++x)
        atoms.push_back(
            {{x & 1, (x >> 1) & 1, (x >> 2) & 1, (x >> 3) & 1}, Rational(1) / Rational(16)});
    return dist::GeneralCBInstance(std::move(alphabets), std::move(atoms));
}

}  // namespace th

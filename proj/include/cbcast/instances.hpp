#pragma once

#include <string>
#include <vector>

#include "cbcast/distributions.hpp"
#include "cbcast/lcb_solver.hpp"
#include "cbcast/matching.hpp"
#include "cbcast/permutations.hpp"

namespace cbcast::builtin {

/// Linear demo over GF(3), m = 7: user 1 holds (x1, x3) and wants four mixed
/// symbols, user 2 holds (x2, x4) and wants three. Optimal cost is 4 symbols.
inline lcb::LinearCBInstance lcb_demo() {
    gf::PrimeField f(3);
    auto col = [](std::vector<uint32_t> v) { return v; };
    gf::FieldMatrix v1 = gf::FieldMatrix::from_columns(f, 7,
                                                       {col({1, 2, 0, 0, 0, 0, 0}),
                                                        col({0, 0, 1, 0, 1, 0, 0}),
                                                        col({1, 0, 0, 1, 0, 1, 0}),
                                                        col({0, 0, 0, 0, 0, 0, 1})});
    gf::FieldMatrix v1p = gf::FieldMatrix::from_columns(
        f, 7, {col({1, 0, 0, 0, 0, 0, 0}), col({0, 0, 1, 0, 0, 0, 0})});
    gf::FieldMatrix v2 = gf::FieldMatrix::from_columns(f, 7,
                                                       {col({2, 1, 0, 0, 0, 0, 0}),
                                                        col({0, 0, 0, 0, 1, 0, 0}),
                                                        col({0, 1, 0, 1, 0, 2, 0})});
    gf::FieldMatrix v2p = gf::FieldMatrix::from_columns(
        f, 7, {col({0, 1, 0, 0, 0, 0, 0}), col({0, 0, 0, 1, 0, 0, 0})});
    return lcb::LinearCBInstance(f, 7, v1, v1p, v2, v2p);
}

/// Minimal linear dependence over GF(3): w1 + w2 + w1' + w2' = 0 with any
/// three of the four variables independent and uniform. Cost 1 symbol.
inline lcb::LinearCBInstance linear_min_dep() {
    gf::PrimeField f(3);
    gf::FieldMatrix v1 = gf::FieldMatrix::from_columns(f, 3, {{1, 0, 0}});
    gf::FieldMatrix v1p = gf::FieldMatrix::from_columns(f, 3, {{0, 1, 0}});
    gf::FieldMatrix v2 = gf::FieldMatrix::from_columns(f, 3, {{2, 2, 2}});
    gf::FieldMatrix v2p = gf::FieldMatrix::from_columns(f, 3, {{0, 0, 1}});
    return lcb::LinearCBInstance(f, 3, v1, v1p, v2, v2p);
}

/// Two-user butterfly over GF(2): each user wants what the other holds.
inline lcb::LinearCBInstance butterfly() {
    gf::PrimeField f(2);
    gf::FieldMatrix e1 = gf::FieldMatrix::from_columns(f, 2, {{1, 0}});
    gf::FieldMatrix e2 = gf::FieldMatrix::from_columns(f, 2, {{0, 1}});
    return lcb::LinearCBInstance(f, 2, e1, e2, e2, e1);
}

namespace detail {

inline matching::MatchingInstance shift_table_instance(int m, std::vector<std::vector<int>> z) {
    std::vector<std::vector<Permutation>> pi;
    for (const auto& row : z) {
        std::vector<Permutation> prow;
        for (int k : row) prow.push_back(Permutation::shift(m, k));
        pi.push_back(std::move(prow));
    }
    return matching::MatchingInstance(m, int(z.size()), int(z[0].size()), std::move(pi));
}

}  // namespace detail

/// 2x2 matching instance on [4] with shift table {{0,1},{2,3}}; its single
/// grid cycle induces the identity (maximally structured, capacity 2).
inline matching::MatchingInstance cb1() { return detail::shift_table_instance(4, {{0, 1}, {2, 3}}); }

/// Same entropic profile as cb1 but shift table {{0,1},{3,2}}; the cycle
/// induces shift-by-2, a derangement (minimally structured).
inline matching::MatchingInstance cb2() { return detail::shift_table_instance(4, {{0, 1}, {3, 2}}); }

/// Binary AND/OR toy: user 1 knows A and wants A|B, user 2 knows B and wants
/// A&B, for independent uniform bits A, B.
inline dist::GeneralCBInstance andor() {
    std::array<std::vector<std::string>, 4> alphabets = {
        std::vector<std::string>{"0", "1"},  // w1 = A|B
        std::vector<std::string>{"0", "1"},  // w1p = A
        std::vector<std::string>{"0", "1"},  // w2 = A&B
        std::vector<std::string>{"0", "1"},  // w2p = B
    };
    std::vector<dist::Atom> atoms;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            atoms.push_back({{a | b, a, a & b, b}, Rational(1) / Rational(4)});
    return dist::GeneralCBInstance(std::move(alphabets), std::move(atoms));
}

/// Ternary AND/OR variant: A, B uniform over {0,1,2}; w1 = 0 iff (A,B)=(0,0),
/// w2 = 1 iff (A,B)=(1,1). Capacity is open; only bounds are reported.
inline dist::GeneralCBInstance ternary_andor() {
    std::array<std::vector<std::string>, 4> alphabets = {
        std::vector<std::string>{"0", "1"},
        std::vector<std::string>{"0", "1", "2"},
        std::vector<std::string>{"0", "1"},
        std::vector<std::string>{"0", "1", "2"},
    };
    std::vector<dist::Atom> atoms;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const int w1 = (a == 0 && b == 0) ? 0 : 1;
            const int w2 = (a == 1 && b == 1) ? 1 : 0;
            atoms.push_back({{w1, a, w2, b}, Rational(1) / Rational(9)});
        }
    return dist::GeneralCBInstance(std::move(alphabets), std::move(atoms));
}

/// A fixed 4x3 matching instance on [5] for the selector-bit scheme demos.
/// Generic structure (neither maximal nor minimal).
inline matching::MatchingInstance matching_4x3() {
    auto perm = [](std::vector<int> v) { return Permutation(std::move(v)); };
    std::vector<std::vector<Permutation>> pi = {
        {perm({0, 1, 2, 3, 4}), perm({1, 2, 3, 4, 0}), perm({2, 0, 4, 1, 3})},
        {perm({4, 3, 0, 2, 1}), perm({0, 2, 4, 1, 3}), perm({3, 1, 0, 4, 2})},
        {perm({1, 0, 3, 2, 4}), perm({2, 4, 1, 3, 0}), perm({4, 0, 1, 2, 3})},
        {perm({3, 4, 2, 0, 1}), perm({4, 1, 0, 3, 2}), perm({0, 3, 4, 2, 1})},
    };
    return matching::MatchingInstance(5, 4, 3, std::move(pi));
}

}  // namespace cbcast::builtin

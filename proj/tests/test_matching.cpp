#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "helpers.hpp"

using namespace cbcast;
using matching::BulletSet;
using matching::Cell;
using matching::GridCycle;
using matching::MatchingInstance;
using matching::StructureClass;

namespace {

// Independent enumeration oracle: brute force over cell subsets and their
// orderings, counting geometric cycles (canonical form quotients rotations
// and reflections).
int count_cycles_bruteforce(int m1, int m2) {
    std::vector<Cell> cells;
    for (int r = 0; r < m1; ++r)
        for (int c = 0; c < m2; ++c) cells.push_back({r, c});
    auto is_cycle = [](const std::vector<Cell>& seq) {
        const size_t n = seq.size();
        if (n < 4 || n % 2) return false;
        for (size_t i = 0; i < n; ++i) {
            const Cell& a = seq[i];
            const Cell& b = seq[(i + 1) % n];
            if (i % 2 == 0) {
                if (a.first != b.first || a.second == b.second) return false;
            } else {
                if (a.second != b.second || a.first == b.first) return false;
            }
        }
        return true;
    };
    std::set<std::vector<Cell>> canon;
    const int n = int(cells.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // enumerate ordered tuples of distinct cells of every even length
    std::function<void(std::vector<Cell>&, std::vector<bool>&)> rec =
        [&](std::vector<Cell>& seq, std::vector<bool>& used) {
            if (seq.size() >= 4 && seq.size() % 2 == 0 && is_cycle(seq)) {
                std::vector<std::vector<Cell>> forms;
                const size_t len = seq.size();
                for (size_t s = 0; s < len; ++s) {
                    std::vector<Cell> rot(seq.begin() + s, seq.end());
                    rot.insert(rot.end(), seq.begin(), seq.begin() + s);
                    if (is_cycle(rot)) forms.push_back(rot);
                    std::vector<Cell> rev(rot.rbegin(), rot.rend());
                    std::vector<Cell> rev_forms;
                    for (size_t t = 0; t < len; ++t) {
                        std::vector<Cell> r2(rev.begin() + t, rev.end());
                        r2.insert(r2.end(), rev.begin(), rev.begin() + t);
                        if (is_cycle(r2)) forms.push_back(r2);
                    }
                }
                canon.insert(*std::min_element(forms.begin(), forms.end()));
            }
            if (seq.size() == cells.size()) return;
            for (int i = 0; i < n; ++i) {
                if (used[i]) continue;
                used[i] = true;
                seq.push_back(cells[i]);
                rec(seq, used);
                seq.pop_back();
                used[i] = false;
            }
        };
    std::vector<Cell> seq;
    std::vector<bool> used(n, false);
    rec(seq, used);
    return int(canon.size());
}

MatchingInstance all_identity(int m, int m1, int m2) {
    std::vector<std::vector<Permutation>> pi(
        m1, std::vector<Permutation>(m2, Permutation::identity(m)));
    return MatchingInstance(m, m1, m2, std::move(pi));
}

}  // namespace

TEST_CASE("induced permutation of the identity table is the identity") {
    auto inst = all_identity(4, 2, 2);
    GridCycle cyc{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
    CHECK(matching::induced_permutation(inst, cyc).is_identity());
}

TEST_CASE("induced permutations of the bundled 2x2 instances") {
    GridCycle cyc{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
    CHECK(matching::induced_permutation(builtin::cb1(), cyc).is_identity());
    auto p = matching::induced_permutation(builtin::cb2(), cyc);
    CHECK(p == Permutation::shift(4, 2));
    CHECK(p.is_derangement());
}

TEST_CASE("invalid cycles are rejected") {
    auto inst = all_identity(3, 2, 3);
    CHECK_THROWS_AS(matching::induced_permutation(inst, GridCycle{{{0, 0}, {0, 1}}}), InvalidCycle);
    CHECK_THROWS_AS(
        matching::induced_permutation(inst, GridCycle{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}),
        InvalidCycle);
    CHECK_THROWS_AS(
        matching::induced_permutation(inst, GridCycle{{{0, 0}, {0, 1}, {1, 1}, {5, 1}}}),
        InvalidCycle);
}

TEST_CASE("cycle enumeration counts") {
    CHECK(matching::enumerate_cycles(2, 2).size() == 1);
    CHECK(matching::enumerate_cycles(1, 5).size() == 0);
    CHECK(matching::enumerate_cycles(5, 1).size() == 0);
    // brute-force subset oracle pins the counts on small grids
    for (auto [m1, m2] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}, {3, 3}}) {
        CAPTURE(m1, m2);
        CHECK(int(matching::enumerate_cycles(m1, m2).size()) == count_cycles_bruteforce(m1, m2));
    }
    CHECK(matching::enumerate_cycles(3, 2).size() == 3);
    CHECK(matching::enumerate_cycles(3, 3).size() == 15);
}

TEST_CASE("cycle enumeration honours its budget") {
    CHECK_THROWS_AS(matching::enumerate_cycles(5, 5, 10), CycleBudgetExceeded);
}

TEST_CASE("classification degrades gracefully when the budget runs out") {
    // cb2 has one cycle; a zero budget leaves minimality undetermined
    CHECK(matching::classify(builtin::cb2(), 0) == StructureClass::NotMaximalUndetermined);
    // maximality needs no cycle sweep, so the budget does not matter there
    CHECK(matching::classify(builtin::cb1(), 0) == StructureClass::Maximal);
}

TEST_CASE("every enumerated cycle is valid and distinct") {
    auto inst = all_identity(2, 4, 4);
    std::set<std::vector<Cell>> seen;
    for (const auto& cyc : matching::enumerate_cycles(4, 4)) {
        CHECK_NOTHROW(matching::induced_permutation(inst, cyc));
        std::vector<Cell> sorted_cells = cyc.cells;
        std::sort(sorted_cells.begin(), sorted_cells.end());
        CHECK(std::adjacent_find(sorted_cells.begin(), sorted_cells.end()) == sorted_cells.end());
        CHECK(seen.insert(cyc.cells).second);
    }
}

TEST_CASE("reversing a cycle inverts the induced permutation") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        auto inst = th::random_matching(rng, 5, 3);
        if (inst.m1 < 2 || inst.m2 < 2) continue;
        for (const auto& cyc : matching::enumerate_cycles(inst.m1, inst.m2, 100000)) {
            std::vector<Cell> rev(cyc.cells.rbegin(), cyc.cells.rend());
            auto fwd = matching::induced_permutation(inst, cyc);
            auto bwd = matching::induced_permutation(inst, GridCycle{rev});
            CHECK(bwd == fwd.inverse());
        }
    }
}

TEST_CASE("classification of the bundled instances") {
    CHECK(matching::classify(builtin::cb1()) == StructureClass::Maximal);
    CHECK(matching::classify(builtin::cb2()) == StructureClass::Minimal);
}

TEST_CASE("a transposition-induced cycle is neither identity nor derangement") {
    // 2x2 table on [4]: pi11 = (1 2) transposition, others identity
    std::vector<std::vector<Permutation>> pi(
        2, std::vector<Permutation>(2, Permutation::identity(4)));
    pi[1][1] = Permutation({1, 0, 2, 3});
    MatchingInstance inst(4, 2, 2, std::move(pi));
    CHECK(matching::classify(inst) == StructureClass::Neither);
}

TEST_CASE("factorization test agrees with cycle-by-cycle maximality") {
    Rng rng(999);
    int maximal_seen = 0;
    for (int rep = 0; rep < 40; ++rep) {
        auto inst = rep % 2 ? th::random_maximal(rng, 5, 3) : th::random_matching(rng, 5, 3);
        bool all_identity_cycles = true;
        matching::for_each_cycle(inst.m1, inst.m2, 100000, [&](const GridCycle& cyc) {
            if (!matching::induced_permutation(inst, cyc).is_identity()) {
                all_identity_cycles = false;
                return false;
            }
            return true;
        });
        const bool is_max = matching::classify(inst) == StructureClass::Maximal;
        CHECK(is_max == all_identity_cycles);
        maximal_seen += is_max ? 1 : 0;
    }
    CHECK(maximal_seen >= 10);
}

TEST_CASE("standard bullet set shape and size") {
    auto bs = matching::standard_bullet_set(3, 2);
    CHECK(bs.cells.size() == 4);
    CHECK(std::count(bs.cells.begin(), bs.cells.end(), Cell{0, 0}) == 1);
    CHECK(std::count(bs.cells.begin(), bs.cells.end(), Cell{0, 1}) == 1);
    for (int m1 = 1; m1 <= 5; ++m1)
        for (int m2 = 1; m2 <= 5; ++m2)
            CHECK(matching::standard_bullet_set(m1, m2).cells.size() == size_t(m1 + m2 - 1));
}

TEST_CASE("bullet sets translate to m1*m2 distinct sets") {
    for (auto [m1, m2] : std::vector<std::pair<int, int>>{{3, 2}, {4, 3}, {2, 3}, {4, 4}}) {
        auto std_form = matching::standard_bullet_set(m1, m2);
        std::set<std::vector<Cell>> distinct;
        for (int z1 = 0; z1 < m1; ++z1)
            for (int z2 = 0; z2 < m2; ++z2) distinct.insert(matching::translate(std_form, z1, z2).cells);
        CHECK(distinct.size() == size_t(m1 * m2));
    }
}

TEST_CASE("acceptable set counting") {
    // the 3x2 example: cell (2,1) in 1-indexed terms lies in exactly 4 sets
    auto sets = matching::acceptable_sets(3, 2, {1, 0});
    CHECK(sets.size() == 4);
    for (const auto& bs : sets)
        CHECK(std::count(bs.cells.begin(), bs.cells.end(), Cell{1, 0}) == 1);

    auto singleton = matching::acceptable_sets(1, 1, {0, 0});
    CHECK(singleton.size() == 1);
    CHECK(singleton[0].cells == std::vector<Cell>{{0, 0}});

    // every cell of every grid lies in exactly m1+m2-1 of the m1*m2 translations
    for (auto [m1, m2] : std::vector<std::pair<int, int>>{{3, 2}, {4, 3}, {2, 3}, {5, 5}}) {
        auto std_form = matching::standard_bullet_set(m1, m2);
        for (int r = 0; r < m1; ++r)
            for (int c = 0; c < m2; ++c) {
                int containing = 0;
                for (int z1 = 0; z1 < m1; ++z1)
                    for (int z2 = 0; z2 < m2; ++z2) {
                        auto t = matching::translate(std_form, z1, z2);
                        containing +=
                            std::count(t.cells.begin(), t.cells.end(), Cell{r, c}) ? 1 : 0;
                    }
                CHECK(containing == m1 + m2 - 1);
                CHECK(matching::acceptable_sets(m1, m2, {r, c}).size() == size_t(m1 + m2 - 1));
            }
    }
}

TEST_CASE("delta/gamma families on the bundled instances") {
    auto fam1 = matching::build_delta_gamma(builtin::cb1(), matching::standard_bullet_set(2, 2));
    CHECK(fam1.deltas[0] == Permutation::shift(4, 0));
    CHECK(fam1.deltas[1] == Permutation::shift(4, 2));
    CHECK(fam1.gammas[0].is_identity());
    CHECK(fam1.gammas[1] == Permutation::shift(4, 1));
    // maximality bonus: the off-set cell also factorizes
    CHECK(compose(fam1.gammas[1], fam1.deltas[1]) == builtin::cb1().pi[1][1]);

    auto fam2 = matching::build_delta_gamma(builtin::cb2(), matching::standard_bullet_set(2, 2));
    CHECK(fam2.deltas[0] == Permutation::shift(4, 0));
    CHECK(fam2.deltas[1] == Permutation::shift(4, 3));
    CHECK(fam2.gammas[0].is_identity());
    CHECK(fam2.gammas[1] == Permutation::shift(4, 1));
    CHECK_FALSE(compose(fam2.gammas[1], fam2.deltas[1]) == builtin::cb2().pi[1][1]);
}

TEST_CASE("all-identity tables give identity delta/gamma families") {
    auto inst = all_identity(3, 3, 2);
    auto fam = matching::build_delta_gamma(inst, matching::standard_bullet_set(3, 2));
    for (const auto& d : fam.deltas) CHECK(d.is_identity());
    for (const auto& g : fam.gammas) CHECK(g.is_identity());
}

TEST_CASE("bullet-set encode/decode round-trips on its cells") {
    Rng rng(808);
    for (int rep = 0; rep < 25; ++rep) {
        auto inst = th::random_matching(rng, 6, 4);
        auto std_form = matching::standard_bullet_set(inst.m1, inst.m2);
        const int z1 = int(rng.uniform(uint64_t(inst.m1)));
        const int z2 = int(rng.uniform(uint64_t(inst.m2)));
        auto fam = matching::build_delta_gamma(inst, matching::translate(std_form, z1, z2));
        for (const auto& [a, b] : fam.bullet.cells) {
            CHECK(compose(fam.gammas[b], fam.deltas[a]) == inst.pi[a][b]);
            for (int w1 = 0; w1 < inst.m; ++w1) {
                const int s = matching::encode_bullet(fam, a, w1);
                CHECK(matching::decode_user1(fam, s, a) == w1);
                CHECK(matching::decode_user2(fam, s, b) == inst.pi[a][b](w1));
            }
        }
    }
}

TEST_CASE("specific encode on the maximal 2x2 instance") {
    auto fam = matching::build_delta_gamma(builtin::cb1(), matching::standard_bullet_set(2, 2));
    // side-information cell (1,1) in 0-indexed terms, demand symbol 1
    const int s = matching::encode_bullet(fam, 1, 1);
    CHECK(s == 3);
    CHECK(matching::decode_user2(fam, s, 1) == 0);
    CHECK(builtin::cb1().pi[1][1](1) == 0);
}

TEST_CASE("maximal instances decode on the whole grid") {
    Rng rng(2121);
    for (int rep = 0; rep < 10; ++rep) {
        auto inst = th::random_maximal(rng, 6, 4);
        auto fam = matching::build_delta_gamma(inst, matching::standard_bullet_set(inst.m1, inst.m2));
        for (int a = 0; a < inst.m1; ++a)
            for (int b = 0; b < inst.m2; ++b)
                for (int w1 = 0; w1 < inst.m; ++w1) {
                    const int s = matching::encode_bullet(fam, a, w1);
                    CHECK(matching::decode_user1(fam, s, a) == w1);
                    CHECK(matching::decode_user2(fam, s, b) == inst.pi[a][b](w1));
                }
    }
}

TEST_CASE("bounds on the bundled instances") {
    auto b1 = matching::bounds(builtin::cb1());
    CHECK(b1.cls == StructureClass::Maximal);
    CHECK_THAT(b1.hstar_bits.value(), Catch::Matchers::WithinAbs(2.0, 1e-9));
    CHECK_THAT(b1.capacity_lb, Catch::Matchers::WithinAbs(2.0, 1e-9));

    auto b2 = matching::bounds(builtin::cb2());
    const double hstar = 4 - std::log2(3.0);
    CHECK(b2.cls == StructureClass::Minimal);
    CHECK_THAT(b2.hstar_bits.value(), Catch::Matchers::WithinAbs(hstar, 1e-9));
    CHECK_THAT(b2.capacity_lb, Catch::Matchers::WithinAbs(4.0 / hstar, 1e-9));
    CHECK_THAT(b2.capacity_ub, Catch::Matchers::WithinAbs(4.0 / hstar, 1e-9));
}

TEST_CASE("the 4x3 cost gap is exactly one bit") {
    auto b = matching::bounds(builtin::matching_4x3());
    CHECK_THAT(b.hstar_ub_bits - b.hstar_lb_bits, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(b.cls == StructureClass::Neither);
    CHECK_FALSE(b.tight);
}

TEST_CASE("scheme_4x3 decodes every input at cost log2(m)+1") {
    SECTION("bundled generic instance") {
        auto inst = builtin::matching_4x3();
        auto s = matching::scheme_4x3(inst);
        CHECK_THAT(matching::Scheme4x3::cost_bits(inst.m),
                   Catch::Matchers::WithinAbs(std::log2(5.0) + 1, 1e-12));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 3; ++b)
                for (int w1 = 0; w1 < inst.m; ++w1) {
                    const auto [sel, sym] = s.encode(a, b, w1);
                    CHECK(s.decode1(sel, sym, a) == w1);
                    CHECK(s.decode2(sel, sym, b) == inst.pi[a][b](w1));
                }
    }
    SECTION("all-identity table stays in the band set") {
        auto inst = all_identity(4, 4, 3);
        auto s = matching::scheme_4x3(inst);
        for (const auto& [a, b] : s.bullet_cells)
            CHECK(s.encode(a, b, 2) == std::pair<int, int>{0, 2});
    }
    SECTION("random instances, including maximal ones") {
        Rng rng(606);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<std::vector<Permutation>> pi;
            const int m = 4 + int(rng.uniform(3));
            for (int a = 0; a < 4; ++a) {
                std::vector<Permutation> row;
                for (int b = 0; b < 3; ++b) row.push_back(random_permutation(m, rng));
                pi.push_back(std::move(row));
            }
            MatchingInstance inst(m, 4, 3, std::move(pi));
            auto s = matching::scheme_4x3(inst);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int w1 = 0; w1 < m; ++w1) {
                        const auto [sel, sym] = s.encode(a, b, w1);
                        CHECK(s.decode1(sel, sym, a) == w1);
                        CHECK(s.decode2(sel, sym, b) == inst.pi[a][b](w1));
                    }
        }
        // maximal 4x3 instances also solve at log2(m) without the selector,
        // but the selector scheme stays valid
        auto maximal = th::random_maximal(rng, 6, 1);
        (void)maximal;
    }
    SECTION("wrong shapes are rejected") {
        CHECK_THROWS_AS(matching::scheme_4x3(all_identity(4, 3, 4)), WrongShape);
    }
}

TEST_CASE("feasible-set audit of natural encoders") {
    SECTION("verbatim side-information encoder has singleton feasible sets") {
        auto inst = builtin::cb2();
        auto rep = matching::feasible_set_check(
            inst, [&](int w1, int a, int b) { return (long long)(((a * 2 + b) * 4) + w1); });
        CHECK(rep.pass());
        CHECK(rep.max_feasible == 1);
    }
    SECTION("the 2-bit linear broadcast on the maximal instance is allowed") {
        auto inst = builtin::cb1();
        auto rep = matching::feasible_set_check(
            inst, [](int w1, int a, int) { return (long long)((w1 + 2 * a) % 4); });
        CHECK(rep.pass());
        CHECK(rep.max_feasible == 4);  // all cells feasible, but no derangement cycle
    }
    SECTION("bullet-set schemes on the minimal instance stay within 3 cells") {
        auto inst = builtin::cb2();
        auto chooser = [&](int a, int b) {
            return matching::acceptable_sets(2, 2, {a, b}).front();
        };
        auto enc = [&](int w1, int a, int b) {
            auto bs = chooser(a, b);
            auto fam = matching::build_delta_gamma(inst, bs);
            return (long long)((bs.z1 * 2 + bs.z2) * 4 + matching::encode_bullet(fam, a, w1));
        };
        auto rep = matching::feasible_set_check(inst, enc);
        CHECK(rep.pass());
        CHECK(rep.max_feasible <= 3);
        CHECK(rep.size_cap_checked);
    }
    SECTION("a corrupted bullet assignment is flagged") {
        auto inst = builtin::cb2();
        auto std_form = matching::standard_bullet_set(2, 2);
        auto fam = matching::build_delta_gamma(inst, std_form);
        // wrongly treat the off-set cell as covered by the same set
        auto enc = [&](int w1, int a, int) {
            return (long long)matching::encode_bullet(fam, a, w1);
        };
        auto rep = matching::feasible_set_check(inst, enc);
        CHECK_FALSE(rep.pass());
        CHECK_FALSE(rep.derangement_free);
        CHECK_FALSE(rep.sizes_ok);
    }
}

TEST_CASE("cycle-free subsets cannot exceed m1+m2-1 cells") {
    Rng rng(515);
    for (auto [m1, m2] : std::vector<std::pair<int, int>>{{3, 2}, {3, 3}, {4, 3}}) {
        std::vector<Cell> all;
        for (int r = 0; r < m1; ++r)
            for (int c = 0; c < m2; ++c) all.push_back({r, c});
        for (int rep = 0; rep < 30; ++rep) {
            // random subset of size m1+m2 always contains a cycle
            std::vector<Cell> pool = all;
            for (size_t i = 0; i < pool.size(); ++i)
                std::swap(pool[i], pool[i + rng.uniform(pool.size() - i)]);
            std::vector<Cell> subset(pool.begin(), pool.begin() + m1 + m2);
            bool has_cycle = false;
            matching::for_each_cycle_in(subset, 100000, [&](const GridCycle&) {
                has_cycle = true;
                return false;
            });
            CHECK(has_cycle);
        }
        // greedy row/column elimination on bullet sets stays cycle-free
        auto bs = matching::standard_bullet_set(m1, m2);
        bool has_cycle = false;
        matching::for_each_cycle_in(bs.cells, 100000, [&](const GridCycle&) {
            has_cycle = true;
            return false;
        });
        CHECK_FALSE(has_cycle);
    }
}

TEST_CASE("to_general reproduces the uniform matching law") {
    auto g = matching::to_general(builtin::cb1());
    CHECK(g.atoms().size() == 16);
    for (const auto& atom : g.atoms()) CHECK(atom.p == Rational(1) / Rational(16));
    auto prof = dist::entropy_profile(matching::to_general(builtin::cb2()));
    CHECK_THAT(prof.h[dist::kAllVars], Catch::Matchers::WithinAbs(4.0, 1e-9));

    // m = 1: both demands deterministic
    auto tiny = matching::to_general(all_identity(1, 2, 2));
    CHECK_THAT(dist::entropy(tiny, dist::W1 | dist::W2), Catch::Matchers::WithinAbs(0, 1e-12));

    CHECK_THROWS_AS(matching::to_general(all_identity(1000000, 2, 2)), TooLarge);
}

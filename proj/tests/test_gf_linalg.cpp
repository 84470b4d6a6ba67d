#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace cbcast;
using gf::FieldMatrix;
using gf::PrimeField;

namespace {
FieldMatrix cols(uint32_t p, size_t m, std::vector<std::vector<uint32_t>> c) {
    return FieldMatrix::from_columns(PrimeField{p}, m, c);
}
}  // namespace

TEST_CASE("rref of the identity is the identity") {
    auto id = FieldMatrix::identity(PrimeField{3}, 3);
    auto red = gf::rref(id);
    CHECK(red.r == id);
    CHECK(red.pivot_cols == std::vector<size_t>{0, 1, 2});
    CHECK(red.rank == 3);
}

TEST_CASE("demo instance ranks") {
    auto demo = builtin::lcb_demo();
    CHECK(gf::rank(demo.v1) == 4);
    CHECK(gf::rank(gf::hstack({demo.v1, demo.v2, demo.v1p, demo.v2p})) == 7);
    // the two demands overlap in one dimension, so the joint rank is 6, not 7
    CHECK(gf::rank(gf::hstack(demo.v1, demo.v2)) == 6);
}

TEST_CASE("span membership against the demo side-information") {
    auto demo = builtin::lcb_demo();
    auto sides = gf::hstack(demo.v1p, demo.v2p);
    CHECK(gf::in_span({1, 2, 0, 0, 0, 0, 0}, sides));
    CHECK_FALSE(gf::in_span({0, 0, 0, 0, 0, 0, 1}, gf::hstack(sides, demo.v2)));
}

TEST_CASE("solve basics") {
    PrimeField f{5};
    auto id = FieldMatrix::identity(f, 4);
    Rng rng(11);
    auto b = th::random_matrix(f, 4, 3, rng);
    CHECK(gf::solve(id, b) == b);

    auto a = cols(5, 3, {{1, 0, 0}, {0, 1, 0}});
    auto bad = cols(5, 3, {{0, 0, 1}});
    CHECK_THROWS_AS(gf::solve(a, bad), InconsistentSystem);
}

TEST_CASE("intersection of identical spans is the span") {
    Rng rng(5);
    auto a = th::random_matrix(PrimeField{3}, 6, 4, rng);
    auto inter = gf::intersect_column_spaces(a, a);
    CHECK(inter.cols() == gf::rank(a));
    CHECK(gf::rank(gf::hstack(a, inter)) == gf::rank(a));
}

TEST_CASE("demo subspace intersections match the worked decomposition") {
    auto demo = builtin::lcb_demo();
    auto sides = gf::hstack(demo.v1p, demo.v2p);
    auto v1a = gf::intersect_column_spaces(demo.v1, sides);
    REQUIRE(v1a.cols() == 1);
    CHECK(gf::in_span({1, 2, 0, 0, 0, 0, 0}, v1a));
    auto v2a = gf::intersect_column_spaces(demo.v2, sides);
    REQUIRE(v2a.cols() == 1);
    CHECK(gf::in_span({2, 1, 0, 0, 0, 0, 0}, v2a));
}

TEST_CASE("extend_basis from empty returns a basis of the outer span") {
    PrimeField f{2};
    auto id = FieldMatrix::identity(f, 3);
    auto added = gf::extend_basis(FieldMatrix(f, 3, 0), id);
    CHECK(added == id);
}

TEST_CASE("extend_basis spans the 2-dimensional complement in the demo") {
    auto demo = builtin::lcb_demo();
    auto sides = gf::hstack(demo.v1p, demo.v2p);
    auto v1a = gf::intersect_column_spaces(demo.v1, sides);
    auto outer = gf::intersect_column_spaces(demo.v1, gf::hstack(sides, demo.v2));
    auto added = gf::extend_basis(v1a, outer);
    REQUIRE(added.cols() == 2);
    // span(v1a ∪ added) equals span{e1+2e2, e3+e5, e1+e4+e6}
    auto reference = cols(3, 7, {{1, 2, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 1, 0, 0}, {1, 0, 0, 1, 0, 1, 0}});
    auto mine = gf::hstack(v1a, added);
    CHECK(gf::rank(mine) == 3);
    CHECK(gf::rank(gf::hstack(mine, reference)) == 3);
}

TEST_CASE("extend_basis rejects malformed inputs") {
    PrimeField f{3};
    auto dependent = cols(3, 3, {{1, 0, 0}, {2, 0, 0}});
    CHECK_THROWS_AS(gf::extend_basis(dependent, FieldMatrix::identity(f, 3)), NotNested);
    auto outside = cols(3, 3, {{0, 0, 1}});
    auto outer = cols(3, 3, {{1, 0, 0}, {0, 1, 0}});
    CHECK_THROWS_AS(gf::extend_basis(outside, outer), NotNested);
}

TEST_CASE("dimension identity dim(A)+dim(B) = dim([A|B]) + dim(A∩B)") {
    for (uint32_t p : {2u, 3u, 5u}) {
        Rng rng(100 + p);
        for (int rep = 0; rep < 40; ++rep) {
            const size_t m = 1 + rng.uniform(8);
            auto a = th::random_matrix(PrimeField{p}, m, rng.uniform(m + 1), rng);
            auto b = th::random_matrix(PrimeField{p}, m, rng.uniform(m + 1), rng);
            auto inter = gf::intersect_column_spaces(a, b);
            CHECK(gf::rank(inter) == inter.cols());
            CHECK(gf::rank(a) + gf::rank(b) == gf::rank(gf::hstack(a, b)) + inter.cols());
        }
    }
}

TEST_CASE("extend_basis output completes inner to a basis of outer") {
    Rng rng(77);
    for (int rep = 0; rep < 60; ++rep) {
        const size_t m = 1 + rng.uniform(7);
        PrimeField f{rep % 2 ? 2u : 3u};
        auto outer = th::random_matrix(f, m, 1 + rng.uniform(m), rng);
        auto sub = th::random_matrix(f, m, rng.uniform(m + 1), rng);
        auto inner = gf::column_space_basis(gf::intersect_column_spaces(outer, sub));
        auto added = gf::extend_basis(inner, outer);
        auto full = gf::hstack(inner, added);
        CHECK(gf::rank(full) == full.cols());
        CHECK(full.cols() == gf::rank(outer));
        CHECK(gf::rank(gf::hstack(full, outer)) == gf::rank(outer));
    }
}

TEST_CASE("rref is idempotent") {
    Rng rng(123);
    for (int rep = 0; rep < 50; ++rep) {
        const size_t m = 1 + rng.uniform(6);
        auto a = th::random_matrix(PrimeField{rep % 2 ? 3u : 5u}, m, 1 + rng.uniform(6), rng);
        auto once = gf::rref(a);
        auto twice = gf::rref(once.r);
        CHECK(once.r == twice.r);
        CHECK(once.pivot_cols == twice.pivot_cols);
    }
}

TEST_CASE("solve returns an exact preimage whenever one exists") {
    Rng rng(321);
    for (int rep = 0; rep < 50; ++rep) {
        const size_t m = 1 + rng.uniform(6);
        PrimeField f{5};
        auto a = th::random_matrix(f, m, 1 + rng.uniform(6), rng);
        auto x = th::random_matrix(f, a.cols(), 2, rng);
        auto b = gf::mul(a, x);
        auto sol = gf::solve(a, b);
        CHECK(gf::mul(a, sol) == b);
    }
}

TEST_CASE("nullspace vectors annihilate the matrix") {
    Rng rng(99);
    for (int rep = 0; rep < 40; ++rep) {
        const size_t m = 1 + rng.uniform(6);
        auto a = th::random_matrix(PrimeField{3}, m, 1 + rng.uniform(6), rng);
        auto ker = gf::nullspace(a);
        CHECK(ker.cols() == a.cols() - gf::rank(a));
        if (ker.cols()) CHECK(gf::mul(a, ker).is_zero());
        CHECK(gf::rank(ker) == ker.cols());
    }
}

TEST_CASE("prime field validation") {
    CHECK_THROWS_AS(PrimeField{4}, InvariantError);
    CHECK_THROWS_AS(PrimeField{1}, InvariantError);
    CHECK_NOTHROW(PrimeField{65521});
    PrimeField f{7};
    CHECK(f.inv(3) == 5);
    CHECK(f.mul(f.inv(4), 4) == 1);
}

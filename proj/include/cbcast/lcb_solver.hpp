#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbcast/errors.hpp"
#include "cbcast/gf_linalg.hpp"
#include "cbcast/rational.hpp"

namespace cbcast::lcb {

using gf::FieldMatrix;
using gf::PrimeField;

/// Linear instance: demands and side-informations are X^T·V for an m-vector X
/// of i.i.d. uniform GF(p) symbols.
struct LinearCBInstance {
    PrimeField field;
    size_t m;
    FieldMatrix v1, v1p, v2, v2p;

    LinearCBInstance(PrimeField f, size_t m_, FieldMatrix v1_, FieldMatrix v1p_, FieldMatrix v2_,
                     FieldMatrix v2p_)
        : field(f),
          m(m_),
          v1(std::move(v1_)),
          v1p(std::move(v1p_)),
          v2(std::move(v2_)),
          v2p(std::move(v2p_)) {
        for (const FieldMatrix* v : {&v1, &v1p, &v2, &v2p})
            if (v->rows() != m || !(v->field() == field))
                throw InvariantError("instance matrices must share m rows and the field");
    }

    LinearCBInstance swapped_users() const {
        return LinearCBInstance(field, m, v2, v2p, v1, v1p);
    }
};

/// Result of stripping the part of each demand already known from the user's
/// own side-information. reconstruct_i recovers the original demand:
/// W_i = [W_i_reduced | W_i'] * reconstruct_i.
struct NormalizeResult {
    LinearCBInstance reduced;
    FieldMatrix reconstruct1, reconstruct2;
};

namespace detail {

// Reduce one demand v against its own side-information vp.
// Returns (reduced demand, reconstruction map of shape (n_red + n') x n).
inline std::pair<FieldMatrix, FieldMatrix> reduce_demand(const FieldMatrix& v,
                                                         const FieldMatrix& vp) {
    FieldMatrix known = gf::intersect_column_spaces(v, vp);
    FieldMatrix reduced = gf::extend_basis(known, v);
    // v = [known | reduced] * k ; known = vp * j
    FieldMatrix k = gf::solve(gf::hstack(known, reduced), v);
    FieldMatrix j = gf::solve(vp, known);
    FieldMatrix k_known = k.row_range(0, known.cols());
    FieldMatrix k_red = k.row_range(known.cols(), reduced.cols());
    FieldMatrix rec = gf::vstack(k_red, gf::mul(j, k_known));
    return {std::move(reduced), std::move(rec)};
}

}  // namespace detail

inline NormalizeResult normalize(const LinearCBInstance& inst) {
    auto [r1, rec1] = detail::reduce_demand(inst.v1, inst.v1p);
    auto [r2, rec2] = detail::reduce_demand(inst.v2, inst.v2p);
    return {LinearCBInstance(inst.field, inst.m, r1, inst.v1p, r2, inst.v2p), std::move(rec1),
            std::move(rec2)};
}

/// The a/b/c split of each (normalized) demand:
///   - part a lies in span(V1' ∪ V2'), decodable from side-information alone;
///   - part b is the cross-dependent part, reachable once the other demand is added;
///   - part c is independent of everything else and must be sent uncoded.
struct Decomposition {
    FieldMatrix v1a, v1b, v1c, v2a, v2b, v2c;

    size_t n1a() const { return v1a.cols(); }
    size_t n1b() const { return v1b.cols(); }
    size_t n1c() const { return v1c.cols(); }
    size_t n2a() const { return v2a.cols(); }
    size_t n2b() const { return v2b.cols(); }
    size_t n2c() const { return v2c.cols(); }

    Decomposition swapped_users() const { return {v2a, v2b, v2c, v1a, v1b, v1c}; }
};

inline Decomposition decompose(const LinearCBInstance& n) {
    FieldMatrix sides = gf::hstack(n.v1p, n.v2p);

    auto split = [&](const FieldMatrix& v, const FieldMatrix& other) {
        FieldMatrix va = gf::intersect_column_spaces(v, sides);
        FieldMatrix vab_space = gf::intersect_column_spaces(v, gf::hstack(sides, other));
        FieldMatrix vb = gf::extend_basis(va, vab_space);
        FieldMatrix vc = gf::extend_basis(gf::hstack(va, vb), v);
        return std::array<FieldMatrix, 3>{std::move(va), std::move(vb), std::move(vc)};
    };

    auto [v1a, v1b, v1c] = split(n.v1, n.v2);
    auto [v2a, v2b, v2c] = split(n.v2, n.v1);
    Decomposition dec{std::move(v1a), std::move(v1b), std::move(v1c),
                      std::move(v2a), std::move(v2b), std::move(v2c)};

    if (dec.n1b() != dec.n2b())
        throw DecompositionInvariantViolated("n1b != n2b: " + std::to_string(dec.n1b()) + " vs " +
                                             std::to_string(dec.n2b()));
    if (dec.n1a() + dec.n1b() + dec.n1c() != gf::rank(n.v1) ||
        dec.n2a() + dec.n2b() + dec.n2c() != gf::rank(n.v2))
        throw DecompositionInvariantViolated("partition sizes do not sum to demand rank");
    return dec;
}

/// Factors of V1b = V1'·M1' + V2'·M2' + V2b·M2b with M2b square invertible.
struct FactorB {
    FieldMatrix m1p, m2p, m2b;
};

inline FactorB factor_b(const Decomposition& dec, const LinearCBInstance& n) {
    const size_t n1p = n.v1p.cols(), n2p = n.v2p.cols(), nb = dec.n2b();
    FieldMatrix lhs = gf::hstack({n.v1p, n.v2p, dec.v2b});
    FieldMatrix y(n.field, 0, 0);
    try {
        y = gf::solve(lhs, dec.v1b);
    } catch (const InconsistentSystem&) {
        throw FactorizationFailed("V1b is not reachable from V1', V2', V2b");
    }
    FactorB f{y.row_range(0, n1p), y.row_range(n1p, n2p), y.row_range(n1p + n2p, nb)};
    if (gf::rank(f.m2b) != nb) throw FactorizationFailed("M2b is singular");
    return f;
}

/// Factors of V1a = V1'·P1' + V2'·P2' and [V2a | 0] = V1'·Q1' + V2'·Q2'
/// (V2a zero-padded to the width of V1a; requires n1a >= n2a).
struct FactorA {
    FieldMatrix p1p, p2p, q1p, q2p;
};

inline FactorA factor_a(const Decomposition& dec, const LinearCBInstance& n) {
    if (dec.n1a() < dec.n2a()) throw InvariantError("factor_a requires n1a >= n2a");
    const size_t n1p = n.v1p.cols();
    FieldMatrix sides = gf::hstack(n.v1p, n.v2p);
    FieldMatrix p = gf::solve(sides, dec.v1a);
    FieldMatrix v2a_pad = dec.v2a;
    if (dec.n2a() < dec.n1a())
        v2a_pad = gf::hstack(dec.v2a, FieldMatrix(n.field, n.m, dec.n1a() - dec.n2a()));
    FieldMatrix q = gf::solve(sides, v2a_pad);
    return {p.row_range(0, n1p), p.row_range(n1p, n.v2p.cols()), q.row_range(0, n1p),
            q.row_range(n1p, n.v2p.cols())};
}

/// Emitted broadcast scheme. S = X^T·s_cols, partitioned Sa|Sb|Sc. Each decode
/// map recovers the original demand: W_i = [S | W_i'] * decode_i.
struct LinearScheme {
    PrimeField field;
    size_t m;
    FieldMatrix s_cols;
    size_t seg_a, seg_b, seg_c;
    FieldMatrix decode1, decode2;
    size_t cost_symbols;
    bool swapped;
};

struct LinearBounds {
    size_t demanded_symbols;   // rank(V1) + rank(V2)
    size_t joint_rank;         // rank([V1 V2])
    size_t converse_denominator_symbols;
    size_t cost_symbols;
    double log2_p;
    bool tight;
    bool swapped;

    double cost_bits() const { return double(cost_symbols) * log2_p; }
    double h_w1w2_bits() const { return double(joint_rank) * log2_p; }

    /// Demanded symbols over broadcast cost, as an exact rational.
    Rational capacity() const {
        if (cost_symbols == 0)
            throw DegenerateDemand("capacity undefined: broadcast cost is zero");
        return Rational(BigInt(demanded_symbols), BigInt(cost_symbols));
    }
};

/// Converse denominator in q-ary symbols, straight from rank arithmetic:
/// the larger of the two genie bounds.
inline size_t converse_denominator_symbols(const LinearCBInstance& inst) {
    auto rk = [](const FieldMatrix& m) { return gf::rank(m); };
    FieldMatrix all = gf::hstack({inst.v1, inst.v1p, inst.v2, inst.v2p});
    const size_t rk_all = rk(all);
    const size_t c1 = rk(gf::hstack(inst.v1, inst.v1p)) - rk(inst.v1p) + rk_all -
                      rk(gf::hstack({inst.v1, inst.v1p, inst.v2p}));
    const size_t c2 = rk(gf::hstack(inst.v2, inst.v2p)) - rk(inst.v2p) + rk_all -
                      rk(gf::hstack({inst.v2, inst.v2p, inst.v1p}));
    return std::max(c1, c2);
}

namespace detail {

// Assemble s_cols and both decode maps for a normalized, oriented instance
// (n1a >= n2a). Decode maps are for the *reduced* demands.
struct CoreScheme {
    FieldMatrix s_cols;
    size_t seg_a, seg_b, seg_c;
    FieldMatrix dec1_s, dec1_w;  // W1_red = S*dec1_s + W1'*dec1_w
    FieldMatrix dec2_s, dec2_w;
};

inline CoreScheme build_core(const LinearCBInstance& n, const Decomposition& dec) {
    const PrimeField f = n.field;
    FactorB fb = factor_b(dec, n);
    FactorA fa = factor_a(dec, n);
    const size_t n1a = dec.n1a(), n2a = dec.n2a(), nb = dec.n1b(), n1c = dec.n1c(),
                 n2c = dec.n2c();
    const size_t cost = n1a + nb + n1c + n2c;

    FieldMatrix sa = gf::add(gf::mul(n.v1p, fa.q1p), gf::mul(n.v2p, fa.p2p));
    FieldMatrix sb = gf::add(gf::mul(dec.v2b, fb.m2b), gf::mul(n.v2p, fb.m2p));
    FieldMatrix s_cols = gf::hstack({sa, sb, dec.v1c, dec.v2c});

    // Coordinates of the reduced demands in their a/b/c bases.
    FieldMatrix k1 = gf::solve(gf::hstack({dec.v1a, dec.v1b, dec.v1c}), n.v1);
    FieldMatrix k2 = gf::solve(gf::hstack({dec.v2a, dec.v2b, dec.v2c}), n.v2);

    auto segment_rows = [&](const FieldMatrix& k, size_t first, size_t count) {
        return k.row_range(first, count);
    };

    // User 1: W1a = Sa + W1'(P1' - Q1'); W1b = Sb + W1'M1'; W1c = the first
    // n1c columns of Sc.
    FieldMatrix k1a = segment_rows(k1, 0, n1a);
    FieldMatrix k1b = segment_rows(k1, n1a, nb);
    FieldMatrix k1c = segment_rows(k1, n1a + nb, n1c);
    FieldMatrix dec1_s(f, cost, n.v1.cols());
    auto paste = [](FieldMatrix& dst, const FieldMatrix& src, size_t row0) {
        for (size_t i = 0; i < src.rows(); ++i)
            for (size_t j = 0; j < src.cols(); ++j) dst.at(row0 + i, j) = src.at(i, j);
    };
    paste(dec1_s, k1a, 0);
    paste(dec1_s, k1b, n1a);
    paste(dec1_s, k1c, n1a + nb);
    FieldMatrix dec1_w =
        gf::add(gf::mul(gf::sub(fa.p1p, fa.q1p), k1a), gf::mul(fb.m1p, k1b));

    // User 2: [W2a | 0] = Sa + W2'(Q2' - P2'); W2b = (Sb - W2'M2')·M2b^{-1};
    // W2c = the last n2c columns of Sc.
    FieldMatrix m2b_inv =
        nb ? gf::solve(fb.m2b, FieldMatrix::identity(f, nb)) : FieldMatrix(f, 0, 0);
    FieldMatrix k2a = segment_rows(k2, 0, n2a);
    FieldMatrix k2b = segment_rows(k2, n2a, nb);
    FieldMatrix k2c = segment_rows(k2, n2a + nb, n2c);
    FieldMatrix dec2_s(f, cost, n.v2.cols());
    // Sa rows act through the first n2a coordinates only (the zero padding is
    // discarded), composed with k2a.
    paste(dec2_s, k2a, 0);
    paste(dec2_s, gf::mul(m2b_inv, k2b), n1a);
    paste(dec2_s, k2c, n1a + nb + n1c);
    FieldMatrix q2p_trunc = fa.q2p.col_range(0, n2a);
    FieldMatrix p2p_trunc = fa.p2p.col_range(0, n2a);
    FieldMatrix dec2_w = gf::add(gf::mul(gf::sub(q2p_trunc, p2p_trunc), k2a),
                                 gf::mul(gf::mul(gf::sub(FieldMatrix(f, n.v2p.cols(), nb),
                                                         fb.m2p),
                                                 m2b_inv),
                                         k2b));

    return {std::move(s_cols), n1a, nb, n1c + n2c,
            std::move(dec1_s), std::move(dec1_w), std::move(dec2_s), std::move(dec2_w)};
}

// Compose a reduced-demand decode map with a normalization reconstruction:
// W_orig = [W_red | W'] * rec, W_red = S*ds + W'*dw
// => W_orig = S*(ds*recA) + W'*(dw*recA + recB).
inline FieldMatrix compose_decode(const FieldMatrix& ds, const FieldMatrix& dw,
                                  const FieldMatrix& rec, size_t n_red) {
    FieldMatrix rec_a = rec.row_range(0, n_red);
    FieldMatrix rec_b = rec.row_range(n_red, rec.rows() - n_red);
    return gf::vstack(gf::mul(ds, rec_a), gf::add(gf::mul(dw, rec_a), rec_b));
}

}  // namespace detail

/// End-to-end solve: normalize, decompose, orient so the larger a-part leads,
/// emit the broadcast columns and exact decode maps, and report cost and
/// capacity. The emitted cost always equals the converse denominator.
inline std::pair<LinearScheme, LinearBounds> build_scheme(const LinearCBInstance& inst) {
    NormalizeResult norm = normalize(inst);
    Decomposition dec = decompose(norm.reduced);

    bool swapped = dec.n1a() < dec.n2a();
    LinearCBInstance work = swapped ? norm.reduced.swapped_users() : norm.reduced;
    Decomposition wdec = swapped ? dec.swapped_users() : dec;
    const FieldMatrix& rec_first = swapped ? norm.reconstruct2 : norm.reconstruct1;
    const FieldMatrix& rec_second = swapped ? norm.reconstruct1 : norm.reconstruct2;

    detail::CoreScheme core = detail::build_core(work, wdec);

    FieldMatrix dec_first =
        detail::compose_decode(core.dec1_s, core.dec1_w, rec_first, work.v1.cols());
    FieldMatrix dec_second =
        detail::compose_decode(core.dec2_s, core.dec2_w, rec_second, work.v2.cols());

    LinearScheme scheme{inst.field,
                        inst.m,
                        core.s_cols,
                        core.seg_a,
                        core.seg_b,
                        core.seg_c,
                        swapped ? std::move(dec_second) : std::move(dec_first),
                        swapped ? std::move(dec_first) : std::move(dec_second),
                        core.s_cols.cols(),
                        swapped};

    LinearBounds bounds{gf::rank(inst.v1) + gf::rank(inst.v2),
                        gf::rank(gf::hstack(inst.v1, inst.v2)),
                        converse_denominator_symbols(inst),
                        scheme.cost_symbols,
                        std::log2(double(inst.field.p())),
                        true,
                        swapped};
    return {std::move(scheme), bounds};
}

struct VerificationReport {
    struct Check {
        std::string name;
        bool pass;
    };
    std::vector<Check> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Symbolic verification of a scheme against an instance: span decodability
/// for both users, no redundant broadcast columns, cost equal to the converse
/// denominator, and exact decode maps when present.
inline VerificationReport verify_scheme(const LinearCBInstance& inst, const LinearScheme& s) {
    VerificationReport rep;
    auto check = [&](std::string name, bool ok) { rep.checks.push_back({std::move(name), ok}); };

    auto spans = [&](const FieldMatrix& demand, const FieldMatrix& side) {
        FieldMatrix known = gf::hstack(s.s_cols, side);
        const size_t base = gf::rank(known);
        return gf::rank(gf::hstack(known, demand)) == base;
    };
    check("user1 demand in span([S | V1'])", spans(inst.v1, inst.v1p));
    check("user2 demand in span([S | V2'])", spans(inst.v2, inst.v2p));
    check("broadcast columns independent", gf::rank(s.s_cols) == s.cost_symbols);
    check("cost matches converse denominator",
          s.cost_symbols == converse_denominator_symbols(inst));

    if (s.decode1.rows() == s.cost_symbols + inst.v1p.cols() &&
        s.decode2.rows() == s.cost_symbols + inst.v2p.cols()) {
        auto exact = [&](const FieldMatrix& decode, const FieldMatrix& demand,
                         const FieldMatrix& side) {
            return gf::mul(gf::hstack(s.s_cols, side), decode) == demand;
        };
        check("user1 decode map exact", exact(s.decode1, inst.v1, inst.v1p));
        check("user2 decode map exact", exact(s.decode2, inst.v2, inst.v2p));
    }
    return rep;
}

}  // namespace cbcast::lcb

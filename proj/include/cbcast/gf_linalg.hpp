#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

#include "cbcast/errors.hpp"

namespace cbcast::gf {

/// Prime field GF(p), 2 <= p < 2^16. Element values live in [0, p).
class PrimeField {
  public:
    explicit PrimeField(uint32_t p) : p_(p) {
        if (p < 2 || p >= (1u << 16) || !is_prime(p))
            throw InvariantError("field modulus must be a prime in [2, 2^16): got " +
                                 std::to_string(p));
    }

    uint32_t p() const { return p_; }

    uint32_t add(uint32_t a, uint32_t b) const { return (a + b) % p_; }
    uint32_t sub(uint32_t a, uint32_t b) const { return (a + p_ - b % p_) % p_; }
    uint32_t mul(uint32_t a, uint32_t b) const { return (uint64_t(a) * b) % p_; }
    uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }

    uint32_t inv(uint32_t a) const {
        a %= p_;
        if (a == 0) throw Error("inverse of zero");
        // Fermat: a^(p-2)
        uint64_t base = a, acc = 1, e = p_ - 2;
        while (e) {
            if (e & 1) acc = acc * base % p_;
            base = base * base % p_;
            e >>= 1;
        }
        return uint32_t(acc);
    }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

    static bool is_prime(uint32_t n) {
        if (n < 2) return false;
        for (uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

  private:
    uint32_t p_;
};

/// Dense row-major matrix over GF(p). Zero-sized shapes are legal everywhere.
class FieldMatrix {
  public:
    FieldMatrix(PrimeField f, size_t rows, size_t cols)
        : f_(f), rows_(rows), cols_(cols), e_(rows * cols, 0) {}

    static FieldMatrix identity(PrimeField f, size_t n) {
        FieldMatrix m(f, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    /// Build from columns given as length-m coefficient vectors.
    static FieldMatrix from_columns(PrimeField f, size_t m,
                                    const std::vector<std::vector<uint32_t>>& cols) {
        FieldMatrix r(f, m, cols.size());
        for (size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m) throw InvariantError("column length mismatch");
            for (size_t i = 0; i < m; ++i) r.at(i, j) = cols[j][i] % f.p();
        }
        return r;
    }

    const PrimeField& field() const { return f_; }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    uint16_t& at(size_t r, size_t c) { return e_[r * cols_ + c]; }
    uint16_t at(size_t r, size_t c) const { return e_[r * cols_ + c]; }

    std::vector<uint32_t> col(size_t j) const {
        std::vector<uint32_t> v(rows_);
        for (size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
        return v;
    }

    FieldMatrix columns(const std::vector<size_t>& idx) const {
        FieldMatrix r(f_, rows_, idx.size());
        for (size_t j = 0; j < idx.size(); ++j)
            for (size_t i = 0; i < rows_; ++i) r.at(i, j) = at(i, idx[j]);
        return r;
    }

    FieldMatrix col_range(size_t first, size_t count) const {
        FieldMatrix r(f_, rows_, count);
        for (size_t j = 0; j < count; ++j)
            for (size_t i = 0; i < rows_; ++i) r.at(i, j) = at(i, first + j);
        return r;
    }

    FieldMatrix row_range(size_t first, size_t count) const {
        FieldMatrix r(f_, count, cols_);
        for (size_t i = 0; i < count; ++i)
            for (size_t j = 0; j < cols_; ++j) r.at(i, j) = at(first + i, j);
        return r;
    }

    bool operator==(const FieldMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }

    bool is_zero() const {
        for (auto v : e_)
            if (v) return false;
        return true;
    }

  private:
    PrimeField f_;
    size_t rows_, cols_;
    std::vector<uint16_t> e_;
};

inline FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows() != b.rows()) throw InvariantError("hstack: row count mismatch");
    FieldMatrix r(a.field(), a.rows(), a.cols() + b.cols());
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
        for (size_t j = 0; j < b.cols(); ++j) r.at(i, a.cols() + j) = b.at(i, j);
    }
    return r;
}

inline FieldMatrix hstack(std::initializer_list<FieldMatrix> ms) {
    auto it = ms.begin();
    FieldMatrix r = *it++;
    for (; it != ms.end(); ++it) r = hstack(r, *it);
    return r;
}

inline FieldMatrix vstack(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols() != b.cols()) throw InvariantError("vstack: column count mismatch");
    FieldMatrix r(a.field(), a.rows() + b.rows(), a.cols());
    for (size_t j = 0; j < a.cols(); ++j) {
        for (size_t i = 0; i < a.rows(); ++i) r.at(i, j) = a.at(i, j);
        for (size_t i = 0; i < b.rows(); ++i) r.at(a.rows() + i, j) = b.at(i, j);
    }
    return r;
}

inline FieldMatrix mul(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols() != b.rows()) throw InvariantError("mul: shape mismatch");
    const auto& f = a.field();
    FieldMatrix r(f, a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) {
            uint64_t acc = 0;
            for (size_t k = 0; k < a.cols(); ++k) acc += uint64_t(a.at(i, k)) * b.at(k, j);
            r.at(i, j) = uint16_t(acc % f.p());
        }
    return r;
}

inline FieldMatrix add(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvariantError("add: shape mismatch");
    FieldMatrix r(a.field(), a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) r.at(i, j) = uint16_t(a.field().add(a.at(i, j), b.at(i, j)));
    return r;
}

inline FieldMatrix sub(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvariantError("sub: shape mismatch");
    FieldMatrix r(a.field(), a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) r.at(i, j) = uint16_t(a.field().sub(a.at(i, j), b.at(i, j)));
    return r;
}

struct RrefResult {
    FieldMatrix r;
    std::vector<size_t> pivot_cols;
    size_t rank;
};

/// Reduced row echelon form with leftmost pivots (deterministic: the pivot for
/// each column is the first eligible row).
inline RrefResult rref(const FieldMatrix& m) {
    const auto& f = m.field();
    FieldMatrix r = m;
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t c = 0; c < r.cols() && row < r.rows(); ++c) {
        size_t sel = row;
        while (sel < r.rows() && r.at(sel, c) == 0) ++sel;
        if (sel == r.rows()) continue;
        if (sel != row)
            for (size_t j = 0; j < r.cols(); ++j) std::swap(r.at(row, j), r.at(sel, j));
        const uint32_t inv = f.inv(r.at(row, c));
        for (size_t j = 0; j < r.cols(); ++j) r.at(row, j) = uint16_t(f.mul(r.at(row, j), inv));
        for (size_t i = 0; i < r.rows(); ++i) {
            if (i == row || r.at(i, c) == 0) continue;
            const uint32_t factor = r.at(i, c);
            for (size_t j = 0; j < r.cols(); ++j)
                r.at(i, j) = uint16_t(f.sub(r.at(i, j), f.mul(factor, r.at(row, j))));
        }
        pivots.push_back(c);
        ++row;
    }
    const size_t rk = pivots.size();
    return {std::move(r), std::move(pivots), rk};
}

inline size_t rank(const FieldMatrix& m) { return rref(m).rank; }

inline bool in_span(const std::vector<uint32_t>& v, const FieldMatrix& a) {
    FieldMatrix ext = hstack(a, FieldMatrix::from_columns(a.field(), a.rows(), {v}));
    return rank(ext) == rank(a);
}

/// Solve A*X = B column by column; free variables are set to zero, so the
/// solution is the deterministic leftmost-pivot one. Throws InconsistentSystem
/// when some column of B is outside span(A).
inline FieldMatrix solve(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows() != b.rows()) throw InvariantError("solve: row count mismatch");
    auto red = rref(hstack(a, b));
    for (size_t pc : red.pivot_cols)
        if (pc >= a.cols()) throw InconsistentSystem("solve: no solution exists");
    FieldMatrix x(a.field(), a.cols(), b.cols());
    for (size_t k = 0; k < red.pivot_cols.size(); ++k) {
        const size_t pc = red.pivot_cols[k];
        for (size_t j = 0; j < b.cols(); ++j) x.at(pc, j) = red.r.at(k, a.cols() + j);
    }
    return x;
}

/// Basis of the nullspace of A (one column per free variable, in column order).
inline FieldMatrix nullspace(const FieldMatrix& a) {
    const auto& f = a.field();
    auto red = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (size_t pc : red.pivot_cols) is_pivot[pc] = true;
    std::vector<size_t> free_cols;
    for (size_t c = 0; c < a.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    FieldMatrix basis(f, a.cols(), free_cols.size());
    for (size_t j = 0; j < free_cols.size(); ++j) {
        const size_t fc = free_cols[j];
        basis.at(fc, j) = 1;
        for (size_t k = 0; k < red.pivot_cols.size(); ++k)
            basis.at(red.pivot_cols[k], j) = uint16_t(f.neg(red.r.at(k, fc)));
    }
    return basis;
}

/// Columns of A that form a basis of its column space (the pivot columns).
inline FieldMatrix column_space_basis(const FieldMatrix& a) {
    return a.columns(rref(a).pivot_cols);
}

/// Basis of span(A) ∩ span(B) via the kernel of [A | B]: a kernel vector
/// (x; y) satisfies A·x = -B·y, so A·x ranges over the intersection.
inline FieldMatrix intersect_column_spaces(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.rows() != b.rows()) throw InvariantError("intersect: row count mismatch");
    FieldMatrix ker = nullspace(hstack(a, b));
    FieldMatrix xs = ker.row_range(0, a.cols());
    FieldMatrix w = mul(a, xs);
    return column_space_basis(w);
}

/// Columns extending `inner` to a basis of span(outer), chosen by scanning
/// outer's columns left to right. Requires span(inner) ⊆ span(outer) and
/// independent inner columns.
inline FieldMatrix extend_basis(const FieldMatrix& inner, const FieldMatrix& outer) {
    if (inner.rows() != outer.rows()) throw InvariantError("extend_basis: row count mismatch");
    if (rank(inner) != inner.cols())
        throw NotNested("extend_basis: inner columns are not independent");
    const size_t outer_rank = rank(outer);
    if (rank(hstack(outer, inner)) != outer_rank)
        throw NotNested("extend_basis: span(inner) not contained in span(outer)");
    FieldMatrix acc = inner;
    std::vector<size_t> keep;
    size_t cur = rank(acc);
    for (size_t j = 0; j < outer.cols() && cur < outer_rank; ++j) {
        FieldMatrix trial = hstack(acc, outer.col_range(j, 1));
        if (rank(trial) > cur) {
            acc = std::move(trial);
            keep.push_back(j);
            ++cur;
        }
    }
    return outer.columns(keep);
}

inline std::ostream& operator<<(std::ostream& os, const FieldMatrix& m) {
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m.at(i, j);
        os << "\n";
    }
    return os;
}

}  // namespace cbcast::gf

#pragma once

#include <numeric>
#include <vector>

#include "cbcast/errors.hpp"

namespace cbcast {

/// Permutation on [m], 0-indexed internally (reports and file formats add 1).
class Permutation {
  public:
    explicit Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
        std::vector<bool> hit(map_.size(), false);
        for (int v : map_) {
            if (v < 0 || size_t(v) >= map_.size() || hit[v])
                throw InvariantError("not a bijection on [m]");
            hit[v] = true;
        }
    }

    static Permutation identity(int m) {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(std::move(v));
    }

    /// x -> (x + k) mod m.
    static Permutation shift(int m, int k) {
        std::vector<int> v(m);
        for (int i = 0; i < m; ++i) v[i] = (i + k % m + m) % m;
        return Permutation(std::move(v));
    }

    int size() const { return int(map_.size()); }
    int operator()(int x) const { return map_[x]; }
    const std::vector<int>& mapping() const { return map_; }

    Permutation inverse() const {
        std::vector<int> inv(map_.size());
        for (size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = int(i);
        return Permutation(std::move(inv));
    }

    bool is_identity() const {
        for (size_t i = 0; i < map_.size(); ++i)
            if (map_[i] != int(i)) return false;
        return true;
    }

    bool is_derangement() const {
        for (size_t i = 0; i < map_.size(); ++i)
            if (map_[i] == int(i)) return false;
        return true;
    }

    bool operator==(const Permutation& o) const { return map_ == o.map_; }
    bool operator!=(const Permutation& o) const { return map_ != o.map_; }

  private:
    std::vector<int> map_;
};

/// compose(f, g)(x) = f(g(x)); the right factor acts first.
inline Permutation compose(const Permutation& f, const Permutation& g) {
    if (f.size() != g.size()) throw InvariantError("compose: size mismatch");
    std::vector<int> v(f.size());
    for (int i = 0; i < f.size(); ++i) v[i] = f(g(i));
    return Permutation(std::move(v));
}

template <typename Rng>
Permutation random_permutation(int m, Rng& rng) {
    std::vector<int> v(m);
    std::iota(v.begin(), v.end(), 0);
    for (int i = m - 1; i > 0; --i) std::swap(v[i], v[rng.uniform(uint64_t(i) + 1)]);
    return Permutation(std::move(v));
}

}  // namespace cbcast

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cbcast/errors.hpp"
#include "cbcast/matching.hpp"
#include "cbcast/rng.hpp"

namespace cbcast::binning {

/// Random-binning protocol parameters. n1^L tuples are hashed into
/// B = round(n2^{L(1-delta)}) bins; an acceptable product set of n2^L tuples
/// must deliver at least one member to bin 1, whose occupancy must stay under
/// (1+delta) times its mean.
struct BinningConfig {
    int n1;
    int n2;
    int L;
    double delta;  // <= 0 means the default 1/sqrt(L)
    int trials;
    uint64_t seed;

    BinningConfig(int n1_, int n2_, int L_, int trials_, uint64_t seed_, double delta_ = -1)
        : n1(n1_), n2(n2_), L(L_), delta(delta_), trials(trials_), seed(seed_) {
        if (n2 < 1 || n1 <= n2) throw DegenerateConfig("need 1 <= n2 < n1");
        if (L < 1) throw DegenerateConfig("need L >= 1");
        if (trials < 1) throw DegenerateConfig("need trials >= 1");
        if (delta <= 0) delta = 1.0 / std::sqrt(double(L));
    }

    double log2_bins() const { return L * (1.0 - delta) * std::log2(double(n2)); }

    /// log2 of the mean bin-1 occupancy n1^L / n2^{L(1-delta)}.
    double log2_mu1() const { return L * std::log2(double(n1)) - log2_bins(); }

    /// Fixed-length index budget per use of the protocol, in bits:
    /// log2((1+delta)*mu1).
    double bits_total() const { return std::log2(1.0 + delta) + log2_mu1(); }

    double bits_per_symbol() const { return bits_total() / L; }

    /// Chebyshev failure bound: occupancy-overflow term (B-1)/(d^2 n1^L) plus
    /// empty-bin term (1 - 1/B)/(d^2 n2^{Ld}). Evaluated in log space once the
    /// bin count leaves double range (the -1 is then far below precision).
    double chebyshev_bound() const {
        const double d2 = delta * delta;
        const double lb = log2_bins();
        const double lg_n1L = L * std::log2(double(n1));
        const double term1 = lb < 50 ? (std::exp2(lb) - 1.0) * std::exp2(-lg_n1L) / d2
                                     : std::exp2(lb - lg_n1L) / d2;
        const double term2 =
            (1.0 - std::exp2(-lb)) * std::exp2(-double(L) * delta * std::log2(double(n2))) / d2;
        return term1 + term2;
    }

    bool exact_regime() const { return L * std::log2(double(n1)) <= std::log2(1e6); }
};

struct BinningResult {
    double empirical_error;
    double bits_per_symbol;
    double chebyshev_bound;
    long trials;
    long failures;
};

namespace detail {

// One trial in the exact regime: materialize all tuples, hash them into B
// bins, draw the acceptable per-coordinate choices, and evaluate both error
// events by counting.
inline bool trial_exact(const BinningConfig& cfg, Rng& rng) {
    uint64_t total = 1;
    for (int l = 0; l < cfg.L; ++l) total *= uint64_t(cfg.n1);
    const uint64_t bins = std::max<uint64_t>(
        1, uint64_t(std::llround(std::exp2(cfg.log2_bins()))));
    const double mu1 = double(total) / double(bins);
    const uint64_t key = rng.u64();

    // acceptable values per coordinate: an n2-subset of [n1]
    std::vector<std::vector<int>> acceptable(cfg.L);
    for (auto& a : acceptable) {
        std::vector<int> all(cfg.n1);
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < cfg.n2; ++i)
            std::swap(all[i], all[i + rng.uniform(uint64_t(cfg.n1 - i))]);
        a.assign(all.begin(), all.begin() + cfg.n2);
        std::sort(a.begin(), a.end());
    }

    uint64_t t1 = 0, t2 = 0;
    std::vector<int> digits(cfg.L, 0);
    for (uint64_t idx = 0; idx < total; ++idx) {
        if (keyed_hash(key, idx) % bins == 0) {
            ++t1;
            bool ok = true;
            for (int l = 0; l < cfg.L && ok; ++l)
                ok = std::binary_search(acceptable[l].begin(), acceptable[l].end(), digits[l]);
            if (ok) ++t2;
        }
        for (int l = 0; l < cfg.L; ++l) {
            if (++digits[l] < cfg.n1) break;
            digits[l] = 0;
        }
    }
    return double(t1) >= (1.0 + cfg.delta) * mu1 || t2 == 0;
}

// One trial when the tuple space is too large to materialize. Both error
// events are sampled from their distributions directly:
//  - the empty-bin event has exact probability (1 - 1/B)^(n2^L);
//  - bin-1 occupancy is binomial with astronomically large mean; its upper
//    tail is sampled through the normal limit, and skipped outright when the
//    Chernoff bound is already below 1e-18.
inline bool trial_large(const BinningConfig& cfg, Rng& rng) {
    const double log2_mu2 = double(cfg.L) * cfg.delta * std::log2(double(cfg.n2));

    bool empty_bin;
    if (log2_mu2 > 7) {  // mu2 > 128 => P(empty) < 1e-55
        empty_bin = false;
    } else {
        const double mu2 = std::exp2(log2_mu2);
        const double log2_b = cfg.log2_bins();
        double log_p0;  // natural log of (1-1/B)^(n2^L) = exp(n2^L * ln(1-1/B))
        if (log2_b > 40) {
            log_p0 = -mu2;  // ln(1-x) ~ -x at x <= 2^-40
        } else {
            const double b = std::max(1.0, std::round(std::exp2(log2_b)));
            log_p0 = b == 1.0 ? -std::numeric_limits<double>::infinity()
                              : std::exp2(double(cfg.L) * std::log2(double(cfg.n2))) *
                                    std::log1p(-1.0 / b);
        }
        empty_bin = rng.uniform01() < std::exp(log_p0);
    }

    bool overflow = false;
    const double log2_mu1 = cfg.log2_mu1();
    // Chernoff: P(T1 >= (1+d)mu1) <= exp(-d^2 mu1 / 3).
    const double chernoff_exponent = cfg.delta * cfg.delta * std::exp2(std::min(log2_mu1, 400.0)) / 3.0;
    if (chernoff_exponent < 41.5) {  // exp(-41.5) ~ 1e-18
        const double mu1 = std::exp2(log2_mu1);
        const double z = rng.normal();
        overflow = mu1 + z * std::sqrt(mu1) >= (1.0 + cfg.delta) * mu1;
    } else {
        (void)rng.normal();  // keep the stream layout independent of the branch
    }
    return empty_bin || overflow;
}

}  // namespace detail

inline BinningResult simulate_binning(const BinningConfig& cfg) {
    if (std::exp2(cfg.log2_bins()) < 0.5)
        throw DegenerateConfig("bin count rounds below 1");
    const bool exact = cfg.exact_regime();
    long failures = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        Rng rng(cfg.seed, uint64_t(t));
        failures += (exact ? detail::trial_exact(cfg, rng) : detail::trial_large(cfg, rng)) ? 1 : 0;
    }
    return {double(failures) / cfg.trials, cfg.bits_per_symbol(), cfg.chebyshev_bound(),
            cfg.trials, failures};
}

/// Outcome of an end-to-end protocol run. Decoding is verified on every
/// trial; binning failures fall back to uncoded broadcast, so they raise the
/// cost but never cause a decode error.
struct SchemeRunResult {
    double bits_per_symbol_mean = 0;
    double bits_per_symbol_std = 0;
    long decode_errors = 0;
    double binning_failure_rate = 0;
    double chebyshev_bound = 0;
    int L = 0;
    int trials = 0;
    uint64_t seed = 0;
    std::string mode;
    std::optional<double> scheme_4x3_bits_per_symbol;
};

namespace detail {

// Sample only the success/failure of one binning use (cost is accounted with
// the fixed analytic budget).
inline bool binning_failure(const BinningConfig& cfg, Rng& rng) {
    return cfg.exact_regime() ? trial_exact(cfg, rng) : trial_large(cfg, rng);
}

struct RunningStats {
    double mu = 0, m2 = 0;
    long n = 0;
    void add(double x) {
        ++n;
        const double d = x - mu;
        mu += d / double(n);
        m2 += d * (x - mu);
    }
    double mean() const { return mu; }
    double stddev() const { return std::sqrt(std::max(0.0, m2 / double(n))); }
};

}  // namespace detail

namespace detail {

// Binning-fronted protocol: per trial, random binning either succeeds (one
// acceptable bullet-set translation is conveyed per coordinate and each
// coordinate sends delta_{w1'}(w1)) or the trial falls back to uncoded
// broadcast of `fallback_bits` total. Decoding is checked coordinate by
// coordinate; failures never produce decode errors, only cost.
inline SchemeRunResult run_binning_protocol(const matching::MatchingInstance& inst, int L,
                                            int trials, uint64_t seed, double fallback_bits,
                                            bool force_fallback) {
    using namespace matching;
    SchemeRunResult res;
    res.L = L;
    res.trials = trials;
    res.seed = seed;
    res.mode = "binning";
    const double lg_m = std::log2(double(inst.m));

    const int n1 = inst.m1 * inst.m2;
    const int n2 = inst.m1 + inst.m2 - 1;
    const BinningConfig bin_cfg(n1, n2, L, 1, seed, -1);
    res.chebyshev_bound = bin_cfg.chebyshev_bound();

    std::vector<DeltaGammaScheme> fams;
    const BulletSet std_form = standard_bullet_set(inst.m1, inst.m2);
    for (int z1 = 0; z1 < inst.m1; ++z1)
        for (int z2 = 0; z2 < inst.m2; ++z2)
            fams.push_back(build_delta_gamma(inst, translate(std_form, z1, z2)));
    std::vector<std::vector<int>> acceptable(inst.m1 * inst.m2);
    for (size_t id = 0; id < fams.size(); ++id)
        for (const auto& [r, c] : fams[id].bullet.cells)
            acceptable[r * inst.m2 + c].push_back(int(id));

    const double success_bits = bin_cfg.bits_total() + L * lg_m + 1.0;
    RunningStats stats;
    long failures = 0;

    for (int t = 0; t < trials; ++t) {
        Rng rng(seed, uint64_t(t));
        const bool failed = force_fallback || binning_failure(bin_cfg, rng);
        for (int l = 0; l < L; ++l) {
            const int a = int(rng.uniform(uint64_t(inst.m1)));
            const int b = int(rng.uniform(uint64_t(inst.m2)));
            const int w1 = int(rng.uniform(uint64_t(inst.m)));
            const int w2 = inst.pi[a][b](w1);
            if (failed) continue;  // uncoded: both messages sent verbatim
            const auto& ids = acceptable[a * inst.m2 + b];
            const DeltaGammaScheme& fam = fams[ids[rng.uniform(ids.size())]];
            const int s = encode_bullet(fam, a, w1);
            if (decode_user1(fam, s, a) != w1 || decode_user2(fam, s, b) != w2)
                ++res.decode_errors;
        }
        failures += failed ? 1 : 0;
        stats.add((failed ? fallback_bits : success_bits) / L);
    }
    res.binning_failure_rate = double(failures) / trials;
    res.bits_per_symbol_mean = stats.mean();
    res.bits_per_symbol_std = stats.stddev();
    return res;
}

}  // namespace detail

/// General matching-instance protocol. Maximally structured instances
/// short-circuit to the single-use scheme at exactly log2(m) bits per symbol;
/// everything else goes through random binning with n1 = m1*m2 translations,
/// n2 = m1+m2-1 acceptable ones, and uncoded fallback of 2L*log2(m)+1 bits.
/// On 4x3 grids the non-asymptotic selector-bit scheme is also run and
/// reported.
inline SchemeRunResult run_matching_scheme(const matching::MatchingInstance& inst, int L,
                                           int trials, uint64_t seed,
                                           bool force_fallback = false) {
    using namespace matching;
    const double lg_m = std::log2(double(inst.m));

    SchemeRunResult res;
    if (classify(inst) == StructureClass::Maximal) {
        res.L = L;
        res.trials = trials;
        res.seed = seed;
        res.mode = "maximal-single-use";
        DeltaGammaScheme fam = build_delta_gamma(inst, standard_bullet_set(inst.m1, inst.m2));
        for (int t = 0; t < trials; ++t) {
            Rng rng(seed, uint64_t(t));
            for (int l = 0; l < L; ++l) {
                const int a = int(rng.uniform(uint64_t(inst.m1)));
                const int b = int(rng.uniform(uint64_t(inst.m2)));
                const int w1 = int(rng.uniform(uint64_t(inst.m)));
                const int w2 = inst.pi[a][b](w1);
                const int s = encode_bullet(fam, a, w1);
                if (decode_user1(fam, s, a) != w1 || decode_user2(fam, s, b) != w2)
                    ++res.decode_errors;
            }
        }
        res.bits_per_symbol_mean = lg_m;
        res.bits_per_symbol_std = 0;
    } else {
        res = detail::run_binning_protocol(inst, L, trials, seed, 2.0 * L * lg_m + 1.0,
                                           force_fallback);
    }

    if (inst.m1 == 4 && inst.m2 == 3) {
        Scheme4x3 s43 = scheme_4x3(inst);
        res.scheme_4x3_bits_per_symbol = Scheme4x3::cost_bits(inst.m);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 3; ++b)
                for (int w1 = 0; w1 < inst.m; ++w1) {
                    const auto [sel, sym] = s43.encode(a, b, w1);
                    if (s43.decode1(sel, sym, a) != w1 ||
                        s43.decode2(sel, sym, b) != inst.pi[a][b](w1))
                        ++res.decode_errors;
                }
    }
    return res;
}

/// End-to-end pipeline on the 4-symbol shift instance whose length-4 cycle is
/// a derangement: binning conveys one non-matching side-information cell per
/// coordinate (4 tuples, 3 acceptable), the per-coordinate 3-cell scheme runs
/// at 2 bits, and binning failures fall back to 8L+1 uncoded bits.
inline SchemeRunResult run_cb2_scheme(int L, int trials, uint64_t seed,
                                      bool force_fallback = false) {
    if (L < 4) throw DegenerateConfig("run_cb2_scheme needs L >= 4");
    std::vector<std::vector<Permutation>> pi = {
        {Permutation::shift(4, 0), Permutation::shift(4, 1)},
        {Permutation::shift(4, 3), Permutation::shift(4, 2)}};
    matching::MatchingInstance cb2(4, 2, 2, std::move(pi));
    SchemeRunResult res =
        detail::run_binning_protocol(cb2, L, trials, seed, 8.0 * L + 1.0, force_fallback);
    res.mode = "cb2-binning";
    return res;
}

}  // namespace cbcast::binning

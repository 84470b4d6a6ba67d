// Command-line front door for the computation-broadcast toolkit: instance
// analysis, linear scheme emission, matching classification and bounds,
// single-use oracle, and protocol simulation.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbcast/binning_sim.hpp"
#include "cbcast/distributions.hpp"
#include "cbcast/instances.hpp"
#include "cbcast/json_io.hpp"
#include "cbcast/lcb_solver.hpp"
#include "cbcast/matching.hpp"
#include "cbcast/oracle.hpp"

using nlohmann::json;
using namespace cbcast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitParse = 2;

uint64_t default_seed() {
    if (const char* env = std::getenv("CBCAST_SEED")) return std::strtoull(env, nullptr, 10);
    return 20240901;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

void emit(const json& j, bool as_json, const std::string& human) {
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
}

json linear_report_json(const lcb::LinearBounds& b, const lcb::VerificationReport& ver) {
    json j;
    j["type"] = "linear";
    j["cost_symbols"] = b.cost_symbols;
    j["cost_bits"] = b.cost_bits();
    j["converse_denominator_symbols"] = b.converse_denominator_symbols;
    j["demanded_symbols"] = b.demanded_symbols;
    j["joint_rank"] = b.joint_rank;
    j["capacity"] = b.cost_symbols ? b.capacity().str() : "undefined";
    j["tight"] = b.tight;
    j["orientation"] = b.swapped ? "swapped" : "normal";
    j["verified"] = ver.all_pass();
    return j;
}

int run_linear_analysis(const lcb::LinearCBInstance& inst, bool as_json,
                        const std::string& emit_path) {
    auto [scheme, bounds] = lcb::build_scheme(inst);
    auto ver = lcb::verify_scheme(inst, scheme);
    std::ostringstream os;
    os << "linear instance over GF(" << inst.field.p() << "), m = " << inst.m << "\n"
       << "  broadcast cost: " << bounds.cost_symbols << " symbols ("
       << fmt(bounds.cost_bits()) << " bits)\n"
       << "  converse denominator: " << bounds.converse_denominator_symbols << " symbols\n"
       << "  capacity: "
       << (bounds.cost_symbols ? bounds.capacity().str() : std::string("undefined (empty demand)"))
       << " (tight)\n"
       << "  orientation: " << (scheme.swapped ? "swapped" : "normal") << "\n"
       << "  verification: " << (ver.all_pass() ? "all checks pass" : "FAILED") << "\n";
    for (const auto& c : ver.checks)
        if (!c.pass) os << "    failed: " << c.name << "\n";
    emit(linear_report_json(bounds, ver), as_json, os.str());
    if (!emit_path.empty()) {
        std::ofstream out(emit_path);
        out << io::scheme_to_json(scheme).dump(2) << "\n";
        if (!as_json) std::cout << "  scheme written to " << emit_path << "\n";
    }
    return ver.all_pass() ? kExitOk : kExitAnalysis;
}

int run_general_bounds(const dist::GeneralCBInstance& inst, bool as_json) {
    auto conv = dist::converse_bound(inst);
    auto l1 = oracle::brute_capacity_L1(inst);
    json j;
    j["type"] = "general";
    j["h_w1w2_bits"] = conv.h_w1w2_bits;
    j["converse_cost_lb_bits"] = conv.converse_cost_lb_bits;
    j["capacity_ub"] = conv.capacity_ub ? json(*conv.capacity_ub) : json();
    j["oracle_h1_bits"] = l1.h_bits;
    j["rstar1"] = l1.rstar1;
    j["oracle_optimal"] = l1.coloring.optimal;
    j["note"] = "capacity open: bracket [converse, single-use oracle] only";
    std::ostringstream os;
    os << "general instance, " << inst.atoms().size() << " support atoms\n"
       << "  H(w1,w2) = " << fmt(conv.h_w1w2_bits) << " bits\n"
       << "  converse cost lower bound: " << fmt(conv.converse_cost_lb_bits) << " bits"
       << " (capacity <= " << fmt(conv.capacity_ub.value_or(0)) << ")\n"
       << "  single-use optimum H(S): " << fmt(l1.h_bits) << " bits"
       << (l1.coloring.optimal ? "" : " (search budget hit, upper bound only)") << "\n"
       << "  R*_1 = " << fmt(l1.rstar1) << "\n"
       << "  capacity open: only the bracket [converse, single-use] is certified\n";
    emit(j, as_json, os.str());
    return kExitOk;
}

int run_matching_bounds(const matching::MatchingInstance& inst, bool as_json,
                        uint64_t cycle_cap) {
    auto b = matching::bounds(inst, cycle_cap);
    json j = io::matching_bounds_to_json(b);
    std::ostringstream os;
    os << "matching instance m=" << inst.m << " grid " << inst.m1 << "x" << inst.m2 << "\n"
       << "  class: " << matching::to_string(b.cls) << "\n"
       << "  optimal cost H*: ";
    if (b.hstar_bits)
        os << fmt(*b.hstar_bits) << " bits (tight)\n";
    else
        os << "in [" << fmt(b.hstar_lb_bits) << ", " << fmt(b.hstar_ub_bits) << "] bits\n";
    os << "  capacity: ";
    if (b.tight)
        os << fmt(b.capacity_lb) << "\n";
    else
        os << "in [" << fmt(b.capacity_lb) << ", " << fmt(b.capacity_ub)
           << "] (exact value open for this class)\n";
    emit(j, as_json, os.str());
    return kExitOk;
}

int run_oracle(const dist::GeneralCBInstance& inst, bool as_json, uint64_t budget) {
    oracle::SearchOptions opts;
    opts.node_budget = budget;
    auto l1 = oracle::brute_capacity_L1(inst, opts);
    json j;
    j["h_bits"] = l1.h_bits;
    j["rstar1"] = l1.rstar1;
    j["optimal"] = l1.coloring.optimal;
    j["nodes"] = l1.coloring.nodes;
    j["capacity_ub"] = l1.converse.capacity_ub ? json(*l1.converse.capacity_ub) : json();
    j["gap_to_capacity_ub"] = l1.capacity_gap;
    json classes = json::array();
    for (int c : l1.coloring.colors) classes.push_back(c);
    j["coloring"] = classes;
    std::ostringstream os;
    os << "single-use oracle over " << inst.atoms().size() << " atoms\n"
       << "  min H(S) = " << fmt(l1.h_bits) << " bits"
       << (l1.coloring.optimal ? " (certified optimal)" : " (budget hit: upper bound)") << "\n"
       << "  R*_1 = " << fmt(l1.rstar1) << ", capacity upper bound "
       << fmt(l1.converse.capacity_ub.value_or(0)) << ", gap " << fmt(l1.capacity_gap) << "\n";
    emit(j, as_json, os.str());
    return kExitOk;
}

json simulate_json(const binning::SchemeRunResult& r) {
    json j;
    j["bits_per_symbol_mean"] = r.bits_per_symbol_mean;
    j["bits_per_symbol_std"] = r.bits_per_symbol_std;
    j["decode_errors"] = r.decode_errors;
    j["binning_failure_rate"] = r.binning_failure_rate;
    j["chebyshev_bound"] = r.chebyshev_bound;
    j["L"] = r.L;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["mode"] = r.mode;
    if (r.scheme_4x3_bits_per_symbol) j["scheme_4x3_bits_per_symbol"] = *r.scheme_4x3_bits_per_symbol;
    return j;
}

int run_selftest(bool as_json);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computation broadcast analysis toolkit"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    std::string path, emit_path, scheme_path;
    uint64_t cycle_cap = 1000000;
    uint64_t oracle_budget = 50000000;
    int L = 100, trials = 1000;
    std::optional<int> n1, n2;
    uint64_t seed = default_seed();
    bool sim_cb2 = false;

    auto* analyze = app.add_subcommand("analyze", "full pipeline for any instance type");
    analyze->add_option("path", path, "instance file")->required();

    auto* solve = app.add_subcommand("solve", "build and verify the optimal linear scheme");
    solve->add_option("path", path, "linear instance file")->required();
    solve->add_option("--emit", emit_path, "write the scheme as JSON");

    auto* verify = app.add_subcommand("verify", "re-verify an emitted scheme against an instance");
    verify->add_option("path", path, "linear instance file")->required();
    verify->add_option("--scheme", scheme_path, "scheme file")->required();

    auto* classify = app.add_subcommand("classify", "structure class of a matching instance");
    classify->add_option("path", path, "matching instance file")->required();
    classify->add_option("--cycle-cap", cycle_cap, "cycle enumeration budget");

    auto* bounds = app.add_subcommand("bounds", "converse/achievability bounds");
    bounds->add_option("path", path, "instance file")->required();
    bounds->add_option("--cycle-cap", cycle_cap, "cycle enumeration budget");

    auto* oracle_cmd = app.add_subcommand("oracle", "exact single-use minimum-entropy encoder");
    oracle_cmd->add_option("path", path, "instance file")->required();
    oracle_cmd->add_option("--cap", oracle_budget, "search node budget");

    auto* simulate = app.add_subcommand("simulate", "seeded protocol simulation");
    simulate->add_option("path", path, "matching instance file");
    simulate->add_option("--n1", n1, "tuple alphabet per coordinate (raw binning)");
    simulate->add_option("--n2", n2, "acceptable alphabet per coordinate (raw binning)");
    simulate->add_flag("--cb2", sim_cb2, "end-to-end run on the bundled cb2 instance");
    simulate->add_option("--L", L, "block length");
    simulate->add_option("--trials", trials, "number of trials");
    simulate->add_option("--seed", seed, "master seed (default: CBCAST_SEED or fixed)");

    auto* selftest = app.add_subcommand("selftest", "rerun the bundled golden examples");

    // let trailing global flags (e.g. --json) reach the parent parser
    for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*selftest) return run_selftest(as_json);

        if (*simulate) {
            binning::SchemeRunResult res;
            if (sim_cb2) {
                res = binning::run_cb2_scheme(L, trials, seed);
            } else if (n1 && n2) {
                auto r = binning::simulate_binning(binning::BinningConfig(*n1, *n2, L, trials, seed));
                json j;
                j["empirical_error"] = r.empirical_error;
                j["bits_per_symbol"] = r.bits_per_symbol;
                j["chebyshev_bound"] = r.chebyshev_bound;
                j["L"] = L;
                j["trials"] = r.trials;
                j["seed"] = seed;
                std::ostringstream os;
                os << "binning (" << *n1 << " -> " << *n2 << "), L=" << L << ", " << trials
                   << " trials\n"
                   << "  empirical failure rate: " << fmt(r.empirical_error) << "\n"
                   << "  bound on failure rate:  " << fmt(r.chebyshev_bound) << "\n"
                   << "  bits per symbol:        " << fmt(r.bits_per_symbol) << "\n";
                emit(j, as_json, os.str());
                return kExitOk;
            } else if (!path.empty()) {
                auto inst = io::parse_instance(path);
                auto* m = std::get_if<matching::MatchingInstance>(&inst);
                if (!m) throw Error("simulate expects a matching instance file");
                res = binning::run_matching_scheme(*m, L, trials, seed);
            } else {
                throw Error("simulate needs a path, --cb2, or --n1/--n2");
            }
            std::ostringstream os;
            os << "simulation (" << res.mode << "), L=" << res.L << ", " << res.trials
               << " trials, seed " << res.seed << "\n"
               << "  bits per symbol: mean " << fmt(res.bits_per_symbol_mean) << ", std "
               << fmt(res.bits_per_symbol_std) << "\n"
               << "  decode errors: " << res.decode_errors << "\n"
               << "  binning failure rate: " << fmt(res.binning_failure_rate)
               << " (bound " << fmt(res.chebyshev_bound) << ")\n";
            if (res.scheme_4x3_bits_per_symbol)
                os << "  non-asymptotic 4x3 scheme: " << fmt(*res.scheme_4x3_bits_per_symbol)
                   << " bits per symbol, exhaustively decoded\n";
            emit(simulate_json(res), as_json, os.str());
            return res.decode_errors == 0 ? kExitOk : kExitAnalysis;
        }

        auto inst = io::parse_instance(path);

        if (*verify) {
            auto* lin = std::get_if<lcb::LinearCBInstance>(&inst);
            if (!lin) throw Error("verify expects a linear instance");
            auto scheme = io::parse_scheme(scheme_path);
            auto rep = lcb::verify_scheme(*lin, scheme);
            json j;
            std::ostringstream os;
            for (const auto& c : rep.checks) {
                j[c.name] = c.pass;
                os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << "\n";
            }
            emit(j, as_json, os.str());
            return rep.all_pass() ? kExitOk : kExitAnalysis;
        }

        if (*classify) {
            auto* m = std::get_if<matching::MatchingInstance>(&inst);
            if (!m) throw Error("classify expects a matching instance");
            auto cls = matching::classify(*m, cycle_cap);
            json j;
            j["class"] = matching::to_string(cls);
            emit(j, as_json, "class: " + matching::to_string(cls) + "\n");
            return kExitOk;
        }

        if (*oracle_cmd) {
            if (auto* g = std::get_if<dist::GeneralCBInstance>(&inst))
                return run_oracle(*g, as_json, oracle_budget);
            if (auto* m = std::get_if<matching::MatchingInstance>(&inst))
                return run_oracle(matching::to_general(*m), as_json, oracle_budget);
            auto* lin = std::get_if<lcb::LinearCBInstance>(&inst);
            return run_oracle(dist::from_linear(*lin), as_json, oracle_budget);
        }

        if (*analyze || *bounds || *solve) {
            if (auto* lin = std::get_if<lcb::LinearCBInstance>(&inst))
                return run_linear_analysis(*lin, as_json, emit_path);
            if (*solve) throw Error("solve expects a linear instance");
            if (auto* m = std::get_if<matching::MatchingInstance>(&inst))
                return run_matching_bounds(*m, as_json, cycle_cap);
            return run_general_bounds(std::get<dist::GeneralCBInstance>(inst), as_json);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const InvariantError& e) {
        std::cerr << "invalid instance: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitOk;
}

namespace {

int run_selftest(bool as_json) {
    struct Result {
        std::string name;
        bool pass;
    };
    std::vector<Result> results;
    auto check = [&](const std::string& name, bool ok) { results.push_back({name, ok}); };
    auto near = [](double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; };

    try {
        const auto demo = builtin::lcb_demo();
        check("demo: full system spans F3^7",
              gf::rank(gf::hstack({demo.v1, demo.v2, demo.v1p, demo.v2p})) == 7);
        check("demo: rank(V1) = 4", gf::rank(demo.v1) == 4);

        auto sides = gf::hstack(demo.v1p, demo.v2p);
        auto v1a = gf::intersect_column_spaces(demo.v1, sides);
        auto v2a = gf::intersect_column_spaces(demo.v2, sides);
        check("demo: span(V1) meets side-info in dim 1 at e1+2e2",
              v1a.cols() == 1 && gf::in_span({1, 2, 0, 0, 0, 0, 0}, v1a));
        check("demo: span(V2) meets side-info in dim 1 at 2e1+e2",
              v2a.cols() == 1 && gf::in_span({2, 1, 0, 0, 0, 0, 0}, v2a));

        auto norm = lcb::normalize(demo);
        auto dec = lcb::decompose(norm.reduced);
        check("demo: a/b/c split sizes (1,2,1)/(1,2,0)",
              dec.n1a() == 1 && dec.n1b() == 2 && dec.n1c() == 1 && dec.n2a() == 1 &&
                  dec.n2b() == 2 && dec.n2c() == 0);

        auto [scheme, bounds] = lcb::build_scheme(demo);
        check("demo: cost 4 symbols", bounds.cost_symbols == 4);
        check("demo: capacity 7/4", bounds.capacity() == Rational(7) / Rational(4));
        check("demo: scheme verifies", lcb::verify_scheme(demo, scheme).all_pass());

        auto [s2, b2] = lcb::build_scheme(builtin::linear_min_dep());
        check("min-dep: cost 1, capacity 2",
              b2.cost_symbols == 1 && b2.capacity() == Rational(2));

        auto bf = builtin::butterfly();
        auto [s3, b3] = lcb::build_scheme(bf);
        check("butterfly: cost 1, capacity 2",
              b3.cost_symbols == 1 && b3.capacity() == Rational(2));
        check("butterfly: broadcast is the sum of the two symbols",
              s3.s_cols.cols() == 1 && gf::in_span({1, 1}, s3.s_cols));

        auto cb1 = builtin::cb1();
        auto cb2 = builtin::cb2();
        auto g1 = matching::to_general(cb1);
        auto g2 = matching::to_general(cb2);
        auto p1 = dist::entropy_profile(g1);
        auto p2 = dist::entropy_profile(g2);
        bool h_pattern = near(p1.h[dist::W1], 2) && near(p1.h[dist::W2], 2) &&
                         near(p1.h[dist::W1P], 1) && near(p1.h[dist::W2P], 1) &&
                         near(p1.h[dist::kAllVars], 4);
        for (unsigned a = 0; a < 4 && h_pattern; ++a)
            for (unsigned b = 0; b < 4; ++b) {
                if (a == b) continue;
                const unsigned mask = (1u << a) | (1u << b);
                h_pattern = near(p1.h[mask], p1.h[1u << a] + p1.h[1u << b]);
                if (!h_pattern) break;
            }
        check("cb1: subset entropies are (2,1,2,1), pairs additive, full 4", h_pattern);
        bool same = true;
        for (unsigned mask = 1; mask <= 15; ++mask)
            same = same && near(p1.h[mask], p2.h[mask]);
        check("cb2: entropy profile identical to cb1", same);

        auto conv2 = dist::converse_bound(g2);
        check("cb2: converse cost 2 bits, capacity upper bound 2",
              near(conv2.converse_cost_lb_bits, 2) && near(conv2.capacity_ub.value_or(0), 2));
        auto conv_andor = dist::converse_bound(builtin::andor());
        check("andor: converse cost 0.5 bits", near(conv_andor.converse_cost_lb_bits, 0.5));
        check("andor: H(w1|w1p) = 0.5",
              near(dist::cond_entropy(builtin::andor(), dist::W1, dist::W1P), 0.5));

        matching::GridCycle cyc{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
        check("cb1: the 2x2 cycle induces the identity",
              matching::induced_permutation(cb1, cyc).is_identity());
        check("cb2: the 2x2 cycle induces the shift-by-2 derangement",
              matching::induced_permutation(cb2, cyc) == Permutation::shift(4, 2));
        check("cb1 classifies maximal",
              matching::classify(cb1) == matching::StructureClass::Maximal);
        check("cb2 classifies minimal",
              matching::classify(cb2) == matching::StructureClass::Minimal);

        auto mb1 = matching::bounds(cb1);
        auto mb2 = matching::bounds(cb2);
        const double h2star = 4 - std::log2(3.0);
        check("cb1 bounds: H* = 2 bits, capacity 2",
              mb1.tight && near(*mb1.hstar_bits, 2) && near(mb1.capacity_lb, 2));
        check("cb2 bounds: H* = 4 - log2(3), capacity 4/(4-log2 3)",
              mb2.tight && near(*mb2.hstar_bits, h2star) &&
                  near(mb2.capacity_lb, 4.0 / h2star));

        check("bullet sets: standard size m1+m2-1 and 4 acceptable at (2,1) in 3x2",
              matching::standard_bullet_set(3, 2).cells.size() == 4 &&
                  matching::acceptable_sets(3, 2, {1, 0}).size() == 4);

        auto fam1 = matching::build_delta_gamma(cb1, matching::standard_bullet_set(2, 2));
        check("cb1 delta/gamma: (+0,+2), (id,+1) with off-set cell also matching",
              fam1.deltas[0] == Permutation::shift(4, 0) &&
                  fam1.deltas[1] == Permutation::shift(4, 2) &&
                  fam1.gammas[0].is_identity() && fam1.gammas[1] == Permutation::shift(4, 1) &&
                  compose(fam1.gammas[1], fam1.deltas[1]) == cb1.pi[1][1]);
        auto fam2 = matching::build_delta_gamma(cb2, matching::standard_bullet_set(2, 2));
        check("cb2 delta/gamma: (+0,+3), (id,+1); off-set cell disagrees",
              fam2.deltas[1] == Permutation::shift(4, 3) &&
                  fam2.gammas[1] == Permutation::shift(4, 1) &&
                  !(compose(fam2.gammas[1], fam2.deltas[1]) == cb2.pi[1][1]));

        check("4x3 grids: translation-cost gap is exactly 1 bit",
              near(std::log2(12.0) - std::log2(6.0), 1.0, 1e-15));

        auto l1_andor = oracle::brute_capacity_L1(builtin::andor());
        check("andor oracle: h = 2 - (3/4)log2 3, below capacity bound 3",
              near(l1_andor.h_bits, 2 - 0.75 * std::log2(3.0)) && l1_andor.rstar1 < 3.0 &&
                  near(l1_andor.converse.capacity_ub.value_or(0), 3));
        auto l1_cb1 = oracle::brute_capacity_L1(g1);
        check("cb1 oracle: h = 2 bits, certified optimal",
              near(l1_cb1.h_bits, 2) && l1_cb1.coloring.optimal);

        binning::BinningConfig bc(4, 3, 100, 1, 1);
        const double expect =
            (2 - std::log2(3.0)) + std::log2(3.0) / 10.0 + std::log2(1.0 + 0.1) / 100.0;
        check("binning: analytic bits/symbol matches closed form at (4,3,L=100)",
              near(bc.bits_per_symbol(), expect, 1e-12));

        auto cb2run = binning::run_cb2_scheme(16, 50, 7);
        check("cb2 end-to-end: zero decode errors on every trial", cb2run.decode_errors == 0);
    } catch (const std::exception& e) {
        check(std::string("unexpected exception: ") + e.what(), false);
    }

    bool all = true;
    json j;
    for (const auto& r : results) {
        all = all && r.pass;
        j[r.name] = r.pass;
        if (!as_json)
            std::cout << "[" << (r.pass ? "PASS" : "FAIL") << "] " << r.name << "\n";
    }
    if (as_json) std::cout << j.dump(2) << "\n";
    if (!as_json)
        std::cout << (all ? "all golden examples pass" : "FAILURES present") << "\n";
    return all ? kExitOk : kExitAnalysis;
}

}  // namespace

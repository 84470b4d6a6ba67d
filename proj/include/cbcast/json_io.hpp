#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cbcast/distributions.hpp"
#include "cbcast/errors.hpp"
#include "cbcast/lcb_solver.hpp"
#include "cbcast/matching.hpp"

namespace cbcast::io {

using nlohmann::json;

using ParsedInstance =
    std::variant<lcb::LinearCBInstance, dist::GeneralCBInstance, matching::MatchingInstance>;

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

inline const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where + "/" + key, "missing field");
    return *it;
}

inline long long as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<long long>();
}

inline gf::FieldMatrix parse_columns(const json& j, gf::PrimeField f, size_t m,
                                     const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of columns");
    std::vector<std::vector<uint32_t>> cols;
    for (size_t c = 0; c < j.size(); ++c) {
        const json& col = j[c];
        const std::string cw = where + "/" + std::to_string(c);
        if (!col.is_array() || col.size() != m)
            fail(cw, "expected a length-" + std::to_string(m) + " integer column");
        std::vector<uint32_t> v;
        for (size_t i = 0; i < m; ++i) {
            const long long x = as_int(col[i], cw + "/" + std::to_string(i));
            if (x < 0 || uint64_t(x) >= f.p())
                fail(cw + "/" + std::to_string(i),
                     "entry out of range [0, " + std::to_string(f.p()) + ")");
            v.push_back(uint32_t(x));
        }
        cols.push_back(std::move(v));
    }
    return gf::FieldMatrix::from_columns(f, m, cols);
}

inline lcb::LinearCBInstance parse_linear(const json& j) {
    const long long p = as_int(member(j, "field", ""), "/field");
    if (p < 2 || p >= (1 << 16) || !gf::PrimeField::is_prime(uint32_t(p)))
        throw InvariantError("/field: not a prime in [2, 2^16)");
    gf::PrimeField f{uint32_t(p)};
    const long long m = as_int(member(j, "m", ""), "/m");
    if (m < 1 || m > 64) fail("/m", "expected 1 <= m <= 64");
    return lcb::LinearCBInstance(f, size_t(m), parse_columns(member(j, "V1", ""), f, m, "/V1"),
                                 parse_columns(member(j, "V1p", ""), f, m, "/V1p"),
                                 parse_columns(member(j, "V2", ""), f, m, "/V2"),
                                 parse_columns(member(j, "V2p", ""), f, m, "/V2p"));
}

inline std::string label_of(const json& j) { return j.dump(); }

inline dist::GeneralCBInstance parse_general(const json& j) {
    const json& alpha = member(j, "alphabets", "");
    static const char* keys[4] = {"w1", "w1p", "w2", "w2p"};
    std::array<std::vector<std::string>, 4> alphabets;
    std::array<std::map<std::string, int>, 4> index;
    for (int k = 0; k < 4; ++k) {
        const json& a = member(alpha, keys[k], "/alphabets");
        const std::string where = std::string("/alphabets/") + keys[k];
        if (!a.is_array() || a.empty()) fail(where, "expected a non-empty array of labels");
        for (const auto& lab : a) {
            const std::string s = label_of(lab);
            if (!index[k].emplace(s, int(alphabets[k].size())).second)
                throw InvariantError(where + ": duplicate label " + s);
            alphabets[k].push_back(s);
        }
    }
    const json& pmf = member(j, "pmf", "");
    if (!pmf.is_array() || pmf.empty()) fail("/pmf", "expected a non-empty array");
    std::vector<dist::Atom> atoms;
    for (size_t i = 0; i < pmf.size(); ++i) {
        const std::string where = "/pmf/" + std::to_string(i);
        const json& entry = pmf[i];
        dist::Atom atom;
        for (int k = 0; k < 4; ++k) {
            const std::string lab = label_of(member(entry, keys[k], where));
            auto it = index[k].find(lab);
            if (it == index[k].end())
                throw InvariantError(where + "/" + keys[k] + ": label " + lab +
                                     " not in alphabet");
            atom.v[k] = it->second;
        }
        const json& p = member(entry, "p", where);
        if (!p.is_string()) fail(where + "/p", "expected a rational string \"num/den\"");
        atom.p = Rational::parse(p.get<std::string>());
        atoms.push_back(std::move(atom));
    }
    try {
        return dist::GeneralCBInstance(std::move(alphabets), std::move(atoms));
    } catch (const InvariantError& e) {
        throw InvariantError(std::string("/pmf: ") + e.what());
    }
}

inline matching::MatchingInstance parse_matching(const json& j) {
    const long long m = as_int(member(j, "m", ""), "/m");
    const long long m1 = as_int(member(j, "m1", ""), "/m1");
    const long long m2 = as_int(member(j, "m2", ""), "/m2");
    if (m < 1 || m1 < 1 || m2 < 1) fail("/m", "sizes must be positive");
    const json& pi = member(j, "pi", "");
    if (!pi.is_array() || pi.size() != size_t(m1)) fail("/pi", "expected m1 rows");
    std::vector<std::vector<Permutation>> table;
    for (size_t r = 0; r < pi.size(); ++r) {
        const json& row = pi[r];
        const std::string rw = "/pi/" + std::to_string(r);
        if (!row.is_array() || row.size() != size_t(m2)) fail(rw, "expected m2 permutations");
        std::vector<Permutation> prow;
        for (size_t c = 0; c < row.size(); ++c) {
            const json& perm = row[c];
            const std::string cw = rw + "/" + std::to_string(c);
            if (!perm.is_array() || perm.size() != size_t(m))
                fail(cw, "expected a length-m permutation (1-indexed)");
            std::vector<int> mapping;
            for (size_t i = 0; i < perm.size(); ++i) {
                const long long v = as_int(perm[i], cw + "/" + std::to_string(i));
                if (v < 1 || v > m)
                    throw InvariantError(cw + ": permutation entries must be in [1, m]");
                mapping.push_back(int(v - 1));
            }
            try {
                prow.push_back(Permutation(std::move(mapping)));
            } catch (const InvariantError&) {
                throw InvariantError(cw + ": not a bijection on [m]");
            }
        }
        table.push_back(std::move(prow));
    }
    return matching::MatchingInstance(int(m), int(m1), int(m2), std::move(table));
}

}  // namespace detail

inline ParsedInstance parse_instance_json(const json& j) {
    const json& type = detail::member(j, "type", "");
    if (!type.is_string()) detail::fail("/type", "expected a string");
    const std::string t = type.get<std::string>();
    if (t == "linear") return detail::parse_linear(j);
    if (t == "general") return detail::parse_general(j);
    if (t == "matching") return detail::parse_matching(j);
    detail::fail("/type", "unknown instance type '" + t + "'");
}

inline ParsedInstance parse_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
    return parse_instance_json(j);
}

inline json columns_to_json(const gf::FieldMatrix& m) {
    json cols = json::array();
    for (size_t j = 0; j < m.cols(); ++j) {
        json col = json::array();
        for (size_t i = 0; i < m.rows(); ++i) col.push_back(int(m.at(i, j)));
        cols.push_back(std::move(col));
    }
    return cols;
}

inline json linear_to_json(const lcb::LinearCBInstance& inst) {
    json j;
    j["type"] = "linear";
    j["field"] = inst.field.p();
    j["m"] = inst.m;
    j["V1"] = columns_to_json(inst.v1);
    j["V1p"] = columns_to_json(inst.v1p);
    j["V2"] = columns_to_json(inst.v2);
    j["V2p"] = columns_to_json(inst.v2p);
    return j;
}

inline json scheme_to_json(const lcb::LinearScheme& s) {
    json j;
    j["field"] = s.field.p();
    j["m"] = s.m;
    j["s_cols"] = columns_to_json(s.s_cols);
    j["segments"] = {{"a", s.seg_a}, {"b", s.seg_b}, {"c", s.seg_c}};
    j["decode1"] = columns_to_json(s.decode1);
    j["decode2"] = columns_to_json(s.decode2);
    j["cost_symbols"] = s.cost_symbols;
    j["orientation"] = s.swapped ? "swapped" : "normal";
    return j;
}

inline lcb::LinearScheme parse_scheme_json(const json& j) {
    using detail::as_int;
    using detail::member;
    const long long p = as_int(member(j, "field", ""), "/field");
    gf::PrimeField f{uint32_t(p)};
    const long long m = as_int(member(j, "m", ""), "/m");
    lcb::LinearScheme s{f,
                        size_t(m),
                        detail::parse_columns(member(j, "s_cols", ""), f, m, "/s_cols"),
                        0,
                        0,
                        0,
                        gf::FieldMatrix(f, 0, 0),
                        gf::FieldMatrix(f, 0, 0),
                        size_t(as_int(member(j, "cost_symbols", ""), "/cost_symbols")),
                        member(j, "orientation", "").get<std::string>() == "swapped"};
    const json& seg = member(j, "segments", "");
    s.seg_a = size_t(as_int(member(seg, "a", "/segments"), "/segments/a"));
    s.seg_b = size_t(as_int(member(seg, "b", "/segments"), "/segments/b"));
    s.seg_c = size_t(as_int(member(seg, "c", "/segments"), "/segments/c"));
    const auto& d1 = member(j, "decode1", "");
    const auto& d2 = member(j, "decode2", "");
    if (!d1.is_array() || !d2.is_array()) detail::fail("/decode1", "expected column arrays");
    const size_t rows1 = d1.empty() ? 0 : d1[0].size();
    const size_t rows2 = d2.empty() ? 0 : d2[0].size();
    s.decode1 = detail::parse_columns(d1, f, rows1, "/decode1");
    s.decode2 = detail::parse_columns(d2, f, rows2, "/decode2");
    return s;
}

inline lcb::LinearScheme parse_scheme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
    return parse_scheme_json(j);
}

inline json matching_bounds_to_json(const matching::MatchingBounds& b) {
    json j;
    j["class"] = matching::to_string(b.cls);
    j["hstar_lb_bits"] = b.hstar_lb_bits;
    j["hstar_ub_bits"] = b.hstar_ub_bits;
    j["capacity_lb"] = b.capacity_lb;
    j["capacity_ub"] = b.capacity_ub;
    j["tight"] = b.tight;
    return j;
}

}  // namespace cbcast::io

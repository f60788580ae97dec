#pragma once
// JSON input for structures and base operators; CSV helpers.
#include <cstdint>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pcf/operator.hpp"
#include "pcf/poly.hpp"

namespace pcf {

namespace detail {

// Integers and "p/q" strings stay exact; JSON floats are taken as floats.
inline Weight weight_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Weight(mpq_class(j.get<long>()));
    if (j.is_string()) return Weight(parse_rational(j.get<std::string>()));
    if (j.is_number()) return Weight::from_double(j.get<double>());
    throw ConfigError("weight must be a number or a rational string");
}

inline mpq_class rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return mpq_class(j.get<double>());
    throw ConfigError("expected a number or a rational string");
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace detail

// Keys: name, N, N0, relation [[i,x,i2,x2],...], group [[...],...], alpha, beta; 1-based indices.
inline StructureSpec structure_from_json(const nlohmann::json& j) {
    try {
        StructureSpec s;
        s.name = j.value("name", std::string("unnamed"));
        s.N = j.at("N").get<int>();
        s.N0 = j.at("N0").get<int>();
        for (const auto& r : j.at("relation")) {
            if (!r.is_array() || r.size() != 4) throw ConfigError("relation entries need 4 integers");
            s.relation.push_back({r[0].get<int>() - 1, r[1].get<int>() - 1, r[2].get<int>() - 1, r[3].get<int>() - 1});
        }
        if (j.contains("group"))
            for (const auto& g : j.at("group")) {
                std::vector<int> p;
                for (const auto& v : g) p.push_back(v.get<int>() - 1);
                s.group.push_back(p);
            }
        for (const auto& a : j.at("alpha")) s.alpha.push_back(detail::weight_from_json(a));
        for (const auto& b : j.at("beta")) s.beta.push_back(detail::weight_from_json(b));
        detail::check_shape(s);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("structure file: ") + e.what());
    }
}

// Keys: a [[x, y, a_xy], ...] over the upper triangle (1-based), b [weights].
inline BaseOperator base_from_json(const nlohmann::json& j, int n) {
    try {
        std::vector<std::tuple<int, int, mpq_class>> a;
        for (const auto& e : j.at("a")) {
            if (!e.is_array() || e.size() != 3) throw ConfigError("a entries need [x, y, a_xy]");
            mpq_class w = detail::rational_from_json(e[2]);
            if (w < 0) throw ConfigError("conductances must be nonnegative");
            a.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1, w);
        }
        std::vector<mpq_class> b;
        for (const auto& v : j.at("b")) b.push_back(detail::rational_from_json(v));
        for (const auto& v : b)
            if (v <= 0) throw ConfigError("b weights must be positive");
        return BaseOperator::from_conductances(n, a, b);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("base operator file: ") + e.what());
    }
}

inline StructureSpec load_structure(const std::string& path) { return structure_from_json(detail::read_json(path)); }
inline BaseOperator load_base(const std::string& path, int n) { return base_from_json(detail::read_json(path), n); }

// Shortest text that round-trips to the same double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// 64-bit FNV-1a, used to tag outputs with their configuration.
inline std::string config_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pcf

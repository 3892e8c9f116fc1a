#pragma once

// JSON readers and writers for instances, points, solutions, cuts and the
// experiment configuration. Readers reject non-finite numbers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "persp/core.hpp"
#include "persp/discrete.hpp"
#include "persp/harness.hpp"
#include "persp/hull.hpp"
#include "persp/robust.hpp"

namespace persp::io {

using json = nlohmann::json;

class FormatError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw FormatError(std::string("field '") + what + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw FormatError(std::string("field '") + what + "' is not finite");
    return v;
}

inline std::size_t count(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw FormatError(std::string("field '") + what + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

inline Vector vector(const json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string("field '") + what + "' must be an array");
    Vector v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(number(e, what));
    return v;
}

}  // namespace detail

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open", path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
}

inline ZFamily zfamily_from_json(const json& j, std::size_t n) {
    const auto& kind = detail::field(j, "kind");
    if (!kind.is_string()) throw FormatError("zfam.kind must be a string");
    const auto s = kind.get<std::string>();
    if (s == "free") return ZFamily::free_box(n);
    const std::size_t k = detail::count(detail::field(j, "k"), "k");
    if (s == "card_le") return ZFamily::cardinality_le(n, k);
    if (s == "card_eq") return ZFamily::cardinality_eq(n, k);
    throw FormatError("unknown zfam.kind '" + s + "'");
}

inline json to_json(const ZFamily& z) {
    switch (z.kind()) {
        case ZKind::FreeBox: return {{"kind", "free"}};
        case ZKind::CardinalityLE: return {{"kind", "card_le"}, {"k", z.k()}};
        case ZKind::CardinalityEQ: return {{"kind", "card_eq"}, {"k", z.k()}};
    }
    return {};
}

/// {"n": int, "a": [...], "c": [...], "zfam": {"kind": "free"|"card_le"|"card_eq", "k": int?}}
inline ProblemInstance problem_instance_from_json(const json& j) {
    const std::size_t n = detail::count(detail::field(j, "n"), "n");
    auto a = detail::vector(detail::field(j, "a"), "a");
    auto c = detail::vector(detail::field(j, "c"), "c");
    if (a.size() != n || c.size() != n) throw FormatError("lengths of a and c must equal n");
    return ProblemInstance(std::move(a), std::move(c), zfamily_from_json(detail::field(j, "zfam"), n));
}

inline json to_json(const ProblemInstance& inst) {
    return {{"n", inst.n()}, {"a", inst.a}, {"c", inst.c}, {"zfam", to_json(inst.zfam)}};
}

/// {"n": int, "a_tilde": [...], "d": [...], "b": real, "k": int}
inline RobustInstance robust_instance_from_json(const json& j) {
    const std::size_t n = detail::count(detail::field(j, "n"), "n");
    auto a = detail::vector(detail::field(j, "a_tilde"), "a_tilde");
    auto d = detail::vector(detail::field(j, "d"), "d");
    if (a.size() != n || d.size() != n) throw FormatError("lengths of a_tilde and d must equal n");
    return RobustInstance(std::move(a), std::move(d), detail::number(detail::field(j, "b"), "b"),
                          detail::count(detail::field(j, "k"), "k"));
}

inline json to_json(const RobustInstance& inst) {
    return {{"n", inst.n()}, {"a_tilde", inst.a_tilde}, {"d", inst.d}, {"b", inst.b}, {"k", inst.k}};
}

/// {"x": [...], "z": [...]}
inline MixedPoint mixed_point_from_json(const json& j) {
    return MixedPoint(detail::vector(detail::field(j, "x"), "x"), detail::vector(detail::field(j, "z"), "z"));
}

inline Vector vector_from_json(const json& j, const char* what) { return detail::vector(j, what); }

inline json to_json(const DiscreteSolution& s) {
    std::vector<int> z(s.z_opt.begin(), s.z_opt.end());
    return {{"z", z}, {"x", s.x_opt}, {"value", s.value}, {"method", s.method}};
}

inline json to_json(const ScoredCut& c) {
    return {{"family", to_string(c.cut.family)},
            {"S", c.cut.S},
            {"pi_abs", c.cut.pi_abs},
            {"rho_z", c.cut.rho_z},
            {"rhs", c.cut.rhs},
            {"violation", c.violation}};
}

inline json to_json(const CounterpartResult& r, const RobustInstance& inst) {
    return {{"method", to_string(r.method)},
            {"y", r.y_star.y()},
            {"objective", r.objective},
            {"worst_case", worst_case(r.y_star, inst)},
            {"nominal_value", nominal_value(r.y_star.y(), inst)},
            {"iterations", r.iterations},
            {"lower_bound", r.lower_bound},
            {"gap", r.gap}};
}

/// Mirrors ExperimentConfig; every field is optional and defaults to the
/// values of ExperimentConfig.
inline ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("experiment config must be an object");
    ExperimentConfig cfg;
    if (j.contains("n")) cfg.n = detail::count(j.at("n"), "n");
    if (j.contains("k_list")) {
        cfg.k_list.clear();
        for (const auto& e : j.at("k_list")) cfg.k_list.push_back(detail::count(e, "k_list"));
    }
    if (j.contains("b_list")) cfg.b_list = detail::vector(j.at("b_list"), "b_list");
    if (j.contains("instances_per_cell")) cfg.instances_per_cell = detail::count(j.at("instances_per_cell"), "instances_per_cell");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) throw FormatError("field 'seed' must be an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& e : j.at("methods")) {
            if (!e.is_string()) throw FormatError("methods must be strings");
            const auto m = parse_method(e.get<std::string>());
            if (!m) throw FormatError("unknown method '" + e.get<std::string>() + "'");
            cfg.methods.push_back(*m);
        }
    }
    if (j.contains("solver_rel")) cfg.solve.tol.solver_rel = detail::number(j.at("solver_rel"), "solver_rel");
    if (j.contains("max_iter")) cfg.solve.max_iter = detail::count(j.at("max_iter"), "max_iter");
    cfg.validate();
    return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
    std::vector<std::string> methods;
    for (Method m : cfg.methods) methods.emplace_back(to_string(m));
    return {{"n", cfg.n},
            {"k_list", cfg.k_list},
            {"b_list", cfg.b_list},
            {"instances_per_cell", cfg.instances_per_cell},
            {"seed", cfg.seed},
            {"methods", methods},
            {"solver_rel", cfg.solve.tol.solver_rel},
            {"max_iter", cfg.solve.max_iter}};
}

}  // namespace persp::io

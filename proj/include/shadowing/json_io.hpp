#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shadowing/curve.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/rotation.hpp"
#include "shadowing/singularities.hpp"

namespace shadowing {

// Curve-spec schema:
//   {"type":"circle","radius":r}
//   {"type":"ellipse","b":b}
//   {"type":"fourier","x":{"a0":..,"a":[..],"b":[..]},"y":{...}}

namespace detail {

inline double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw validation_error(std::string("curve spec: missing numeric field \"") + key + "\"");
    return j.at(key).get<double>();
}

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw validation_error("curve spec: unknown field \"" + it.key() + "\"");
    }
}

inline FourierCoeffs coeffs_from_json(const nlohmann::json& j, const char* which) {
    if (!j.is_object())
        throw validation_error(std::string("curve spec: \"") + which + "\" must be an object");
    reject_unknown_keys(j, {"a0", "a", "b"});
    FourierCoeffs c;
    if (j.contains("a0")) {
        if (!j.at("a0").is_number())
            throw validation_error(std::string("curve spec: \"") + which + ".a0\" must be a number");
        c.a0 = j.at("a0").get<double>();
    }
    auto read_array = [&](const char* key, std::vector<double>& out) {
        if (!j.contains(key)) return;
        const nlohmann::json& arr = j.at(key);
        if (!arr.is_array())
            throw validation_error(std::string("curve spec: \"") + which + "." + key +
                                   "\" must be an array of numbers");
        for (const auto& v : arr) {
            if (!v.is_number())
                throw validation_error(std::string("curve spec: \"") + which + "." + key +
                                       "\" must contain only numbers");
            out.push_back(v.get<double>());
        }
    };
    read_array("a", c.a);
    read_array("b", c.b);
    return c;
}

} // namespace detail

inline ClosedCurve curve_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw validation_error("curve spec must be an object with a string \"type\"");
    const std::string type = j.at("type").get<std::string>();
    if (type == "circle") {
        detail::reject_unknown_keys(j, {"type", "radius"});
        double r = detail::require_number(j, "radius");
        if (!(r > 0.0) || !std::isfinite(r))
            throw validation_error("curve spec: circle radius must be positive and finite");
        return make_circle(r);
    }
    if (type == "ellipse") {
        detail::reject_unknown_keys(j, {"type", "b"});
        double b = detail::require_number(j, "b");
        if (!(b > 0.0) || !std::isfinite(b))
            throw validation_error("curve spec: ellipse semi-axis b must be positive and finite");
        return make_ellipse(b);
    }
    if (type == "fourier") {
        detail::reject_unknown_keys(j, {"type", "x", "y"});
        if (!j.contains("x") || !j.contains("y"))
            throw validation_error("curve spec: fourier type needs \"x\" and \"y\" objects");
        return make_fourier(detail::coeffs_from_json(j.at("x"), "x"),
                            detail::coeffs_from_json(j.at("y"), "y"));
    }
    throw validation_error("curve spec: unknown type \"" + type + "\"");
}

inline nlohmann::json coeffs_to_json(const FourierCoeffs& c) {
    return nlohmann::json{{"a0", c.a0}, {"a", c.a}, {"b", c.b}};
}

inline nlohmann::json curve_to_json(const ClosedCurve& c) {
    return nlohmann::json{{"type", "fourier"},
                          {"x", coeffs_to_json(c.x())},
                          {"y", coeffs_to_json(c.y())}};
}

// Accepts either a path to a JSON file or an inline JSON object (detected by a
// leading '{'). Returns the curve together with the parsed spec.
inline std::pair<ClosedCurve, nlohmann::json> load_curve_spec(const std::string& arg) {
    std::string text;
    std::size_t start = arg.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && arg[start] == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in) throw validation_error("cannot open curve spec file: " + arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error(std::string("curve spec is not valid JSON: ") + e.what());
    }
    return {curve_from_json(j), j};
}

inline const char* distance_kind_name(DistanceReport::Kind k) {
    switch (k) {
        case DistanceReport::Kind::critical: return "critical";
        case DistanceReport::Kind::turning: return "turning";
        default: return "target-rotation";
    }
}

inline nlohmann::json distance_report_to_json(const DistanceReport& rep) {
    nlohmann::json diag = nlohmann::json::array();
    for (const auto& [R, rho] : rep.diagnostics) diag.push_back({{"R", R}, {"rho", rho}});
    return nlohmann::json{{"kind", distance_kind_name(rep.kind)},
                          {"estimate", rep.estimate},
                          {"bracket_low", rep.bracket_low},
                          {"bracket_high", rep.bracket_high},
                          {"rho_at_estimate", rep.rho_at_estimate},
                          {"heuristic", rep.heuristic},
                          {"note", rep.note},
                          {"diagnostics", diag}};
}

inline nlohmann::json cusp_events_to_json(const std::vector<CuspEvent>& events) {
    nlohmann::json out = nlohmann::json::array();
    for (const CuspEvent& e : events)
        out.push_back({{"t", e.time},
                       {"x", e.location.x},
                       {"y", e.location.y},
                       {"branch", e.branch == CuspEvent::Branch::outer ? "outer" : "inner"},
                       {"d2norm", e.second_derivative_norm},
                       {"phi_level", e.phi_level}});
    return out;
}

struct RunManifest {
    std::string command;
    nlohmann::json curve_spec;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> outputs;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace detail

// The hash covers everything that determines the outputs; nlohmann keeps
// object keys sorted, so dump() is a canonical form.
inline std::string manifest_config_hash(const RunManifest& m) {
    nlohmann::json core{{"command", m.command}, {"curve", m.curve_spec}, {"parameters", m.parameters}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(core.dump())));
    return buf;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    return nlohmann::json{{"command", m.command},
                          {"curve", m.curve_spec},
                          {"parameters", m.parameters},
                          {"config_hash", manifest_config_hash(m)},
                          {"outputs", m.outputs}};
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + path);
    out << text;
    if (!out) throw numerical_error("failed while writing " + path);
}

} // namespace shadowing

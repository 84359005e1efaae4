#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/families.hpp"

// ===========================================================================
// JSON family configs.
//
// A scalar function is a trigonometric polynomial
//   {"const": r, "cos": [[k, amp], ...], "sin": [[k, amp], ...], "period": P}
// meaning r + sum amp*cos(2 pi k t / P) + sum amp*sin(2 pi k t / P).
// Every config parses to exactly one constructor call; unknown keys are
// rejected so typos cannot silently fall back to defaults.
// ===========================================================================

namespace liouville {

namespace config_detail {

using njson = nlohmann::json;

inline std::string location_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; }
        else ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void reject_unknown(const njson& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw config_error("config: unknown key \"" + item.key() + "\" in " + where);
}

inline double need_number(const njson& j, const std::string& where) {
    if (!j.is_number()) throw config_error("config: " + where + " must be a number");
    return j.get<double>();
}

inline ScalarPeriodic1D parse_function(const njson& j, const std::string& where) {
    if (!j.is_object())
        throw config_error("config: " + where + " must be an object {const, cos, sin, period}");
    reject_unknown(j, {"const", "cos", "sin", "period"}, where);
    ScalarPeriodic1D p;
    p.constant_term = j.contains("const") ? need_number(j["const"], where + ".const") : 0.0;
    p.period = j.contains("period") ? need_number(j["period"], where + ".period") : 1.0;
    const auto parse_terms = [&](const char* key, std::vector<std::pair<int, double>>& out) {
        if (!j.contains(key)) return;
        const njson& arr = j[key];
        if (!arr.is_array())
            throw config_error("config: " + where + "." + key + " must be a list of [k, amp]");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const njson& t = arr[i];
            const std::string slot = where + "." + key + "[" + std::to_string(i) + "]";
            if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number())
                throw config_error("config: " + slot + " must be [integer harmonic, amplitude]");
            out.emplace_back(t[0].get<int>(), t[1].get<double>());
        }
    };
    parse_terms("cos", p.cosine_coeffs);
    parse_terms("sin", p.sine_coeffs);
    try {
        p.validate();
    } catch (const config_error& e) {
        throw config_error("config: " + where + ": " + e.what());
    }
    return p;
}

inline Lattice parse_lattice(const njson& j, const std::string& where) {
    const auto row = [&](const njson& r, const std::string& slot) -> Vec2 {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
            throw config_error("config: " + slot + " must be [number, number]");
        return {r[0].get<double>(), r[1].get<double>()};
    };
    if (!j.is_array() || j.size() != 2)
        throw config_error("config: " + where + " must be [[a,b],[c,d]]");
    Lattice lat{row(j[0], where + "[0]"), row(j[1], where + "[1]")};
    lat.validate();
    return lat;
}

inline Rect parse_rect(const njson& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4)
        throw config_error("config: " + where + " must be [x0, x1, y0, y1]");
    for (const auto& v : j)
        if (!v.is_number()) throw config_error("config: " + where + " entries must be numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace config_detail

struct ExtraIntegral {
    std::string name;
    double a = 0.0, b = 0.0, c = 0.0;

    QuadraticIntegral build() const {
        return {fields::constant(a), fields::constant(b), fields::constant(c)};
    }
};

struct FamilyConfig {
    std::string family;
    std::map<std::string, ScalarPeriodic1D> functions;   // X, Y / K, L, M / Yhat
    Lattice lattice{{1, 0}, {0, 1}};
    double eps = -1.0;
    double klein_c = 1.0, klein_d = 1.0;
    Rect chart{0, 1, 0, 1};
    std::vector<std::complex<double>> holomorphic_coeffs;   // ascending powers of z
    std::vector<ExtraIntegral> extra_integrals;

    // optional run parameters; CLI flags override them
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;

    const ScalarPeriodic1D& fn(const std::string& key) const {
        const auto it = functions.find(key);
        if (it == functions.end())
            throw config_error("config: family \"" + family + "\" needs \"" + key + "\"");
        return it->second;
    }

    TorusSystem build() const {
        if (family == "global_liouville")
            return make_global_liouville(fn("X"), fn("Y"), lattice, eps);
        if (family == "klein_liouville")
            return make_klein_liouville(fn("X"), fn("Y"), klein_c, klein_d, eps);
        if (family == "linear_integral_torus")
            return make_linear_integral_torus(fn("K"), fn("L"), fn("M"));
        if (family == "jordan_foliation") return presets::jordan_foliation();
        if (family == "mixed_foliation") return presets::mixed_foliation();
        if (family == "reeb_foliation") return presets::reeb_foliation();
        if (family == "flat_torus") return make_flat_torus(lattice);
        if (family == "jordan_block")
            return make_jordan_chart(fn("Y"), fn("Yhat"), chart);
        if (family == "complex_liouville") {
            HolomorphicData h;
            h.coeffs = holomorphic_coeffs;
            return make_complex_chart(h, chart);
        }
        throw config_error("config: unknown family \"" + family + "\"");
    }
};

inline FamilyConfig parse_config(const std::string& text) {
    using config_detail::njson;
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw config_error("config: JSON parse error at " +
                           config_detail::location_of(text, e.byte ? e.byte - 1 : 0) + ": " +
                           e.what());
    }
    if (!j.is_object()) throw config_error("config: top level must be an object");
    if (!j.contains("family") || !j["family"].is_string())
        throw config_error("config: \"family\" (string) is required");

    FamilyConfig cfg;
    cfg.family = j["family"].get<std::string>();

    static const std::map<std::string, std::set<std::string>> allowed = {
        {"global_liouville", {"X", "Y", "eps", "lattice"}},
        {"klein_liouville", {"X", "Y", "c", "d", "eps"}},
        {"linear_integral_torus", {"K", "L", "M"}},
        {"jordan_foliation", {}},
        {"mixed_foliation", {}},
        {"reeb_foliation", {}},
        {"flat_torus", {"lattice"}},
        {"jordan_block", {"Y", "Yhat", "chart"}},
        {"complex_liouville", {"h", "chart"}},
    };
    const auto fam = allowed.find(cfg.family);
    if (fam == allowed.end())
        throw config_error("config: unknown family \"" + cfg.family + "\"");
    std::set<std::string> keys = fam->second;
    keys.insert({"family", "extra_integrals", "tol", "grid", "seed"});
    config_detail::reject_unknown(j, keys, "the top-level object");

    for (const char* fname : {"X", "Y", "K", "L", "M", "Yhat"})
        if (j.contains(fname))
            cfg.functions.emplace(fname, config_detail::parse_function(j[fname], fname));
    if (j.contains("lattice")) cfg.lattice = config_detail::parse_lattice(j["lattice"], "lattice");
    if (j.contains("chart")) cfg.chart = config_detail::parse_rect(j["chart"], "chart");
    if (j.contains("eps")) {
        cfg.eps = config_detail::need_number(j["eps"], "eps");
        if (cfg.eps != 1.0 && cfg.eps != -1.0)
            throw config_error("config: eps must be +1 or -1");
    }
    if (j.contains("c")) cfg.klein_c = config_detail::need_number(j["c"], "c");
    if (j.contains("d")) cfg.klein_d = config_detail::need_number(j["d"], "d");
    if (j.contains("h")) {
        const njson& arr = j["h"];
        if (!arr.is_array() || arr.empty())
            throw config_error("config: h must be a nonempty list of [re, im] coefficients");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const njson& t = arr[i];
            if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
                throw config_error("config: h[" + std::to_string(i) + "] must be [re, im]");
            cfg.holomorphic_coeffs.emplace_back(t[0].get<double>(), t[1].get<double>());
        }
    }
    if (j.contains("extra_integrals")) {
        const njson& arr = j["extra_integrals"];
        if (!arr.is_array())
            throw config_error("config: extra_integrals must be a list");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const njson& t = arr[i];
            const std::string slot = "extra_integrals[" + std::to_string(i) + "]";
            if (!t.is_object()) throw config_error("config: " + slot + " must be an object");
            config_detail::reject_unknown(t, {"name", "a", "b", "c"}, slot);
            if (!t.contains("name") || !t["name"].is_string())
                throw config_error("config: " + slot + ".name (string) is required");
            ExtraIntegral e;
            e.name = t["name"].get<std::string>();
            if (t.contains("a")) e.a = config_detail::need_number(t["a"], slot + ".a");
            if (t.contains("b")) e.b = config_detail::need_number(t["b"], slot + ".b");
            if (t.contains("c")) e.c = config_detail::need_number(t["c"], slot + ".c");
            cfg.extra_integrals.push_back(std::move(e));
        }
    }
    if (j.contains("tol")) cfg.tol = config_detail::need_number(j["tol"], "tol");
    if (j.contains("grid")) {
        if (!j["grid"].is_number_integer() || j["grid"].get<int>() < 2)
            throw config_error("config: grid must be an integer >= 2");
        cfg.grid = j["grid"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw config_error("config: seed must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    return cfg;
}

inline FamilyConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace liouville

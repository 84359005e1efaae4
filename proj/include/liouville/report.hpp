#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liouville/families.hpp"

// ===========================================================================
// Report emission.  JSON objects keep their keys sorted and numbers are
// printed with 17 significant digits, so identical runs produce byte-identical
// files; timestamps and timings are the only non-reproducible fields and are
// dropped together under --no-timestamp.
// ===========================================================================

namespace liouville {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // bare integers would otherwise parse back with a different JSON type
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace report_detail {

inline void emit(const nlohmann::json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{\n";
            bool first = true;
            for (const auto& item : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + nlohmann::json(item.key()).dump() + ": ";
                emit(item.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                emit(v, out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_number(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace report_detail

inline std::string render_report(const nlohmann::json& j) {
    std::string out;
    report_detail::emit(j, out, 0);
    out += "\n";
    return out;
}

inline void write_report(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("report: cannot write \"" + path.string() + "\"");
    f << render_report(j);
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json certificates_to_json(const std::vector<Certificate>& certs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Certificate& c : certs) {
        nlohmann::json e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["value"] = c.value;
        e["bound"] = c.bound;
        if (!c.detail.empty()) e["detail"] = c.detail;
        if (c.advisory) e["advisory"] = true;
        arr.push_back(e);
    }
    return arr;
}

// CSV numbers carry the same 17 significant digits as the JSON reports.
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace liouville

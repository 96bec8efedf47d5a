#pragma once

// Scenario configuration for the command-line tool: the JSON config file,
// command-line overrides, and the small grammars for grids and order ranges.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nevlab/cli/json_writer.hpp"
#include "nevlab/core.hpp"
#include "nevlab/entire_m.hpp"
#include "nevlab/pick.hpp"
#include "nevlab/quadrature.hpp"

namespace nevlab::cli {

/// Bad flags, config files or arguments: exit code 2.
class usage_error : public error {
public:
    using error::error;
};

// Long double numbers so that moduli are read without rounding through double.
using config_json = nlohmann::basic_json<std::map, std::vector, std::string, bool, std::int64_t, std::uint64_t, real>;

inline constexpr const char* default_k_text = "0.7071067811865476";

struct Scenario {
    std::string model = "iv";
    real k = std::strtold(default_k_text, nullptr);
    cplx C{1, 0};
    std::vector<cplx> zeros;
    std::string pick = "const:0,1";
    bool pick_set = false;
    QuadConfig quad;
    bool rel_tol_set = false;
    std::vector<std::string> outputs{"results", "residual_summary"};
    std::uint64_t seed = 20240611;
};

inline const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> names{"results", "residual_summary"};
    return names;
}

inline bool wants(const Scenario& s, const std::string& output) {
    return std::find(s.outputs.begin(), s.outputs.end(), output) != s.outputs.end();
}

inline real parse_real(const std::string& text, const std::string& what) {
    real v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw usage_error(what + ": malformed number '" + text + "'");
    }
    return v;
}

inline int parse_int(const std::string& text, const std::string& what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw usage_error(what + ": malformed integer '" + text + "'");
    }
    return v;
}

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline real as_real(const config_json& j, const std::string& path) {
    if (!j.is_number()) throw usage_error(path + ": expected a number");
    return j.get<real>();
}

inline cplx as_cplx(const config_json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw usage_error(path + ": expected [re, im]");
    return {as_real(j[0], path + "/0"), as_real(j[1], path + "/1")};
}

inline std::string as_string(const config_json& j, const std::string& path) {
    if (!j.is_string()) throw usage_error(path + ": expected a string");
    return j.get<std::string>();
}

}  // namespace detail

/// Reads a Scenario from JSON text. Diagnostics name the JSON pointer of the
/// offending field, or the line and column of a syntax error.
inline Scenario parse_scenario(const std::string& text, const std::string& source) {
    config_json doc;
    try {
        doc = config_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw usage_error(source + ": " + detail::line_column(text, e.byte) + ": malformed JSON");
    }
    if (!doc.is_object()) throw usage_error(source + ": top level must be an object");

    Scenario s;
    for (const auto& [key, value] : doc.items()) {
        const std::string path = source + ": /" + key;
        if (key == "model") {
            s.model = detail::as_string(value, path);
        } else if (key == "k") {
            s.k = detail::as_real(value, path);
        } else if (key == "C") {
            s.C = detail::as_cplx(value, path);
        } else if (key == "zeros") {
            if (!value.is_array()) throw usage_error(path + ": expected an array of [re, im]");
            for (std::size_t i = 0; i < value.size(); ++i) {
                s.zeros.push_back(detail::as_cplx(value[i], path + "/" + std::to_string(i)));
            }
        } else if (key == "pick") {
            s.pick = detail::as_string(value, path);
            s.pick_set = true;
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw usage_error(path + ": expected a non-negative integer");
            s.seed = value.get<std::uint64_t>();
        } else if (key == "outputs") {
            if (!value.is_array()) throw usage_error(path + ": expected an array of strings");
            s.outputs.clear();
            for (std::size_t i = 0; i < value.size(); ++i) {
                const std::string name = detail::as_string(value[i], path + "/" + std::to_string(i));
                const auto& known = known_outputs();
                if (std::find(known.begin(), known.end(), name) == known.end()) {
                    throw usage_error(path + "/" + std::to_string(i) + ": unknown output '" + name + "'");
                }
                s.outputs.push_back(name);
            }
        } else if (key == "quad") {
            if (!value.is_object()) throw usage_error(path + ": expected an object");
            for (const auto& [qk, qv] : value.items()) {
                const std::string qpath = path + "/" + qk;
                if (qk == "rel_tol") {
                    s.quad.rel_tol = detail::as_real(qv, qpath);
                    s.rel_tol_set = true;
                } else if (qk == "abs_tol") {
                    s.quad.abs_tol = detail::as_real(qv, qpath);
                } else if (qk == "max_subdivisions") {
                    if (!qv.is_number_integer()) throw usage_error(qpath + ": expected an integer");
                    s.quad.max_subdivisions = qv.get<int>();
                } else if (qk == "truncation_T") {
                    if (qv.is_null()) {
                        s.quad.truncation_T.reset();
                    } else {
                        s.quad.truncation_T = detail::as_real(qv, qpath);
                    }
                } else {
                    throw usage_error(qpath + ": unknown key");
                }
            }
        } else {
            throw usage_error(path + ": unknown key");
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

/// Checks the scenario and builds its entire function.
inline EntireM make_entire(const Scenario& s) {
    try {
        s.quad.validate();
        if (s.model == "iv") return EntireM::ismail_valent(s.k);
        if (s.model == "iv-tilde") return EntireM::tilde_iv(s.k);
        if (s.model == "zero-product") return EntireM::zero_product(s.C, s.zeros);
    } catch (const domain_error& e) {
        throw usage_error(e.what());
    }
    throw usage_error("model: expected iv, iv-tilde or zero-product, got '" + s.model + "'");
}

inline PickFn make_pick(const std::string& text) {
    try {
        return parse_pick(text);
    } catch (const pick_parse_error& e) {
        throw usage_error(std::string("--pick '") + text + "': " + e.what());
    }
}

inline Json scenario_json(const Scenario& s) {
    Json j = Json::object();
    j.set("model", s.model);
    if (s.model == "zero-product") {
        j.set("C", s.C);
        Json zs = Json::array();
        for (cplx z : s.zeros) zs.push(z);
        j.set("zeros", zs);
    } else {
        j.set("k", s.k);
    }
    j.set("pick", s.pick);
    Json q = Json::object();
    q.set("rel_tol", s.quad.rel_tol);
    q.set("abs_tol", s.quad.abs_tol);
    q.set("max_subdivisions", s.quad.max_subdivisions);
    q.set("truncation_T", s.quad.truncation_T ? Json(*s.quad.truncation_T) : Json());
    j.set("quad", q);
    j.set("outputs", Json::array_of(s.outputs));
    j.set("seed", static_cast<unsigned long>(s.seed));
    return j;
}

/// "lo:hi:n" as n equally spaced points (one point gives lo).
inline std::vector<real> parse_axis(const std::string& text, const std::string& what) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() != 3) throw usage_error(what + ": expected lo:hi:count, got '" + text + "'");
    const real lo = parse_real(parts[0], what);
    const real hi = parse_real(parts[1], what);
    const int n = parse_int(parts[2], what);
    if (n < 1) throw usage_error(what + ": count must be positive");
    if (!(lo <= hi)) throw usage_error(what + ": lo must not exceed hi");
    std::vector<real> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

/// "re_lo:re_hi:n x im_lo:im_hi:m" as the n*m points of the product grid.
inline std::vector<cplx> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) throw usage_error("--grid: expected <re axis>x<im axis>, got '" + text + "'");
    const auto re = parse_axis(text.substr(0, x), "--grid");
    const auto im = parse_axis(text.substr(x + 1), "--grid");
    std::vector<cplx> out;
    for (real b : im) {
        for (real a : re) out.emplace_back(a, b);
    }
    return out;
}

/// "a..b" or "b" (meaning 0..b).
inline std::vector<int> parse_orders(const std::string& text, int max_order) {
    int lo = 0, hi = 0;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        hi = parse_int(text, "--n");
    } else {
        lo = parse_int(text.substr(0, dots), "--n");
        hi = parse_int(text.substr(dots + 2), "--n");
    }
    if (lo < 0 || hi < lo || hi > max_order) {
        throw usage_error("--n: orders must satisfy 0 <= lo <= hi <= " + std::to_string(max_order));
    }
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
}

}  // namespace nevlab::cli

#pragma once

// Ordered JSON tree with fixed number formatting (17 significant digits), so
// that identical inputs give byte-identical reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nevlab/core.hpp"

namespace nevlab::cli {

inline std::string format_number(real v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return buf;
}

class Json {
public:
    using Array = std::vector<Json>;
    using Object = std::vector<std::pair<std::string, Json>>;

    Json() = default;
    Json(std::nullptr_t) {}
    Json(bool v) : value_(v) {}
    Json(int v) : value_(std::int64_t{v}) {}
    Json(long v) : value_(std::int64_t{v}) {}
    Json(long long v) : value_(std::int64_t{v}) {}
    Json(unsigned long v) : value_(static_cast<std::int64_t>(v)) {}
    Json(double v) : value_(real(v)) {}
    Json(real v) : value_(v) {}
    Json(const char* v) : value_(std::string(v)) {}
    Json(std::string v) : value_(std::move(v)) {}
    Json(cplx v) : value_(Array{Json(v.real()), Json(v.imag())}) {}

    static Json array() { Json j; j.value_ = Array{}; return j; }
    static Json object() { Json j; j.value_ = Object{}; return j; }

    template <class T>
    static Json array_of(const std::vector<T>& items) {
        Json j = array();
        for (const auto& item : items) j.push(Json(item));
        return j;
    }

    /// Appends, or replaces an existing key in place.
    Json& set(const std::string& key, Json v) {
        auto& obj = std::get<Object>(value_);
        for (auto& [k, existing] : obj) {
            if (k == key) {
                existing = std::move(v);
                return *this;
            }
        }
        obj.emplace_back(key, std::move(v));
        return *this;
    }

    Json& push(Json v) {
        std::get<Array>(value_).push_back(std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out += '\n';
        return out;
    }

private:
    static void write_string(std::string& out, const std::string& s) {
        out += '"';
        for (unsigned char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (c < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out += buf;
                    } else {
                        out += static_cast<char>(c);
                    }
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent, int level) const {
        const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
        const std::string close(static_cast<std::size_t>(indent * level), ' ');
        if (std::holds_alternative<std::monostate>(value_)) {
            out += "null";
        } else if (const auto* b = std::get_if<bool>(&value_)) {
            out += *b ? "true" : "false";
        } else if (const auto* i = std::get_if<std::int64_t>(&value_)) {
            out += std::to_string(*i);
        } else if (const auto* r = std::get_if<real>(&value_)) {
            out += format_number(*r);
        } else if (const auto* s = std::get_if<std::string>(&value_)) {
            write_string(out, *s);
        } else if (const auto* a = std::get_if<Array>(&value_)) {
            if (a->empty()) {
                out += "[]";
                return;
            }
            // Short numeric arrays (complex values, pairs) stay on one line.
            const bool flat = a->size() <= 4 && std::all_of(a->begin(), a->end(), [](const Json& j) {
                return std::holds_alternative<real>(j.value_) || std::holds_alternative<std::int64_t>(j.value_) ||
                       std::holds_alternative<std::monostate>(j.value_);
            });
            out += '[';
            for (std::size_t n = 0; n < a->size(); ++n) {
                if (n > 0) out += flat ? ", " : ",";
                if (!flat) out += '\n' + pad;
                (*a)[n].write(out, indent, level + 1);
            }
            if (!flat) out += '\n' + close;
            out += ']';
        } else {
            const auto& o = std::get<Object>(value_);
            if (o.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            for (std::size_t n = 0; n < o.size(); ++n) {
                if (n > 0) out += ',';
                out += '\n' + pad;
                write_string(out, o[n].first);
                out += ": ";
                o[n].second.write(out, indent, level + 1);
            }
            out += '\n' + close + '}';
        }
    }

    std::variant<std::monostate, bool, std::int64_t, real, std::string, Array, Object> value_;
};

}  // namespace nevlab::cli

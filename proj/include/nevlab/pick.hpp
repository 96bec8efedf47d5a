#pragma once

// Pick functions (analytic self-maps of the upper half-plane), the bounded
// subclass certified by an explicit bound |w| <= delta < 1 on the Cayley
// image w = (1 + i phi) / (1 - i phi), and the regulariser g_delta.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "nevlab/core.hpp"

namespace nevlab {

class PickFn;

struct ConstPick {
    real t = 0;
    real gamma = 1;
};

/// g_delta(z) = -1 / (i delta - 1 / (z + i delta)).
struct GDeltaPick {
    real delta = 1;
};

/// z -> g_delta(inner(z + i delta)).
struct ShiftComposePick {
    real delta = 1;
    std::shared_ptr<const PickFn> inner;
};

/// slope * (z + i). Pick, but the image is unbounded.
struct LinearTildePick {
    real slope = 1;
};

/// (a z + b) / (c z + d).
struct MoebiusPick {
    cplx a, b, c, d;
};

class PickFn {
public:
    using Variant = std::variant<ConstPick, GDeltaPick, ShiftComposePick, LinearTildePick, MoebiusPick>;

    static PickFn constant(real t, real gamma) {
        if (!(gamma > 0)) throw domain_error("PickFn::constant: gamma must be positive");
        return PickFn(ConstPick{t, gamma}, true);
    }
    static PickFn g_delta(real delta) {
        if (!(delta > 0)) throw domain_error("PickFn::g_delta: delta must be positive");
        return PickFn(GDeltaPick{delta}, true);
    }
    static PickFn shift_compose(real delta, PickFn inner) {
        if (!(delta > 0)) throw domain_error("PickFn::shift_compose: delta must be positive");
        return PickFn(ShiftComposePick{delta, std::make_shared<const PickFn>(std::move(inner))}, true);
    }
    static PickFn linear_tilde(real slope) {
        if (!(slope > 0)) throw domain_error("PickFn::linear_tilde: slope must be positive");
        return PickFn(LinearTildePick{slope}, false);
    }
    /// Certifies the map: rejects it unless it sends the upper half-plane into
    /// itself, and sets in_Pb when the closed half-plane lands in a bounded
    /// disk strictly above the real axis.
    static PickFn moebius(cplx a, cplx b, cplx c, cplx d);

    const Variant& variant() const { return variant_; }
    bool in_Pb() const { return in_Pb_; }

private:
    PickFn(Variant v, bool in_Pb) : variant_(std::move(v)), in_Pb_(in_Pb) {}

    Variant variant_;
    bool in_Pb_;
};

struct WBound {
    real delta_bound = 0;
    std::string method;  // "exact-moebius-disk" or "sampled"
};

inline cplx g_delta_map(real delta, cplx z) {
    return real(-1) / (I_unit * delta - real(1) / (z + I_unit * delta));
}

namespace detail {

inline cplx moebius_apply(const std::array<cplx, 4>& m, cplx z) { return (m[0] * z + m[1]) / (m[2] * z + m[3]); }

inline std::array<cplx, 4> moebius_compose(const std::array<cplx, 4>& outer, const std::array<cplx, 4>& inner) {
    return {outer[0] * inner[0] + outer[1] * inner[2], outer[0] * inner[1] + outer[1] * inner[3],
            outer[2] * inner[0] + outer[3] * inner[2], outer[2] * inner[1] + outer[3] * inner[3]};
}

/// Image of the real line under m when the pole -d/c is off the real axis.
struct Disk {
    cplx centre;
    real radius;
};

inline Disk circumcircle(cplx p, cplx q, cplx r) {
    const cplx qp = q - p;
    const cplx rp = r - p;
    const real denom = 2 * (qp.real() * rp.imag() - qp.imag() * rp.real());
    if (denom == 0) throw pole_error("circumcircle: collinear points");
    const real q2 = std::norm(qp);
    const real r2 = std::norm(rp);
    const cplx offset((rp.imag() * q2 - qp.imag() * r2) / denom, (qp.real() * r2 - rp.real() * q2) / denom);
    return {p + offset, std::abs(offset)};
}

inline Disk real_line_image(const std::array<cplx, 4>& m) {
    if (m[2] == cplx(0)) throw pole_error("real_line_image: affine map has no bounded image");
    return circumcircle(moebius_apply(m, 0), moebius_apply(m, 1), m[0] / m[2]);
}

inline std::array<cplx, 4> g_delta_matrix(real delta) {
    // -(z + i delta) / (i delta z - (1 + delta^2))
    return {cplx(-1), cplx(0, -delta), cplx(0, delta), cplx(-(1 + delta * delta))};
}

// w = (1 + i phi) / (1 - i phi)
inline const std::array<cplx, 4> cayley_matrix{cplx(0, 1), cplx(1), cplx(0, -1), cplx(1)};

}  // namespace detail

inline PickFn PickFn::moebius(cplx a, cplx b, cplx c, cplx d) {
    const std::array<cplx, 4> m{a, b, c, d};
    if (a * d - b * c == cplx(0)) throw domain_error("PickFn::moebius: degenerate map");
    if (c == cplx(0)) {
        const cplx slope = a / d;
        const cplx shift = b / d;
        if (std::abs(slope.imag()) > 1e-14L * std::abs(slope) || !(slope.real() > 0) || shift.imag() < 0) {
            throw domain_error("PickFn::moebius: affine map does not preserve the upper half-plane");
        }
        return PickFn(MoebiusPick{a, b, c, d}, false);
    }
    const cplx pole = -d / c;
    if (pole.imag() > 0) throw domain_error("PickFn::moebius: pole lies in the upper half-plane");
    if (pole.imag() == 0) {
        // Image of the real line is a line; require it to be the real axis
        // (up to rounding) with the upper half-plane mapped above it.
        const cplx p0 = detail::moebius_apply(m, pole.real() + 1);
        const cplx p1 = detail::moebius_apply(m, pole.real() - 1);
        if (std::abs(p0.imag()) > 1e-12L * (1 + std::abs(p0)) || std::abs(p1.imag()) > 1e-12L * (1 + std::abs(p1)) ||
            !(detail::moebius_apply(m, cplx(pole.real(), 1)).imag() > 0)) {
            throw domain_error("PickFn::moebius: map does not preserve the upper half-plane");
        }
        return PickFn(MoebiusPick{a, b, c, d}, false);
    }
    const auto disk = detail::real_line_image(m);
    const real lowest = disk.centre.imag() - disk.radius;
    if (lowest < 0) throw domain_error("PickFn::moebius: image leaves the upper half-plane");
    return PickFn(MoebiusPick{a, b, c, d}, lowest > 0);
}

inline cplx eval_phi(const PickFn& phi, cplx z) {
    if (z.imag() < 0) throw domain_error("eval_phi: argument below the real axis");
    return std::visit(
        [z](const auto& v) -> cplx {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, ConstPick>) {
                return cplx(v.t, v.gamma);
            } else if constexpr (std::is_same_v<V, GDeltaPick>) {
                return g_delta_map(v.delta, z);
            } else if constexpr (std::is_same_v<V, ShiftComposePick>) {
                return g_delta_map(v.delta, eval_phi(*v.inner, z + I_unit * v.delta));
            } else if constexpr (std::is_same_v<V, LinearTildePick>) {
                return v.slope * (z + I_unit);
            } else {
                return (v.a * z + v.b) / (v.c * z + v.d);
            }
        },
        phi.variant());
}

/// Cayley image of a single Pick value.
inline cplx to_w_value(cplx phi_value) {
    const cplx den = real(1) - I_unit * phi_value;
    if (den == cplx(0)) throw pole_error("to_w: phi = -i is not a Pick value");
    return (real(1) + I_unit * phi_value) / den;
}

inline cplx to_w(const PickFn& phi, cplx z) { return to_w_value(eval_phi(phi, z)); }

inline cplx from_w(cplx w) {
    if (w == cplx(-1)) throw pole_error("from_w: w = -1");
    return I_unit * (real(1) - w) / (real(1) + w);
}

inline WBound w_bound(const PickFn& phi) {
    if (!phi.in_Pb()) throw certificate_error("w_bound: Pick function has no bounded-image certificate");
    return std::visit(
        [&phi](const auto& v) -> WBound {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, ConstPick>) {
                return {std::abs(to_w_value(cplx(v.t, v.gamma))), "exact-moebius-disk"};
            } else if constexpr (std::is_same_v<V, GDeltaPick> || std::is_same_v<V, MoebiusPick>) {
                std::array<cplx, 4> m;
                if constexpr (std::is_same_v<V, GDeltaPick>) {
                    m = detail::g_delta_matrix(v.delta);
                } else {
                    m = {v.a, v.b, v.c, v.d};
                }
                const auto disk = detail::real_line_image(detail::moebius_compose(detail::cayley_matrix, m));
                return {std::abs(disk.centre) + disk.radius, "exact-moebius-disk"};
            } else if constexpr (std::is_same_v<V, ShiftComposePick>) {
                // Sampled over a half-plane grid; the g_delta disk is a hard ceiling.
                real sup = 0;
                constexpr int nx = 401;
                constexpr int ny = 41;
                for (int i = 1; i < nx; ++i) {
                    const real x = 10 * std::tan(pi * (real(i) / nx - real(0.5)));
                    for (int j = 0; j < ny; ++j) {
                        const real y = j == 0 ? 0 : std::pow(real(10), -3 + 6 * real(j - 1) / (ny - 2));
                        sup = std::max(sup, std::abs(to_w(phi, cplx(x, y))));
                    }
                }
                const auto disk = detail::real_line_image(
                    detail::moebius_compose(detail::cayley_matrix, detail::g_delta_matrix(v.delta)));
                const real ceiling = std::abs(disk.centre) + disk.radius;
                return {std::min(real(1.1) * sup, ceiling), "sampled"};
            } else {
                throw certificate_error("w_bound: unbounded image");
            }
        },
        phi.variant());
}

// ---------------------------------------------------------------------------
// Grammar:  const:t,gamma | gdelta:delta | shift:delta:<inner> | tilde:slope

class pick_parse_error : public error {
public:
    pick_parse_error(const std::string& what, std::size_t column)
        : error(what + " (column " + std::to_string(column + 1) + ")"), column(column) {}
    std::size_t column;
};

namespace detail {

inline real parse_number(std::string_view text, std::size_t offset) {
    real value = 0;
    if (text.empty()) throw pick_parse_error("pick: expected a number", offset);
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw pick_parse_error("pick: malformed number '" + std::string(text) + "'", offset);
    }
    return value;
}

inline PickFn parse_pick_at(std::string_view text, std::size_t offset, int depth) {
    constexpr int max_depth = 4;
    if (depth > max_depth) throw pick_parse_error("pick: nesting deeper than 4", offset);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw pick_parse_error("pick: expected '<kind>:'", offset);
    const std::string_view kind = text.substr(0, colon);
    const std::string_view rest = text.substr(colon + 1);
    const std::size_t rest_at = offset + colon + 1;
    try {
        if (kind == "const") {
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos) throw pick_parse_error("pick: const needs 't,gamma'", rest_at);
            return PickFn::constant(parse_number(rest.substr(0, comma), rest_at),
                                    parse_number(rest.substr(comma + 1), rest_at + comma + 1));
        }
        if (kind == "gdelta") return PickFn::g_delta(parse_number(rest, rest_at));
        if (kind == "tilde") return PickFn::linear_tilde(parse_number(rest, rest_at));
        if (kind == "shift") {
            const auto sep = rest.find(':');
            if (sep == std::string_view::npos) throw pick_parse_error("pick: shift needs 'delta:<inner>'", rest_at);
            const real delta = parse_number(rest.substr(0, sep), rest_at);
            return PickFn::shift_compose(delta, parse_pick_at(rest.substr(sep + 1), rest_at + sep + 1, depth + 1));
        }
    } catch (const pick_parse_error&) {
        throw;
    } catch (const domain_error& e) {
        throw pick_parse_error(std::string("pick: ") + e.what(), rest_at);
    }
    throw pick_parse_error("pick: unknown kind '" + std::string(kind) + "'", offset);
}

}  // namespace detail

inline PickFn parse_pick(std::string_view text) { return detail::parse_pick_at(text, 0, 1); }

}  // namespace nevlab

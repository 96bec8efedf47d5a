#pragma once

// Entire functions with all zeros in the upper half-plane and super-polynomial
// growth on the closed lower half-plane, together with their reflections
// f̄(z) = conj(f(conj z)) and the real split f = b - i d.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nevlab/core.hpp"
#include "nevlab/special_functions.hpp"

namespace nevlab {

/// f(z) = (2/sqrt(pi)) cos(sqrt(z) (K - i K') / 2).
struct IsmailValent {
    EllipticPair pair;
};

namespace detail {

inline wide wide_elliptic_K(wide k) {
    wide a = 1;
    wide b = wide_sqrt((1 - k) * (1 + k));
    for (int i = 0; i < 40; ++i) {
        const wide an = (a + b) / 2;
        b = wide_sqrt(a * b);
        a = an;
        const wide gap = a > b ? a - b : b - a;
        if (gap <= a * wide(1e-33L)) break;
    }
    return wide_pi / (a + b);
}

}  // namespace detail

/// f(z) + i z b(z) for the IsmailValent f.
struct TildeIV {
    EllipticPair pair;
    // K and K' carried in the wide type for real-line evaluation, where
    // f + i x b cancels x b against d near the peaks of the density.
    wide K_wide = 0;
    wide Kp_wide = 0;

    static TildeIV make(const EllipticPair& p) {
        return {p, detail::wide_elliptic_K(p.k), detail::wide_elliptic_K(p.k_complement())};
    }
};

/// C * prod (1 - z / z_n) over a finite list of zeros.
struct ZeroProduct {
    cplx C{1, 0};
    std::vector<cplx> zeros;
};

class EntireM {
public:
    using Variant = std::variant<IsmailValent, TildeIV, ZeroProduct>;

    static constexpr real default_eval_radius = 1e6L;

    EntireM(Variant v, std::string label, real eval_radius = default_eval_radius)
        : variant_(std::move(v)), label_(std::move(label)), eval_radius_(eval_radius) {
        if (!(eval_radius_ > 0)) throw domain_error("EntireM: evaluation radius must be positive");
    }

    static EntireM ismail_valent(real k) { return {IsmailValent{elliptic_pair(k)}, "iv"}; }
    static EntireM tilde_iv(real k) { return {TildeIV::make(elliptic_pair(k)), "iv-tilde"}; }
    static EntireM zero_product(cplx C, std::vector<cplx> zeros) {
        return {ZeroProduct{C, std::move(zeros)}, "zero-product"};
    }

    const Variant& variant() const { return variant_; }
    const std::string& label() const { return label_; }
    real eval_radius() const { return eval_radius_; }

    bool is_catalogue() const { return !std::holds_alternative<ZeroProduct>(variant_); }

    /// Elliptic parameters of a catalogue entry, null for ZeroProduct.
    const EllipticPair* elliptic() const {
        if (auto* iv = std::get_if<IsmailValent>(&variant_)) return &iv->pair;
        if (auto* t = std::get_if<TildeIV>(&variant_)) return &t->pair;
        return nullptr;
    }

private:
    Variant variant_;
    std::string label_;
    real eval_radius_;
};

namespace detail {

inline cplx iv_value(const EllipticPair& p, cplx z) {
    // cos is even, so the principal branch of sqrt is as good as any other.
    const cplx s = std::sqrt(z);
    return (2 / std::sqrt(pi)) * std::cos(s * cplx(p.K, -p.Kp) / real(2));
}

inline cplx iv_b(const EllipticPair& p, cplx z) {
    return (iv_value(p, z) + std::conj(iv_value(p, std::conj(z)))) / real(2);
}

}  // namespace detail

inline cplx eval_f(const EntireM& f, cplx z) {
    if (std::abs(z) > f.eval_radius()) {
        throw overflow_error("eval_f: |z| exceeds the evaluation radius of " + f.label());
    }
    const cplx value = std::visit(
        [z](const auto& v) -> cplx {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, IsmailValent>) {
                return detail::iv_value(v.pair, z);
            } else if constexpr (std::is_same_v<V, TildeIV>) {
                return detail::iv_value(v.pair, z) + I_unit * z * detail::iv_b(v.pair, z);
            } else {
                cplx acc = v.C;
                for (const cplx& zn : v.zeros) acc *= (real(1) - z / zn);
                return acc;
            }
        },
        f.variant());
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw overflow_error("eval_f: non-finite value for " + f.label());
    }
    return value;
}

/// f at a real point. Agrees with eval_f(f, cplx(x, 0)); TildeIV is evaluated
/// in the wide type, so callers that know x beyond working precision should
/// pass it that way.
inline cplx eval_f_real(const EntireM& f, wide xw) {
    const real x = static_cast<real>(xw);
    const auto* t = std::get_if<TildeIV>(&f.variant());
    if (t == nullptr || t->K_wide == 0) return eval_f(f, cplx(x, 0));
    if (std::abs(x) > f.eval_radius()) {
        throw overflow_error("eval_f: |z| exceeds the evaluation radius of " + f.label());
    }
    const wide u = wide_sqrt(xw < 0 ? -xw : xw);
    // x >= 0: f = c (cos p cosh q + i sin p sinh q), p = u K/2, q = u K'/2.
    // x < 0:  f = c (cos p cosh q - i sin p sinh q), p = u K'/2, q = u K/2.
    const wide p = u * (x >= 0 ? t->K_wide : t->Kp_wide) / 2;
    const wide q = u * (x >= 0 ? t->Kp_wide : t->K_wide) / 2;
    const wide c = 2 / wide_sqrt(wide_pi);
    const wide b = c * wide_cos(p) * wide_cosh(q);
    const wide im_f = (x >= 0 ? c : -c) * wide_sin(p) * wide_sinh(q);
    const cplx value(static_cast<real>(b), static_cast<real>(im_f + xw * b));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw overflow_error("eval_f: non-finite value for " + f.label());
    }
    return value;
}

inline cplx eval_f_bar(const EntireM& f, cplx z) { return std::conj(eval_f(f, std::conj(z))); }

struct BD {
    cplx b;
    cplx d;
};

/// f = b - i d with b, d real entire: b = (f + f̄)/2, d = (f̄ - f)/(2i).
inline BD split_bd(const EntireM& f, cplx z) {
    const cplx fz = eval_f(f, z);
    const cplx fb = eval_f_bar(f, z);
    return {(fz + fb) / real(2), (fb - fz) / (real(2) * I_unit)};
}

/// z_n = (2n+1)^2 pi^2 / (K - i K')^2 for n = 0..n_max.
inline std::vector<cplx> zeros_iv(const EllipticPair& pair, int n_max) {
    if (n_max < 0) throw domain_error("zeros_iv: n_max must be non-negative");
    const cplx w = cplx(pair.K, -pair.Kp);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const real odd = 2 * n + 1;
        out.push_back(odd * odd * pi * pi / (w * w));
    }
    return out;
}

namespace detail {

/// Newton iteration with a central-difference derivative; empty on failure.
inline std::optional<cplx> newton_zero(const EntireM& f, cplx z, int max_iter = 60) {
    try {
        for (int it = 0; it < max_iter; ++it) {
            const real h = 1e-7L * std::max<real>(1, std::abs(z));
            const cplx fz = eval_f(f, z);
            const cplx df = (eval_f(f, z + h) - eval_f(f, z - h)) / (2 * h);
            if (df == cplx(0)) return std::nullopt;
            const cplx step = fz / df;
            z -= step;
            if (std::abs(step) <= 1e-13L * std::max<real>(1, std::abs(z))) return z;
        }
    } catch (const overflow_error&) {
    }
    return std::nullopt;
}

}  // namespace detail

/// Zeros of f lying close to the real line with |Re z| <= x_max, sorted by
/// real part. Near such a zero the real-line densities have a Lorentzian
/// peak of width about Im z, which quadrature must be told about.
///
/// IsmailValent has none (its zeros sit on a ray away from the axis). For
/// TildeIV one zero sits next to each real zero of b, at distance decaying
/// like |x|^-1.5; they are located by Newton from those zeros.
inline std::vector<cplx> near_axis_zeros(const EntireM& f, real x_max) {
    std::vector<cplx> out;
    if (auto* zp = std::get_if<ZeroProduct>(&f.variant())) {
        for (const cplx& z : zp->zeros) {
            if (std::abs(z.real()) <= x_max && std::abs(z.imag()) < 1) out.push_back(z);
        }
    } else if (auto* t = std::get_if<TildeIV>(&f.variant())) {
        const real limit = std::min(x_max, f.eval_radius() / 2);
        for (int side : {+1, -1}) {
            const real freq = side > 0 ? t->pair.K : t->pair.Kp;
            for (int j = 0;; ++j) {
                const real u = (2 * j + 1) * pi / freq;
                const real x0 = side * u * u;
                if (std::abs(x0) > 1.5L * limit + 10) break;
                const real guess_im = std::min<real>(0.3L, 2 / std::pow(std::abs(x0) + 1, real(1.5)));
                const auto z = detail::newton_zero(f, cplx(x0, guess_im));
                if (!z || !(z->imag() > 0) || std::abs(z->real()) > limit) continue;
                // The root must belong to this b-zero, not a neighbour.
                const real spacing = 2 * pi * 2 * u / freq;
                if (std::abs(z->real() - x0) > spacing / 2) continue;
                out.push_back(*z);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    return out;
}

// ---------------------------------------------------------------------------
// Argument principle

namespace detail {

template <class H>
real phase_step(H& h, real ta, real tb, cplx ha, cplx hb, int depth) {
    if (ha == cplx(0) || hb == cplx(0)) throw contour_error("argument principle: function vanishes on the contour");
    const real d = std::arg(hb / ha);
    if (std::abs(d) < pi / 4) return d;
    if (depth > 48) throw non_convergence_error("argument principle: phase could not be resolved");
    const real tm = (ta + tb) / 2;
    const cplx hm = h(tm);
    return phase_step(h, ta, tm, ha, hm, depth + 1) + phase_step(h, tm, tb, hm, hb, depth + 1);
}

/// Continuous change of arg h(t) for t from t0 to t1.
template <class H>
real phase_change(H&& h, real t0, real t1, int initial_samples) {
    real total = 0;
    real tp = t0;
    cplx hp = h(t0);
    for (int i = 1; i <= initial_samples; ++i) {
        const real t = (i == initial_samples) ? t1 : t0 + (t1 - t0) * i / initial_samples;
        const cplx ht = h(t);
        total += phase_step(h, tp, t, hp, ht, 0);
        tp = t;
        hp = ht;
    }
    return total;
}

}  // namespace detail

/// Number of zeros of f inside the circle |u - centre| = radius.
inline int count_zeros_in_disk(const EntireM& f, cplx centre, real radius, int samples = 256) {
    const real turn = detail::phase_change(
        [&](real t) { return eval_f(f, centre + radius * std::polar(real(1), t)); }, 0, 2 * pi, samples);
    return static_cast<int>(std::lround(turn / (2 * pi)));
}

/// Number of zeros of f in the lower half-disk of the given radius, with the
/// real diameter included in the boundary (a zero on it raises contour_error).
inline int count_zeros_lower_half_disk(const EntireM& f, real radius, int samples = 4096) {
    const real arc = detail::phase_change(
        [&](real t) { return eval_f(f, radius * std::polar(real(1), t)); }, -pi, 0, samples);
    const real diameter = detail::phase_change(
        [&](real t) { return eval_f(f, cplx(t, 0)); }, radius, -radius, samples);
    return static_cast<int>(std::lround((arc + diameter) / (2 * pi)));
}

// ---------------------------------------------------------------------------
// Membership diagnostics

struct DecaySample {
    int n = 0;
    real radius = 0;
    real max_ratio = 0;  // max |z^n / f(z)| over the sampled lower arc
};

struct MembershipReport {
    bool zeros_ok = false;
    std::vector<DecaySample> decay_samples;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

inline MembershipReport check_membership(const EntireM& f, std::span<const int> powers,
                                         std::span<const real> radii, int arc_samples) {
    if (radii.empty() || !(radii.front() > 0) || !std::is_sorted(radii.begin(), radii.end()) ||
        std::adjacent_find(radii.begin(), radii.end()) != radii.end()) {
        throw domain_error("check_membership: radii must be positive and strictly increasing");
    }
    if (std::any_of(powers.begin(), powers.end(), [](int n) { return n < 0; })) {
        throw domain_error("check_membership: powers must be non-negative");
    }
    if (arc_samples < 2) throw domain_error("check_membership: need at least two arc samples");

    MembershipReport report;
    const real r_max = radii.back();

    if (auto* zp = std::get_if<ZeroProduct>(&f.variant())) {
        report.zeros_ok = std::all_of(zp->zeros.begin(), zp->zeros.end(), [](cplx z) { return z.imag() > 0; });
        report.note = "finite zero product: polynomial growth cannot satisfy the decay condition";
    } else if (std::holds_alternative<IsmailValent>(f.variant())) {
        // |z_n| grows like (2n+1)^2, so a few terms cover any sampled radius.
        const auto* pair = f.elliptic();
        const real scale = std::abs(cplx(pair->K, -pair->Kp));
        const int n_cover = static_cast<int>(std::sqrt(4 * r_max) * scale / pi) + 1;
        const auto zs = zeros_iv(*pair, n_cover);
        report.zeros_ok = std::all_of(zs.begin(), zs.end(), [](cplx z) { return z.imag() > 0; });
    } else {
        try {
            report.zeros_ok = count_zeros_lower_half_disk(f, r_max) == 0;
        } catch (const error& e) {
            report.zeros_ok = false;
            report.note = std::string("zero count failed: ") + e.what();
        }
    }

    bool decreasing = true;
    bool in_range = r_max <= f.eval_radius();
    for (int n : powers) {
        real previous = 0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const real r = radii[i];
            real worst = 0;
            if (r <= f.eval_radius()) {
                for (int j = 0; j < arc_samples; ++j) {
                    const real theta = -pi * j / (arc_samples - 1);
                    const cplx z = std::polar(r, theta);
                    worst = std::max(worst, std::pow(r, static_cast<real>(n)) / std::abs(eval_f(f, z)));
                }
            }
            report.decay_samples.push_back(DecaySample{n, r, worst});
            if (i > 0 && !(worst < previous)) decreasing = false;
            previous = worst;
        }
    }

    if (!report.zeros_ok) {
        report.verdict = Verdict::fail;
    } else if (!f.is_catalogue() || !in_range) {
        report.verdict = Verdict::inconclusive;
        if (!in_range) report.note = "largest radius exceeds the evaluation radius";
    } else {
        report.verdict = decreasing ? Verdict::pass : Verdict::fail;
    }
    return report;
}

}  // namespace nevlab

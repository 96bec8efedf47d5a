#pragma once

// Cauchy transforms of the densities, the entire function
//   g(z) = -f(z) ∫ mu(x; i) / (x - z) dx        (Im z < 0)
// and its continuation across the real line, the split g = a - i c, and
// residual checks for the identities tying a, b, c, d together.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "nevlab/core.hpp"
#include "nevlab/entire_m.hpp"
#include "nevlab/measures.hpp"
#include "nevlab/pick.hpp"
#include "nevlab/quadrature.hpp"

namespace nevlab {

namespace detail {

inline real density_at(const MeasureSpec& spec, wide xw) {
    const cplx fx = eval_f_real(spec.f, xw);
    const cplx w = to_w(spec.phi, cplx(static_cast<real>(xw), 0));
    return ((1 - std::norm(w)) / pi) / std::norm(w * fx - std::conj(fx));
}

struct LineIntegral {
    cplx value;
    real error = 0;
    real l1 = 0;
    long evaluations = 0;
    bool converged = false;
};

/// Truncation for ∫ mu / (x - z): T large against |z| so that |x - z| >= |x|/2
/// on the tails, which then cost at most 2 tail_0(T) / T.
inline real cauchy_T(const MeasureSpec& spec, cplx z, const QuadConfig& cfg, real margin) {
    if (cfg.truncation_T) return *cfg.truncation_T;
    return std::max(choose_truncation(spec, 0, cfg).T, 2 * std::abs(z) + margin + 2);
}

inline real cauchy_tail(const MeasureSpec& spec, real T) {
    return 2 * envelope_tail(require_decay(spec), require_delta(spec), 0, std::sqrt(T)) / T;
}

/// ∫ mu(x; phi) / (x - z) dx over [-T, T] for Im z != 0.
///
/// Close to the axis the kernel is peaked at Re z; mu(a) is subtracted on
/// the window |x - a| < rho and its integral added back in closed form.
inline LineIntegral cauchy_line(const MeasureSpec& spec, cplx z, const QuadConfig& cfg,
                                const std::vector<cplx>& zeros, real T) {
    const real a = z.real();
    const real y = z.imag();
    const real rho = 1;
    const bool subtract = std::abs(y) < 1;
    const real mu_a = subtract ? density_at(spec, a) : 0;

    std::vector<cplx> features = zeros;
    features.emplace_back(a, std::abs(y));
    if (subtract) {
        features.emplace_back(a - rho, 0);
        features.emplace_back(a + rho, 0);
    }
    const auto segments = real_line_panels(std::move(features), T);
    auto integrand = [&](const Segment& seg, real t, std::span<cplx> out) {
        const wide xw = x_at(seg, t);
        const real dx = static_cast<real>(xw - wide(a));
        real mu = density_at(spec, xw);
        if (subtract && std::abs(dx) <= rho) mu -= mu_a;
        out[0] = mu / cplx(dx, -y) * (2 * static_cast<real>(u_at(seg, t)));
    };
    auto q = integrate<cplx>(segments, 1, integrand, cfg.rel_tol, cfg.abs_tol,
                             cfg.max_subdivisions + static_cast<int>(segments.size()));
    LineIntegral out{q.value[0], q.error[0], q.l1[0], q.evaluations, q.converged};
    if (subtract) {
        const cplx window = std::log(cplx(a + rho) - z) - std::log(cplx(a - rho) - z);
        out.value += mu_a * window;
        out.l1 += mu_a * std::abs(window);
    }
    return out;
}

inline void require_tolerance(const LineIntegral& li, real tail, const QuadConfig& cfg, const char* what) {
    const real err = li.error + tail;
    if (!li.converged || err > cfg.rel_tol * li.l1 + cfg.abs_tol) {
        throw tolerance_error(std::string(what) + ": tolerance not met", {std::abs(li.value)}, {err});
    }
}

}  // namespace detail

/// I(z) = ∫ mu(x; phi) / (x - z) dx away from the real axis.
inline cplx cauchy_transform(const MeasureSpec& spec, cplx z, const QuadConfig& cfg, real strip_half_width = 1e-3L) {
    cfg.validate();
    if (z.imag() == 0) throw domain_error("cauchy_transform: z is real");
    if (std::abs(z.imag()) < strip_half_width) {
        throw domain_error("cauchy_transform: |Im z| below the strip half-width; use g_eval near the axis");
    }
    const real T = detail::cauchy_T(spec, z, cfg, 1);
    const auto li = detail::cauchy_line(spec, z, cfg, near_axis_zeros(spec.f, T), T);
    detail::require_tolerance(li, detail::cauchy_tail(spec, T), cfg, "cauchy_transform");
    return li.value;
}

/// The entire function g of f, evaluated by region.
class GEvaluator {
public:
    explicit GEvaluator(EntireM f, QuadConfig cfg = {}, real strip_half_width = 1e-3L, real contour_radius = 1)
        : base_(make_measure(std::move(f), PickFn::constant(0, 1))),
          cfg_(cfg),
          strip_(strip_half_width),
          r_(contour_radius) {
        cfg_.validate();
        if (!(strip_ > 0) || !(r_ >= r_min)) throw domain_error("GEvaluator: invalid strip or contour radius");
        T_ = detail::cauchy_T(base_, 0, cfg_, 1 + r_);
        zeros_ = near_axis_zeros(base_.f, T_);
    }

    static constexpr real r_min = 1e-2L;

    const EntireM& f() const { return base_.f; }
    const MeasureSpec& base_measure() const { return base_; }
    const QuadConfig& config() const { return cfg_; }
    real strip_half_width() const { return strip_; }
    real contour_radius() const { return r_; }

    cplx operator()(cplx z) const {
        if (z.imag() <= -strip_) return lower_formula(z);
        if (z.imag() >= strip_) return upper_formula(z);
        return contour_formula(z, radius_at(z.real()));
    }

    /// -f(z) C(z), the defining formula, valid for Im z < 0.
    cplx lower_formula(cplx z) const {
        if (!(z.imag() < 0)) throw domain_error("GEvaluator: lower formula needs Im z < 0");
        return -eval_f(f(), z) * transform(z);
    }

    /// 2i / f̄(z) + (f(z) / f̄(z)) ḡ(z) with ḡ(z) = -f̄(z) C(z), valid for Im z > 0.
    cplx upper_formula(cplx z) const {
        if (!(z.imag() > 0)) throw domain_error("GEvaluator: upper formula needs Im z > 0");
        const cplx fz = eval_f(f(), z);
        const cplx fbz = eval_f_bar(f(), z);
        if (fbz == cplx(0)) throw pole_error("GEvaluator: f̄(z) = 0");
        const cplx gbar = -fbz * transform(z);
        return real(2) * I_unit / fbz + fz / fbz * gbar;
    }

    /// -(f(z)/pi) ∫ du / (f(u) f̄(u) (u - z)) along the real line with
    /// [a - r, a + r] replaced by the upper semicircle over a = Re z, for z
    /// below that contour.
    cplx contour_formula(cplx z, real r) const {
        const real a = z.real();
        if (z.imag() >= r) throw domain_error("GEvaluator: z is not below the contour");
        const real T = std::max(T_, 2 * std::abs(z) + r + 2);
        std::vector<cplx> features = zeros_for(T);
        features.emplace_back(a - r, 0);
        features.emplace_back(a + r, 0);
        const auto segments = detail::clip_panels(detail::real_line_panels(std::move(features), T), a - r, a + r);
        auto line = [&](const Segment& seg, real t, std::span<cplx> out) {
            const wide xw = x_at(seg, t);
            const real dx = static_cast<real>(xw - wide(a));
            out[0] = detail::density_at(base_, xw) / cplx(dx, -z.imag()) * (2 * static_cast<real>(u_at(seg, t)));
        };
        auto ql = integrate<cplx>(segments, 1, line, cfg_.rel_tol, cfg_.abs_tol,
                                  cfg_.max_subdivisions + static_cast<int>(segments.size()));

        // Clockwise from a - r over the top to a + r.
        auto arc = [&](const Segment&, real theta, std::span<cplx> out) {
            const cplx e = std::polar(real(1), theta);
            const cplx u = a + r * e;
            const cplx fu = eval_f(f(), u);
            const cplx fbu = eval_f_bar(f(), u);
            out[0] = -I_unit * r * e / (pi * fu * fbu * (u - z));
        };
        std::vector<Segment> arcs;
        for (int i = 0; i < 8; ++i) arcs.push_back(Segment{pi * i / 8, pi * (i + 1) / 8, 0});
        auto qa = integrate<cplx>(arcs, 1, arc, cfg_.rel_tol, cfg_.abs_tol, cfg_.max_subdivisions);

        detail::LineIntegral li{ql.value[0] + qa.value[0], ql.error[0] + qa.error[0], ql.l1[0] + qa.l1[0],
                                ql.evaluations + qa.evaluations, ql.converged && qa.converged};
        detail::require_tolerance(li, detail::cauchy_tail(base_, T), cfg_, "g_eval (contour)");
        return -eval_f(f(), z) * li.value;
    }

    /// Contour radius for a strip point at Re z = a: the largest of r, r/2,
    /// ... whose doubled disk holds no zero of f, else r_min when its own
    /// disk is zero-free.
    real radius_at(real a) const {
        for (real r = r_; r >= r_min; r /= 2) {
            if (count_zeros_in_disk(f(), cplx(a), 2 * r) == 0) return r;
        }
        if (count_zeros_in_disk(f(), cplx(a), r_min) == 0) return r_min;
        throw contour_error("GEvaluator: a zero of f f̄ lies within r_min of the contour centre");
    }

private:
    cplx transform(cplx z) const {
        const real T = std::max(T_, 2 * std::abs(z) + 3);
        const auto li = detail::cauchy_line(base_, z, cfg_, zeros_for(T), T);
        detail::require_tolerance(li, detail::cauchy_tail(base_, T), cfg_, "g_eval");
        return li.value;
    }

    std::vector<cplx> zeros_for(real T) const { return T <= T_ ? zeros_ : near_axis_zeros(base_.f, T); }

    MeasureSpec base_;
    QuadConfig cfg_;
    real strip_;
    real r_;
    real T_ = 0;
    std::vector<cplx> zeros_;
};

inline cplx g_eval(const GEvaluator& ge, cplx z) { return ge(z); }

inline cplx g_bar_eval(const GEvaluator& ge, cplx z) { return std::conj(ge(std::conj(z))); }

struct AC {
    cplx a;
    cplx c;
};

inline AC split_ac(const GEvaluator& ge, cplx z) {
    const cplx g = ge(z);
    const cplx gb = g_bar_eval(ge, z);
    return {(g + gb) / real(2), (gb - g) / (real(2) * I_unit)};
}

/// |a d - b c - 1|.
inline real adbc_residual(const GEvaluator& ge, cplx z) {
    const auto [a, c] = split_ac(ge, z);
    const auto bd = split_bd(ge.f(), z);
    return std::abs(a * bd.d - bd.b * c - real(1));
}

/// |g f̄ - f ḡ - 2i|.
inline real fg_residual(const GEvaluator& ge, cplx z) {
    const cplx g = ge(z);
    const cplx gb = g_bar_eval(ge, z);
    return std::abs(g * eval_f_bar(ge.f(), z) - eval_f(ge.f(), z) * gb - real(2) * I_unit);
}

/// |g(x + i eps) - g(x - i eps)| with the upper and lower formulas, whose
/// Cauchy transforms jump by 2 pi i mu(x) across the axis.
inline real side_limit_gap(const GEvaluator& ge, real x, real eps = 1e-9L) {
    return std::abs(ge.upper_formula(cplx(x, eps)) - ge.lower_formula(cplx(x, -eps)));
}

struct ParamResidual {
    cplx z;
    cplx lhs;
    cplx rhs;
    real residual = 0;
    cplx rhs_w;     // -(w g - ḡ) / (w f - f̄)
    real form_gap = 0;
};

/// Compares the Cauchy transform of mu(.; phi) with -(a phi - c) / (b phi - d).
inline ParamResidual parametrization_residual(const GEvaluator& ge, const PickFn& phi, cplx z, const QuadConfig& cfg) {
    if (!(z.imag() > ge.strip_half_width())) throw domain_error("parametrization_residual: z must lie above the strip");
    if (!phi.in_Pb()) throw certificate_error("parametrization_residual: phi has no bounded-image certificate");
    ParamResidual out;
    out.z = z;
    out.lhs = cauchy_transform(make_measure(ge.f(), phi), z, cfg, ge.strip_half_width());

    const cplx g = ge(z);
    const cplx gb = g_bar_eval(ge, z);
    const cplx a = (g + gb) / real(2);
    const cplx c = (gb - g) / (real(2) * I_unit);
    const auto bd = split_bd(ge.f(), z);
    const cplx p = eval_phi(phi, z);
    out.rhs = -(a * p - c) / (bd.b * p - bd.d);

    const cplx w = to_w_value(p);
    const cplx fz = eval_f(ge.f(), z);
    const cplx fbz = eval_f_bar(ge.f(), z);
    out.rhs_w = -(w * g - gb) / (w * fz - fbz);
    out.residual = std::abs(out.lhs - out.rhs);
    out.form_gap = std::abs(out.rhs - out.rhs_w);
    return out;
}

/// |(1/pi) Im I(x + i eps) - mu(x)| for each eps.
inline std::vector<real> stieltjes_inversion_check(const MeasureSpec& spec, real x, std::span<const real> eps_list,
                                                   const QuadConfig& cfg) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
            throw domain_error("stieltjes_inversion_check: eps_list must be positive and decreasing");
        }
    }
    const real mu = detail::density_at(spec, x);
    std::vector<real> out;
    for (real eps : eps_list) {
        out.push_back(std::abs(cauchy_transform(spec, cplx(x, eps), cfg, std::min<real>(eps, 1e-3L)).imag() / pi - mu));
    }
    return out;
}

/// |F(i h)| h^4 with F = 2i w / (f̄^2 (1 - w f / f̄)), the difference between
/// the Cauchy transforms of mu(.; phi) and mu(.; i).
inline std::vector<real> asymptotic_moment_diagnostic(const GEvaluator& ge, const PickFn& phi,
                                                      std::span<const real> heights) {
    constexpr int N = 4;
    std::vector<real> out;
    for (std::size_t i = 0; i < heights.size(); ++i) {
        const real h = heights[i];
        if (!(h >= 10) || (i > 0 && !(h > heights[i - 1]))) {
            throw domain_error("asymptotic_moment_diagnostic: heights must increase from 10");
        }
        const cplx z(0, h);
        const cplx w = to_w(phi, z);
        const cplx fz = eval_f(ge.f(), z);
        const cplx fbz = eval_f_bar(ge.f(), z);
        const cplx F = real(2) * I_unit * w / (fbz * fbz * (real(1) - w * fz / fbz));
        out.push_back(std::abs(F) * std::pow(h, real(N)));
    }
    return out;
}

}  // namespace nevlab

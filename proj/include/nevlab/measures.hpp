#pragma once

// The densities
//   mu(x; phi, f) = (Im phi(x) / pi) / |d(x) - phi(x) b(x)|^2
//                 = ((1 - |w(x)|^2) / pi) / |w(x) f(x) - f̄(x)|^2,
// their moments, and the integrals I_n whose vanishing makes the moments
// independent of phi.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "nevlab/core.hpp"
#include "nevlab/entire_m.hpp"
#include "nevlab/pick.hpp"
#include "nevlab/quadrature.hpp"

namespace nevlab {

/// Envelope (1/pi) |f(x)|^-2 <= C (1 + |x|)^power exp(-m sqrt|x|) on the real line.
struct DecayFit {
    real C = 0;
    real m = 0;
    int power = 0;
};

struct MeasureSpec {
    EntireM f;
    PickFn phi;
    std::optional<WBound> delta;   // present iff phi carries a bounded-image certificate
    std::optional<DecayFit> decay; // present for catalogue entries only
};

inline constexpr int max_moment_order = 12;

/// (1/pi) |f(x)|^-2, the density for phi = i.
inline real base_density(const EntireM& f, real x) { return 1 / (pi * std::norm(eval_f_real(f, x))); }

/// Fits the envelope with m = min(K, K') and a 2x safety factor on C.
///
/// The IsmailValent density is smooth, so a grid supremum is reliable. For
/// TildeIV, |f̃|^2 = b^2 + (d - x b)^2 >= (b^2 + d^2) / (x^2 + 2), which gives
/// the IsmailValent envelope times 2 (1 + |x|)^2 without sampling the peaks.
inline DecayFit fit_decay(const EntireM& f) {
    const auto* pair = f.elliptic();
    if (pair == nullptr) throw unsupported_error("fit_decay: no decay envelope for a finite zero product");
    const EntireM smooth = EntireM(IsmailValent{*pair}, "iv");
    DecayFit fit;
    fit.m = std::min(pair->K, pair->Kp);
    real sup = 0;
    constexpr int samples = 1600;
    constexpr real u_max = 80;
    for (int i = 0; i <= samples; ++i) {
        const real u = u_max * i / samples;
        const real envelope = std::exp(fit.m * u);
        sup = std::max(sup, base_density(smooth, u * u) * envelope);
        sup = std::max(sup, base_density(smooth, -u * u) * envelope);
    }
    fit.C = 2 * sup;
    if (std::holds_alternative<TildeIV>(f.variant())) {
        fit.C *= 2;
        fit.power = 2;
    }
    return fit;
}

inline MeasureSpec make_measure(EntireM f, PickFn phi) {
    std::optional<WBound> delta;
    if (phi.in_Pb()) delta = w_bound(phi);
    std::optional<DecayFit> decay;
    if (f.is_catalogue()) decay = fit_decay(f);
    return MeasureSpec{std::move(f), std::move(phi), delta, decay};
}

inline real density_phi_form(const MeasureSpec& spec, real x) {
    const cplx fx = eval_f_real(spec.f, x);
    const real b = fx.real();
    const real d = -fx.imag();
    const cplx phi = eval_phi(spec.phi, cplx(x, 0));
    return (phi.imag() / pi) / std::norm(d - phi * b);
}

inline real density_w_form(const MeasureSpec& spec, real x) {
    const cplx fx = eval_f_real(spec.f, x);
    const cplx w = to_w(spec.phi, cplx(x, 0));
    return ((1 - std::norm(w)) / pi) / std::norm(w * fx - std::conj(fx));
}

/// |LHS - RHS| of
///   (1 - |w|^2) / |w f - f̄|^2 = 1/(f f̄) + w/(f̄ (f̄ - w f)) + w̄/(f (f - w̄ f̄))
/// at a real point x.
inline real key_identity_residual(const EntireM& f, cplx w, real x) {
    if (!(std::abs(w) < 1)) throw domain_error("key_identity_residual: |w| must be below 1");
    const cplx fx = eval_f_real(f, x);
    const cplx fb = std::conj(fx);
    const cplx wb = std::conj(w);
    const real lhs = (1 - std::norm(w)) / std::norm(w * fx - fb);
    const cplx rhs = real(1) / (fx * fb) + w / (fb * (fb - w * fx)) + wb / (fx * (fx - wb * fb));
    return std::abs(lhs - rhs);
}

namespace detail {

inline const DecayFit& require_decay(const MeasureSpec& spec) {
    if (!spec.decay) throw unsupported_error("tail bound: no decay envelope for " + spec.f.label());
    return *spec.decay;
}

inline real require_delta(const MeasureSpec& spec) {
    if (!spec.delta) throw certificate_error("measure has no WBound; moment runs need |w| <= delta < 1");
    if (!(spec.delta->delta_bound < 1)) throw certificate_error("WBound is not below one");
    return spec.delta->delta_bound;
}

/// Upper incomplete gamma for a positive integer order s.
inline real upper_gamma_int(int s, real y) {
    // (s-1)! e^-y sum_{j<s} y^j / j!, accumulated in logs.
    real sum = 0;
    const real log_y = std::log(y);
    const real log_fact = std::lgamma(static_cast<real>(s));
    for (int j = 0; j < s; ++j) {
        sum += std::exp(log_fact - y + j * log_y - std::lgamma(static_cast<real>(j + 1)));
    }
    return sum;
}

/// Bound on both tails beyond |x| = U^2 of |x|^n (1-delta)^-2 C (1+|x|)^p exp(-m sqrt|x|),
/// expanding (1 + u^2)^p binomially.
inline real envelope_tail(const DecayFit& fit, real delta, int n, real U) {
    const real pref = 4 * fit.C / ((1 - delta) * (1 - delta));
    real sum = 0;
    real binom = 1;
    for (int j = 0; j <= fit.power; ++j) {
        const int s = 2 * (n + j) + 2;
        const real piece = U <= 0 ? std::exp(std::lgamma(static_cast<real>(s)) - s * std::log(fit.m))
                                  : upper_gamma_int(s, fit.m * U) / std::pow(fit.m, static_cast<real>(s));
        sum += binom * piece;
        binom = binom * (fit.power - j) / (j + 1);
    }
    return pref * sum;
}

}  // namespace detail

inline real tail_bound_T(const MeasureSpec& spec, int n, real tol) {
    if (n < 0) throw domain_error("tail_bound_T: n must be non-negative");
    if (!(tol > 0)) throw domain_error("tail_bound_T: tolerance must be positive");
    const DecayFit& fit = detail::require_decay(spec);
    const real delta = detail::require_delta(spec);
    real hi = 1;
    while (detail::envelope_tail(fit, delta, n, hi) >= tol) {
        hi *= 2;
        if (hi > 1e6L) throw non_convergence_error("tail_bound_T: tolerance unreachable");
    }
    real lo = hi / 2;
    for (int i = 0; i < 80; ++i) {
        const real mid = (lo + hi) / 2;
        (detail::envelope_tail(fit, delta, n, mid) < tol ? hi : lo) = mid;
    }
    return hi * hi;
}

struct MomentVector {
    std::vector<real> values;
    std::vector<real> error_estimates;  // quadrature error plus truncated tail
    std::vector<real> abs_moments;      // integral of |x|^n mu, the scale of each entry
    real truncation_T_used = 0;
    long evaluations = 0;
};

namespace detail {

struct Truncation {
    real T = 0;
    std::vector<real> tail;  // envelope bound on the discarded tails, per order
};

/// Picks T so that each tail is a small fraction of the tolerance. Without a
/// scale the whole-line envelope stands in for the absolute moments.
inline Truncation choose_truncation(const MeasureSpec& spec, int n_max, const QuadConfig& cfg,
                                    const std::vector<real>* scale = nullptr) {
    const DecayFit& fit = require_decay(spec);
    const real delta = require_delta(spec);
    Truncation tr;
    if (cfg.truncation_T) {
        tr.T = *cfg.truncation_T;
    } else {
        for (int n = 0; n <= n_max; ++n) {
            const real tol = scale ? 1e-3L * (cfg.rel_tol * (*scale)[static_cast<std::size_t>(n)] + cfg.abs_tol)
                                   : 1e-5L * cfg.rel_tol * envelope_tail(fit, delta, n, 0) + 1e-3L * cfg.abs_tol;
            tr.T = std::max(tr.T, tail_bound_T(spec, n, tol));
        }
    }
    for (int n = 0; n <= n_max; ++n) tr.tail.push_back(envelope_tail(fit, delta, n, std::sqrt(tr.T)));
    return tr;
}

/// u-panels covering [-T, T] with widths at most one, refined around
/// `features`. A feature x0 + iy with y > 0 stands for a peak of width about
/// y at x0 (a zero close to the axis, or the pole of a Cauchy kernel): the
/// breakpoints sit at x0, x0 ± y, x0 ± 4y, ... and panels next to x0 take
/// u0 = sqrt|x0| as origin. A feature with y = 0 is a plain breakpoint.
inline std::vector<Segment> real_line_panels(std::vector<cplx> features, real T) {
    auto base = refine_uniform(half_line_segments(-T, T), 1);
    if (features.empty()) return base;
    std::sort(features.begin(), features.end(), [](cplx a, cplx b) { return a.real() < b.real(); });

    struct Break {
        wide at;  // position in u
        real origin;
        real offset;
    };
    std::vector<Break> pos, neg;
    for (const Segment& s : base) {
        auto& side = s.tag > 0 ? pos : neg;
        side.push_back({wide(s.lo), 0, s.lo});
        side.push_back({wide(s.hi), 0, s.hi});
    }
    // x0 + step placed on its half-line, relative to u0 when on the same side.
    auto place = [&](real x0, real step) {
        const real x = x0 + step;
        if (!(std::abs(x) < T)) return;
        auto& side = x >= 0 ? pos : neg;
        const bool same_side = x0 != 0 && (x0 > 0) == (x > 0);
        if (!same_side || step == 0) {
            const real u = std::sqrt(std::abs(x));
            side.push_back({wide(u), 0, u});
            return;
        }
        const real u0 = std::sqrt(std::abs(x0));
        // sqrt|x| - u0 without cancellation.
        const real du = (x > 0 ? step : -step) / (std::sqrt(std::abs(x)) + u0);
        side.push_back({wide(u0) + wide(du), u0, du});
    };
    for (std::size_t i = 0; i < features.size(); ++i) {
        const real x0 = features[i].real();
        const real y = std::abs(features[i].imag());
        if (!(std::abs(x0) < T)) continue;
        if (y == 0) {
            place(x0, 0);
            continue;
        }
        real reach = std::abs(x0) / 2 + 1;
        if (i > 0) reach = std::min(reach, (x0 - features[i - 1].real()) / 2);
        if (i + 1 < features.size()) reach = std::min(reach, (features[i + 1].real() - x0) / 2);
        const real u0 = std::sqrt(std::abs(x0));
        if (x0 != 0) (x0 > 0 ? pos : neg).push_back({wide(u0), u0, 0});
        for (real h = y; h < reach; h *= 4) {
            place(x0, -h);
            place(x0, h);
        }
    }

    std::vector<Segment> out;
    for (auto* side : {&neg, &pos}) {
        const int tag = side == &pos ? +1 : -1;
        std::sort(side->begin(), side->end(), [](const Break& a, const Break& b) { return a.at < b.at; });
        side->erase(std::unique(side->begin(), side->end(), [](const Break& a, const Break& b) { return a.at == b.at; }),
                    side->end());
        for (std::size_t i = 0; i + 1 < side->size(); ++i) {
            const Break& l = (*side)[i];
            const Break& r = (*side)[i + 1];
            // Prefer the origin of the end closer to its own feature.
            const bool use_left = l.origin != 0 && (r.origin == 0 || std::abs(l.offset) <= std::abs(r.offset));
            const real origin = use_left ? l.origin : r.origin;
            out.push_back(Segment{static_cast<real>(l.at - wide(origin)), static_cast<real>(r.at - wide(origin)), tag,
                                  origin});
        }
    }
    return out;
}

inline std::vector<Segment> real_line_panels(const EntireM& f, real T) { return real_line_panels(near_axis_zeros(f, T), T); }

/// Removes the part of each panel whose x lies strictly inside (x_lo, x_hi).
inline std::vector<Segment> clip_panels(std::span<const Segment> panels, real x_lo, real x_hi) {
    std::vector<Segment> out;
    for (const Segment& s : panels) {
        // Excluded u-range on this half-line, relative to the panel origin.
        real ex_lo, ex_hi;
        if (s.tag > 0) {
            ex_lo = std::sqrt(std::max<real>(x_lo, 0));
            ex_hi = x_hi > 0 ? std::sqrt(x_hi) : 0;
        } else {
            ex_lo = std::sqrt(std::max<real>(-x_hi, 0));
            ex_hi = x_lo < 0 ? std::sqrt(-x_lo) : 0;
        }
        ex_lo -= s.origin;
        ex_hi -= s.origin;
        if (!(ex_lo < ex_hi) || s.hi <= ex_lo || s.lo >= ex_hi) {
            out.push_back(s);
            continue;
        }
        if (s.lo < ex_lo) out.push_back(Segment{s.lo, ex_lo, s.tag, s.origin});
        if (ex_hi < s.hi) out.push_back(Segment{ex_hi, s.hi, s.tag, s.origin});
    }
    return out;
}

template <class T>
struct Truncated {
    QuadResult<T> q;
    Truncation tr;
};

/// Integrates moment-like integrands over [-T, T]. When the tails allowed
/// by the first choice of T turn out large against the computed absolute
/// integrals, T is re-chosen from those integrals and the run repeated.
/// `tail_factor` converts the density envelope into one for the integrand.
template <class T, class F>
Truncated<T> truncated_integrate(const MeasureSpec& spec, int n_max, const QuadConfig& cfg, F&& integrand,
                                 real tail_factor) {
    auto run = [&](Truncation tr) {
        const auto segments = real_line_panels(spec.f, tr.T);
        auto q = integrate<T>(segments, static_cast<std::size_t>(n_max) + 1, integrand, cfg.rel_tol, cfg.abs_tol,
                              cfg.max_subdivisions + static_cast<int>(segments.size()));
        return Truncated<T>{std::move(q), std::move(tr)};
    };
    auto out = run(choose_truncation(spec, n_max, cfg));
    if (cfg.truncation_T) return out;
    for (int n = 0; n <= n_max; ++n) {
        const auto i = static_cast<std::size_t>(n);
        if (tail_factor * out.tr.tail[i] > 1e-2L * (cfg.rel_tol * out.q.l1[i] + cfg.abs_tol)) {
            std::vector<real> scale = out.q.l1;
            for (real& v : scale) v /= tail_factor;
            return run(choose_truncation(spec, n_max, cfg, &scale));
        }
    }
    return out;
}

}  // namespace detail

inline MomentVector moments(const MeasureSpec& spec, int n_max, const QuadConfig& cfg) {
    cfg.validate();
    if (n_max < 0 || n_max > max_moment_order) {
        throw domain_error("moments: n_max must lie in 0.." + std::to_string(max_moment_order));
    }
    const std::size_t dim = static_cast<std::size_t>(n_max) + 1;
    auto integrand = [&](const Segment& seg, real t, std::span<real> out) {
        const wide xw = x_at(seg, t);
        const real x = static_cast<real>(xw);
        const cplx fx = eval_f_real(spec.f, xw);
        const cplx w = to_w(spec.phi, cplx(x, 0));
        real term = ((1 - std::norm(w)) / pi) / std::norm(w * fx - std::conj(fx)) * 2 * static_cast<real>(u_at(seg, t));
        for (std::size_t n = 0; n < dim; ++n) {
            out[n] = term;
            term *= x;
        }
    };
    const auto [q, tr] = detail::truncated_integrate<real>(spec, n_max, cfg, integrand, 1);

    MomentVector mv;
    mv.values = q.value;
    mv.abs_moments = q.l1;
    mv.truncation_T_used = tr.T;
    mv.evaluations = q.evaluations;
    bool ok = q.converged;
    for (std::size_t n = 0; n < dim; ++n) {
        mv.error_estimates.push_back(q.error[n] + tr.tail[n]);
        if (mv.error_estimates[n] > cfg.rel_tol * mv.abs_moments[n] + cfg.abs_tol) ok = false;
    }
    if (!ok) {
        throw tolerance_error("moments: tolerance not met for " + spec.f.label(), mv.values, mv.error_estimates);
    }
    return mv;
}

struct VanishingIntegral {
    cplx value;
    real error = 0;
    real l1 = 0;
};

/// I_n = ∫ x^n w / (f̄ (f̄ - w f)) dx for n = 0..n_max.
inline std::vector<VanishingIntegral> In_integrals(const MeasureSpec& spec, int n_max, const QuadConfig& cfg) {
    cfg.validate();
    if (n_max < 0 || n_max > max_moment_order) {
        throw domain_error("In_integral: n must lie in 0.." + std::to_string(max_moment_order));
    }
    const std::size_t dim = static_cast<std::size_t>(n_max) + 1;
    auto integrand = [&](const Segment& seg, real t, std::span<cplx> out) {
        const wide xw = x_at(seg, t);
        const real x = static_cast<real>(xw);
        const cplx fx = eval_f_real(spec.f, xw);
        const cplx fb = std::conj(fx);
        const cplx w = to_w(spec.phi, cplx(x, 0));
        cplx term = w / (fb * (fb - w * fx)) * (2 * static_cast<real>(u_at(seg, t)));
        for (std::size_t n = 0; n < dim; ++n) {
            out[n] = term;
            term *= x;
        }
    };
    // |integrand| <= pi (1 - delta)^-2 (1/pi)|f|^-2, hence the factor pi on the tail.
    const auto [q, tr] = detail::truncated_integrate<cplx>(spec, n_max, cfg, integrand, pi);
    std::vector<VanishingIntegral> out;
    std::vector<real> best, achieved;
    for (std::size_t n = 0; n < dim; ++n) {
        out.push_back({q.value[n], q.error[n] + pi * tr.tail[n], q.l1[n]});
        best.push_back(std::abs(q.value[n]));
        achieved.push_back(out.back().error);
    }
    if (!q.converged) throw tolerance_error("In_integral: tolerance not met", best, achieved);
    return out;
}

inline cplx In_integral(const MeasureSpec& spec, int n, const QuadConfig& cfg) {
    return In_integrals(spec, n, cfg).at(static_cast<std::size_t>(n)).value;
}

}  // namespace nevlab

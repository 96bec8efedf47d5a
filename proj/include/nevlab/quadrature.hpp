#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
// integrands, plus the change of variables x = ±u^2 used on the real line.
//
// Panels carry the QUADPACK error estimate. The final value is assembled by
// pairwise summation over panels sorted by (segment, left endpoint), so the
// result does not depend on the order in which panels were refined.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nevlab/core.hpp"

namespace nevlab {

/// Quadrature policy shared by every integral in the library.
struct QuadConfig {
    real rel_tol = 1e-10L;
    real abs_tol = 1e-14L;
    int max_subdivisions = 2000;
    std::optional<real> truncation_T;  // empty: choose from the tail bound

    void validate() const {
        if (!(rel_tol > 0) || !(abs_tol > 0)) {
            throw domain_error("QuadConfig: tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw domain_error("QuadConfig: max_subdivisions must be at least 1");
        }
        if (truncation_T && !(*truncation_T > 0)) {
            throw domain_error("QuadConfig: truncation_T must be positive");
        }
    }
};

/// An integration interval [origin + lo, origin + hi]. `tag` selects the
/// parametrisation seen by the integrand (for instance +1 / -1 for the two
/// half-lines in u). Nodes are generated relative to `origin`, so a sharp
/// feature placed there is sampled without the rounding of a large abscissa.
struct Segment {
    real lo = 0;
    real hi = 0;
    int tag = 0;
    real origin = 0;
};

template <class T>
struct QuadResult {
    std::vector<T> value;
    std::vector<real> error;
    std::vector<real> l1;  // integral of |integrand|, per component
    std::vector<Segment> panels;
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// Kronrod abscissae (descending), Kronrod weights, Gauss weights.
inline constexpr real gk15_x[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.0L};
inline constexpr real gk15_wk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr real gk15_wg[4] = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <class T>
T pairwise_sum(std::span<const T> xs) {
    if (xs.size() <= 8) {
        T acc{};
        for (const T& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <class T>
struct Panel {
    Segment seg;
    std::size_t order = 0;  // index of the originating segment
    std::vector<T> value;
    std::vector<real> error;
    std::vector<real> l1;
    bool splittable = true;
};

template <class T, class F>
Panel<T> gk15(const Segment& seg, std::size_t order, std::size_t dim, F& f, std::vector<T>& fv) {
    constexpr real eps = std::numeric_limits<real>::epsilon();
    constexpr real tiny = std::numeric_limits<real>::min();

    const real centre = (seg.lo + seg.hi) / 2;
    const real half = (seg.hi - seg.lo) / 2;
    fv.assign(15 * dim, T{});
    auto row = [&](std::size_t node) { return std::span<T>(fv.data() + node * dim, dim); };

    f(seg, centre, row(0));
    for (std::size_t j = 0; j < 7; ++j) {
        const real dx = half * gk15_x[j];
        f(seg, centre - dx, row(1 + 2 * j));
        f(seg, centre + dx, row(2 + 2 * j));
    }

    Panel<T> p;
    p.seg = seg;
    p.order = order;
    p.value.resize(dim);
    p.error.resize(dim);
    p.l1.resize(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        auto at = [&](std::size_t node) { return fv[node * dim + c]; };
        T resk = at(0) * gk15_wk[7];
        T resg = at(0) * gk15_wg[3];
        real resabs = std::abs(at(0)) * gk15_wk[7];
        for (std::size_t j = 0; j < 7; ++j) {
            const T pair = at(1 + 2 * j) + at(2 + 2 * j);
            resk += pair * gk15_wk[j];
            if (j % 2 == 1) resg += pair * gk15_wg[j / 2];
            resabs += gk15_wk[j] * (std::abs(at(1 + 2 * j)) + std::abs(at(2 + 2 * j)));
        }
        const T mean = resk * real(0.5);
        real resasc = gk15_wk[7] * std::abs(at(0) - mean);
        for (std::size_t j = 0; j < 7; ++j) {
            resasc += gk15_wk[j] * (std::abs(at(1 + 2 * j) - mean) + std::abs(at(2 + 2 * j) - mean));
        }
        const real h = std::abs(half);
        resabs *= h;
        resasc *= h;
        real err = std::abs((resk - resg) * half);
        if (resasc != 0 && err != 0) {
            err = resasc * std::min<real>(1, std::pow(200 * err / resasc, real(1.5)));
        }
        if (resabs > tiny / (50 * eps)) {
            err = std::max(50 * eps * resabs, err);
        }
        p.value[c] = resk * half;
        p.error[c] = err;
        p.l1[c] = resabs;
    }
    const real scale = std::max(std::abs(seg.lo), std::abs(seg.hi));
    p.splittable = std::abs(seg.hi - seg.lo) > 256 * eps * std::max<real>(scale, 1);
    return p;
}

}  // namespace detail

/// Integrates a `dim`-component integrand over the union of `segments`.
///
/// `f(seg, t, out)` writes the integrand at the point seg.origin + t. Component c has converged when its summed error is below
/// max(rel_tol * L1_c, abs_tol), where L1_c is the integral of |f_c|.
/// The loop stops at `max_panels`; check `converged`.
template <class T, class F>
QuadResult<T> integrate(std::span<const Segment> segments, std::size_t dim, F&& f, real rel_tol,
                        real abs_tol, int max_panels) {
    std::vector<detail::Panel<T>> panels;
    std::vector<T> scratch;
    QuadResult<T> out;
    panels.reserve(segments.size() + static_cast<std::size_t>(std::max(max_panels, 0)));
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (segments[s].hi == segments[s].lo) continue;
        panels.push_back(detail::gk15<T>(segments[s], s, dim, f, scratch));
        out.evaluations += 15;
    }

    std::vector<real> err_sum(dim, 0), l1_sum(dim, 0), target(dim, 0);
    auto refresh = [&] {
        std::fill(err_sum.begin(), err_sum.end(), real(0));
        std::fill(l1_sum.begin(), l1_sum.end(), real(0));
        for (const auto& p : panels) {
            for (std::size_t c = 0; c < dim; ++c) {
                err_sum[c] += p.error[c];
                l1_sum[c] += p.l1[c];
            }
        }
        bool done = true;
        for (std::size_t c = 0; c < dim; ++c) {
            target[c] = std::max(rel_tol * l1_sum[c], abs_tol);
            if (err_sum[c] > target[c]) done = false;
        }
        return done;
    };

    bool done = refresh();
    while (!done && static_cast<int>(panels.size()) < max_panels) {
        std::size_t worst = panels.size();
        real worst_score = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (!panels[i].splittable) continue;
            real score = 0;
            for (std::size_t c = 0; c < dim; ++c) {
                if (err_sum[c] > target[c]) score = std::max(score, panels[i].error[c] / target[c]);
            }
            if (score > worst_score) {
                worst_score = score;
                worst = i;
            }
        }
        if (worst == panels.size()) break;

        const Segment s = panels[worst].seg;
        const std::size_t order = panels[worst].order;
        const real mid = (s.lo + s.hi) / 2;
        auto left = detail::gk15<T>(Segment{s.lo, mid, s.tag, s.origin}, order, dim, f, scratch);
        auto right = detail::gk15<T>(Segment{mid, s.hi, s.tag, s.origin}, order, dim, f, scratch);
        out.evaluations += 30;
        for (std::size_t c = 0; c < dim; ++c) {
            err_sum[c] += left.error[c] + right.error[c] - panels[worst].error[c];
            l1_sum[c] += left.l1[c] + right.l1[c] - panels[worst].l1[c];
        }
        panels[worst] = std::move(left);
        panels.push_back(std::move(right));

        done = true;
        for (std::size_t c = 0; c < dim; ++c) {
            target[c] = std::max(rel_tol * l1_sum[c], abs_tol);
            if (err_sum[c] > target[c]) done = false;
        }
        if (done) done = refresh();  // guard against drift in the running sums
    }

    std::sort(panels.begin(), panels.end(), [](const auto& a, const auto& b) {
        return a.order != b.order ? a.order < b.order : a.seg.lo < b.seg.lo;
    });
    refresh();
    out.converged = done;
    out.value.resize(dim);
    out.error = err_sum;
    out.l1 = l1_sum;
    std::vector<T> column(panels.size());
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < panels.size(); ++i) column[i] = panels[i].value[c];
        out.value[c] = detail::pairwise_sum<T>(column);
    }
    out.panels.reserve(panels.size());
    for (const auto& p : panels) out.panels.push_back(p.seg);
    return out;
}

// ---------------------------------------------------------------------------
// Real-line parametrisation x = u^2 (tag +1) and x = -u^2 (tag -1).
// With this change of variables the oscillation cos(sqrt(x) K) of the
// catalogue densities becomes cos(u K), uniform in frequency.

inline real x_from_u(int tag, real u) { return tag > 0 ? u * u : -u * u; }

/// u = origin + t and x = ±u^2 carried in the wide type.
inline wide u_at(const Segment& s, real t) { return wide(s.origin) + wide(t); }
inline wide x_at(const Segment& s, real t) {
    const wide u = u_at(s, t);
    return s.tag > 0 ? u * u : -u * u;
}

/// Covers [a, b] by u-segments; the Jacobian dx = 2u du is the integrand's job.
inline std::vector<Segment> half_line_segments(real a, real b) {
    std::vector<Segment> out;
    if (!(a < b)) return out;
    if (a < 0) out.push_back(Segment{std::sqrt(-std::min<real>(b, 0)), std::sqrt(-a), -1});
    if (b > 0) out.push_back(Segment{std::sqrt(std::max<real>(a, 0)), std::sqrt(b), +1});
    return out;
}

/// Splits every segment into equal pieces no wider than `max_width`.
inline std::vector<Segment> refine_uniform(std::span<const Segment> segments, real max_width) {
    std::vector<Segment> out;
    for (const auto& s : segments) {
        const real width = s.hi - s.lo;
        const auto pieces = std::max<long>(1, static_cast<long>(std::ceil(width / max_width)));
        for (long i = 0; i < pieces; ++i) {
            const real lo = s.lo + width * static_cast<real>(i) / static_cast<real>(pieces);
            const real hi = (i + 1 == pieces) ? s.hi : s.lo + width * static_cast<real>(i + 1) / static_cast<real>(pieces);
            out.push_back(Segment{lo, hi, s.tag, s.origin});
        }
    }
    return out;
}

}  // namespace nevlab

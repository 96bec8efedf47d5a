// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nevlab/ismail_valent.hpp"
#include "nevlab/measures.hpp"
#include "nevlab/special_functions.hpp"
#include "nevlab/transforms.hpp"
#include "support/generators.hpp"

using namespace nevlab;
using nevlab::testing::Gen;

namespace {

const real inv_sqrt2 = 1 / std::sqrt(real(2));

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class... Args>
std::string fmt(const char* format, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<EntireM> catalogue(real k) { return {EntireM::ismail_valent(k), EntireM::tilde_iv(k)}; }

// The Pick functions of the catalogue that carry a bounded-image certificate.
std::vector<PickFn> bounded_catalogue() {
    return {PickFn::constant(0, 1),     PickFn::constant(0, 2), PickFn::constant(1, 1),
            PickFn::constant(-2, 0.5L), PickFn::g_delta(1),     PickFn::g_delta(0.5L),
            PickFn::shift_compose(0.5L, PickFn::constant(0, 2))};
}

// 20 real abscissae in [-5, 5], off the grid columns.
std::vector<real> real_points() {
    std::vector<real> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(-5 + 10 * (i + 0.5L) / 20);
    return xs;
}

// 5x5 grid on [-5, 5] x [-2, 2] plus the real abscissae.
std::vector<cplx> identity_points() {
    std::vector<cplx> zs;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) zs.emplace_back(-5 + 2.5L * i, -2 + j);
    }
    for (real x : real_points()) zs.emplace_back(x, 0);
    return zs;
}

Outcome total_mass() {
    const auto mv = moments(make_measure(EntireM::ismail_valent(inv_sqrt2), PickFn::constant(0, 1)), 0, {});
    const real gap = std::abs(mv.values[0] - 1);
    return {gap < 1e-9L, fmt("|mu_0 - 1| = %.3Le (tol 1e-9)", gap)};
}

Outcome moment_invariance() {
    const std::vector<PickFn> phis{PickFn::constant(0, 2), PickFn::constant(1, 1), PickFn::g_delta(1),
                                   PickFn::shift_compose(0.1L, PickFn::constant(0, 1))};
    constexpr int n_max = 10;
    real worst_budget = 0, worst_rel = 0;
    int failures = 0, entries = 0;
    for (real k : {0.5L, inv_sqrt2}) {
        for (const auto& f : catalogue(k)) {
            const auto base = moments(make_measure(f, PickFn::constant(0, 1)), n_max, {});
            for (const auto& phi : phis) {
                const auto mv = moments(make_measure(f, phi), n_max, {});
                for (std::size_t n = 0; n <= n_max; ++n) {
                    const real gap = std::abs(mv.values[n] - base.values[n]);
                    const real budget = mv.error_estimates[n] + base.error_estimates[n];
                    // Odd moments vanish at k = 1/sqrt(2); the absolute moment is the scale.
                    const real rel = gap / base.abs_moments[n];
                    worst_budget = std::max(worst_budget, gap / budget);
                    worst_rel = std::max(worst_rel, rel);
                    ++entries;
                    if (!(gap <= budget && rel <= 1e-8L)) ++failures;
                }
            }
        }
    }
    return {failures == 0, fmt("%d entries, max gap/budget %.3Lf, max gap/abs-moment %.3Le (tol 1e-8), %d failures",
                               entries, worst_budget, worst_rel, failures)};
}

Outcome key_identity() {
    Gen gen(nevlab::testing::property_seed + 3);
    const std::vector<EntireM> fs{EntireM::ismail_valent(inv_sqrt2), EntireM::tilde_iv(inv_sqrt2),
                                  EntireM::ismail_valent(0.5L), EntireM::tilde_iv(0.5L)};
    real worst = 0;
    int boundary = 0;
    for (int i = 0; i < 500; ++i) {
        const auto& f = fs[static_cast<std::size_t>(i) % fs.size()];
        const bool edge = i % 5 == 0;
        const cplx w = edge ? std::polar(0.99L, 2 * pi * gen.uniform()) : gen.disk(0.99L);
        boundary += edge;
        worst = std::max(worst, key_identity_residual(f, w, gen.uniform(-20, 20)));
    }
    return {worst < 1e-10L, fmt("500 samples (%d with |w| = 0.99), max residual %.3Le (tol 1e-10)", boundary, worst)};
}

Outcome vanishing_integrals() {
    QuadConfig cfg;
    cfg.rel_tol = 1e-16L;
    real worst = 0;
    for (const auto& f : catalogue(inv_sqrt2)) {
        for (const auto& phi : {PickFn::constant(0, 2), PickFn::g_delta(1)}) {
            for (const auto& v : In_integrals(make_measure(f, phi), 8, cfg)) worst = std::max(worst, std::abs(v.value));
        }
    }
    return {worst < 1e-7L, fmt("max |I_n|, n = 0..8 = %.3Le (tol 1e-7)", worst)};
}

Outcome adbc_identity() {
    real worst = 0;
    for (const auto& f : catalogue(inv_sqrt2)) {
        const GEvaluator ge(f);
        for (cplx z : identity_points()) worst = std::max(worst, adbc_residual(ge, z));
    }
    return {worst < 1e-7L, fmt("45 points x 2 functions, max residual %.3Le (tol 1e-7)", worst)};
}

Outcome continuation() {
    real gap = 0, fg = 0;
    for (const auto& f : catalogue(inv_sqrt2)) {
        const GEvaluator ge(f);
        for (real x : real_points()) gap = std::max(gap, side_limit_gap(ge, x));
        for (cplx z : identity_points()) fg = std::max(fg, fg_residual(ge, z));
    }
    return {gap < 1e-6L && fg < 1e-7L,
            fmt("max side-limit gap %.3Le (tol 1e-6), max fg residual %.3Le (tol 1e-7)", gap, fg)};
}

Outcome parametrization() {
    const cplx points[] = {{0, 1}, {1, 1}, {-2, 0.5L}, {3, 2}, {0.5L, 0.2L}};
    real worst = 0, form = 0;
    int count = 0;
    for (const auto& f : catalogue(inv_sqrt2)) {
        const GEvaluator ge(f);
        for (const auto& phi : bounded_catalogue()) {
            for (cplx z : points) {
                const auto r = parametrization_residual(ge, phi, z, {});
                worst = std::max(worst, r.residual);
                form = std::max(form, r.form_gap / std::abs(r.rhs));
                ++count;
            }
        }
    }
    return {worst < 1e-6L && form < 1e-12L,
            fmt("%d cases, max residual %.3Le (tol 1e-6), max relative form gap %.3Le (tol 1e-12)", count, worst, form)};
}

Outcome stieltjes() {
    const real eps[] = {0.1L, 0.05L, 0.025L};
    int failures = 0, runs = 0;
    real worst_ratio = 0;
    for (const auto& f : catalogue(inv_sqrt2)) {
        const auto spec = make_measure(f, PickFn::constant(0, 1));
        for (real x : {-2.0L, -1.0L, 0.0L, 1.0L, 2.0L}) {
            const auto err = stieltjes_inversion_check(spec, x, eps, {});
            const bool decreasing = err[1] < err[0] && err[2] < err[1];
            worst_ratio = std::max(worst_ratio, err[2] / err[0]);
            ++runs;
            if (!(decreasing && err[2] < 0.5L * err[0])) ++failures;
        }
    }
    return {failures == 0,
            fmt("%d abscissa runs, max final/initial error %.3Lf (tol 0.5), %d failures", runs, worst_ratio, failures)};
}

Outcome case_study_check() {
    const auto rep = case_study(elliptic_pair(inv_sqrt2), {});
    real pointwise = 0, budget_ratio = 0;
    for (const auto& p : rep.pointwise_residuals) pointwise = std::max(pointwise, p.residual);
    bool moments_ok = true;
    for (const auto& m : rep.moment_match) {
        budget_ratio = std::max(budget_ratio, m.gap / m.budget);
        moments_ok = moments_ok && m.gap <= m.budget;
    }
    const bool ok = pointwise < 1e-10L && moments_ok && rep.ls_residual > 1e-2L;
    return {ok, fmt("max pointwise %.3Le (tol 1e-10), max moment gap/budget %.3Lf, LS residual %.4Lf (> 1e-2)",
                    pointwise, budget_ratio, rep.ls_residual)};
}

Outcome special_functions() {
    real worst = 0;
    for (real k : {0.1L, 0.3L, 0.5L, inv_sqrt2, 0.9L}) {
        const real series = pi / 2 * hyp2f1_half_series(k * k, 1e-22L);
        worst = std::max(worst, std::abs(elliptic_K(k) / series - 1));
    }
    return {worst < 1e-13L, fmt("5 moduli, max relative gap to the series %.3Le (tol 1e-13)", worst)};
}

Outcome property_suites() {
    Gen gen(nevlab::testing::property_seed);
    int failures = 0, checks = 0;
    auto check = [&](bool ok) {
        ++checks;
        if (!ok) ++failures;
    };
    const std::vector<EntireM> fs{EntireM::ismail_valent(inv_sqrt2), EntireM::tilde_iv(inv_sqrt2),
                                  EntireM::ismail_valent(0.5L), EntireM::tilde_iv(0.5L)};
    const auto phis = bounded_catalogue();
    for (int i = 0; i < 400; ++i) {
        const auto& f = fs[gen.next() % fs.size()];
        const cplx z = gen.upper(20, 10);
        check(std::abs(eval_f(f, z) / eval_f_bar(f, z)) < 1);
        const auto bd = split_bd(f, z);
        check((-bd.d / bd.b).imag() > 0);
    }
    const auto pair = elliptic_pair(inv_sqrt2);
    const auto iv = EntireM::ismail_valent(inv_sqrt2);
    for (int i = 0; i < 200; ++i) {
        const cplx z = gen.disk(20);
        const cplx s = std::sqrt(z) * cplx(pair.K, -pair.Kp) / real(2);
        const cplx plus = 2 / std::sqrt(pi) * std::cos(s);
        const cplx minus = 2 / std::sqrt(pi) * std::cos(-s);
        check(std::abs(plus - minus) <= 1e-12L * std::max<real>(1, std::abs(plus)));
        check(std::abs(eval_f(iv, z) - plus) <= 1e-12L * std::max<real>(1, std::abs(plus)));
    }
    for (int i = 0; i < 400; ++i) {
        const auto& f = fs[gen.next() % fs.size()];
        const auto spec = make_measure(f, phis[gen.next() % phis.size()]);
        const real x = gen.uniform(-60, 60);
        const real a = density_phi_form(spec, x);
        const real b = density_w_form(spec, x);
        check(a > 0 && std::abs(a - b) <= 1e-12L * a);
        const real delta = spec.delta->delta_bound;
        check(b <= base_density(f, x) / ((1 - delta) * (1 - delta)) * (1 + 1e-14L));
    }
    return {failures == 0, fmt("seed %llu, %d checks, %d failures", static_cast<unsigned long long>(nevlab::testing::property_seed),
                               checks, failures)};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "total mass", 5, total_mass},
        {2, "moment invariance", 180, moment_invariance},
        {3, "key identity", 1, key_identity},
        {4, "vanishing integrals", 60, vanishing_integrals},
        {5, "ad - bc = 1", 120, adbc_identity},
        {6, "entire continuation of g", 120, continuation},
        {7, "parametrization", 300, parametrization},
        {8, "Stieltjes inversion", 60, stieltjes},
        {9, "case study k = 1/sqrt(2)", 60, case_study_check},
        {10, "elliptic K vs series", 1, special_functions},
        {11, "property suites", 60, property_suites},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s %2d %-26s %s; %.2fs (budget %gs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.budget_s, in_time ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

#pragma once

// The nevlab subcommands as functions from a Scenario to a report. Exit
// codes: 0 all checks pass, 1 numerical failure, 2 usage or config error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nevlab/cli/json_writer.hpp"
#include "nevlab/cli/scenario.hpp"
#include "nevlab/core.hpp"
#include "nevlab/entire_m.hpp"
#include "nevlab/ismail_valent.hpp"
#include "nevlab/measures.hpp"
#include "nevlab/pick.hpp"
#include "nevlab/transforms.hpp"

namespace nevlab::cli {

inline constexpr const char* tool_version = "0.1.0";

enum class Format { json, csv };

inline Format parse_format(const std::string& text) {
    if (text == "json") return Format::json;
    if (text == "csv") return Format::csv;
    throw usage_error("--format: expected json or csv, got '" + text + "'");
}

struct Check {
    std::string label;
    real value = 0;
    real tolerance = 0;
    const char* relation = "<=";  // value relation tolerance must hold
    bool pass = false;
};

inline Check at_most(std::string label, real value, real tol) {
    return {std::move(label), value, tol, "<=", value <= tol};
}
inline Check below(std::string label, real value, real tol) {
    return {std::move(label), value, tol, "<", value < tol};
}
inline Check above(std::string label, real value, real tol) {
    return {std::move(label), value, tol, ">", value > tol};
}

struct Report {
    Json results = Json::object();
    std::vector<Check> checks;
    std::string csv;  // set by commands with a tabular form
};

struct CommandOutput {
    int exit_code = 0;
    std::string text;         // report for stdout or --out
    std::string diagnostics;  // message for stderr
};

inline std::string csv_number(real v) { return format_number(v); }

inline std::string checks_csv(const std::vector<Check>& checks) {
    std::string out = "label,value,relation,tolerance,pass\n";
    for (const auto& c : checks) {
        out += c.label + "," + csv_number(c.value) + "," + c.relation + "," + csv_number(c.tolerance) + "," +
               (c.pass ? "true" : "false") + "\n";
    }
    return out;
}

inline bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

inline Json envelope(const Scenario& s, const Json& command, const Report& r, long long wall_ms) {
    Json scenario = scenario_json(s);
    scenario.set("command", command);

    Json checks = Json::array();
    real worst = 0, sum = 0;
    int counted = 0, failures = 0;
    for (const auto& c : r.checks) {
        Json j = Json::object();
        j.set("label", c.label);
        j.set("value", c.value);
        j.set("relation", c.relation);
        j.set("tolerance", c.tolerance);
        j.set("pass", c.pass);
        checks.push(j);
        if (!c.pass) ++failures;
        // Lower-bound checks are not residuals.
        if (std::string(c.relation) != ">") {
            worst = std::max(worst, c.value);
            sum += c.value;
            ++counted;
        }
    }
    Json results = r.results;
    results.set("checks", checks);

    Json summary = Json::object();
    summary.set("count", counted);
    summary.set("failures", failures);
    summary.set("max", worst);
    summary.set("mean", counted > 0 ? sum / counted : real(0));

    Json env = Json::object();
    env.set("tool_version", tool_version);
    env.set("scenario", scenario);
    if (wants(s, "results")) env.set("results", results);
    if (wants(s, "residual_summary")) env.set("residual_summary", summary);
    env.set("verdict", all_pass(r.checks) ? "pass" : "fail");
    env.set("wall_time_ms", wall_ms);
    return env;
}

/// Runs a command body and maps its outcome onto the exit-code contract.
template <class Body>
CommandOutput run_command(const Scenario& s, const Json& command, Format format, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    CommandOutput out;
    try {
        const Report r = body();
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        if (format == Format::csv) {
            out.text = r.csv.empty() ? checks_csv(r.checks) : r.csv;
        } else {
            out.text = envelope(s, command, r, static_cast<long long>(ms)).dump();
        }
        out.exit_code = all_pass(r.checks) ? 0 : 1;
        if (out.exit_code != 0) out.diagnostics = "verdict: fail";
    } catch (const usage_error& e) {
        out = {2, "", e.what()};
    } catch (const pick_parse_error& e) {
        out = {2, "", e.what()};
    } catch (const unsupported_error& e) {
        out = {2, "", e.what()};
    } catch (const certificate_error& e) {
        out = {2, "", e.what()};
    } catch (const domain_error& e) {
        out = {2, "", e.what()};
    } catch (const error& e) {
        out = {1, "", e.what()};
    }
    return out;
}

// ---------------------------------------------------------------------------
// moments

struct MomentsArgs {
    int n = 10;
    bool compare = false;
};

inline constexpr real moment_compare_rel = 1e-8L;

inline Report moments_report(const Scenario& s, const MomentsArgs& args) {
    if (args.n < 0 || args.n > max_moment_order) {
        throw usage_error("--n: moment order must lie in 0.." + std::to_string(max_moment_order));
    }
    const EntireM f = make_entire(s);
    const PickFn phi = make_pick(s.pick);
    if (!phi.in_Pb()) throw usage_error("--pick '" + s.pick + "': moments need a Pick function with bounded image");
    const auto mv = moments(make_measure(f, phi), args.n, s.quad);

    Report r;
    r.results.set("values", Json::array_of(mv.values));
    r.results.set("error_estimates", Json::array_of(mv.error_estimates));
    r.results.set("abs_moments", Json::array_of(mv.abs_moments));
    r.results.set("truncation_T", mv.truncation_T_used);
    r.results.set("evaluations", mv.evaluations);
    for (int n = 0; n <= args.n; ++n) {
        const auto i = static_cast<std::size_t>(n);
        r.checks.push_back(at_most("error_estimate[" + std::to_string(n) + "]", mv.error_estimates[i],
                                   s.quad.rel_tol * mv.abs_moments[i] + s.quad.abs_tol));
    }
    r.csv = "n,moment,error_estimate";
    std::vector<real> gaps;
    MomentVector ref;
    if (args.compare) {
        ref = moments(make_measure(f, PickFn::constant(0, 1)), args.n, s.quad);
        r.results.set("reference_values", Json::array_of(ref.values));
        for (int n = 0; n <= args.n; ++n) {
            const auto i = static_cast<std::size_t>(n);
            gaps.push_back(std::abs(mv.values[i] - ref.values[i]));
            r.checks.push_back(at_most("gap[" + std::to_string(n) + "]", gaps.back(),
                                       moment_compare_rel * ref.abs_moments[i]));
        }
        r.results.set("gaps", Json::array_of(gaps));
        r.csv += ",reference,gap";
    }
    r.csv += "\n";
    for (int n = 0; n <= args.n; ++n) {
        const auto i = static_cast<std::size_t>(n);
        r.csv += std::to_string(n) + "," + csv_number(mv.values[i]) + "," + csv_number(mv.error_estimates[i]);
        if (args.compare) r.csv += "," + csv_number(ref.values[i]) + "," + csv_number(gaps[i]);
        r.csv += "\n";
    }
    return r;
}

inline CommandOutput cmd_moments(const Scenario& s, const MomentsArgs& args, Format format) {
    Json command = Json::object();
    command.set("name", "moments");
    command.set("n", args.n);
    command.set("compare", args.compare);
    return run_command(s, command, format, [&] { return moments_report(s, args); });
}

// ---------------------------------------------------------------------------
// density

struct DensityArgs {
    std::string range = "-20:20";
    int points = 801;
};

inline constexpr real density_gap_tol = 1e-12L;

inline Report density_report(const Scenario& s, const DensityArgs& args) {
    if (args.points < 1) throw usage_error("--points: must be at least 1");
    const auto colon = args.range.find(':');
    if (colon == std::string::npos) throw usage_error("--range: expected lo:hi, got '" + args.range + "'");
    const auto xs = parse_axis(args.range + ":" + std::to_string(args.points), "--range");
    const EntireM f = make_entire(s);
    const PickFn phi = make_pick(s.pick);
    const MeasureSpec spec{f, phi, std::nullopt, std::nullopt};

    Report r;
    r.csv = "x,density_phi_form,density_w_form,abs_gap\n";
    Json rows = Json::array();
    real worst = 0;
    for (real x : xs) {
        const real a = density_phi_form(spec, x);
        const real b = density_w_form(spec, x);
        const real gap = std::abs(a - b);
        worst = std::max(worst, gap);
        Json row = Json::array();
        row.push(x).push(a).push(b).push(gap);
        rows.push(row);
        r.csv += csv_number(x) + "," + csv_number(a) + "," + csv_number(b) + "," + csv_number(gap) + "\n";
    }
    r.results.set("columns", Json::array_of(std::vector<std::string>{"x", "density_phi_form", "density_w_form",
                                                                     "abs_gap"}));
    r.results.set("rows", rows);
    r.checks.push_back(at_most("max abs_gap", worst, density_gap_tol));
    return r;
}

inline CommandOutput cmd_density(const Scenario& s, const DensityArgs& args, Format format) {
    Json command = Json::object();
    command.set("name", "density");
    command.set("range", args.range);
    command.set("points", args.points);
    return run_command(s, command, format, [&] { return density_report(s, args); });
}

// ---------------------------------------------------------------------------
// case-study

inline Report case_study_report(const Scenario& s) {
    EllipticPair pair;
    try {
        pair = elliptic_pair(s.k);
    } catch (const domain_error& e) {
        throw usage_error(std::string("--k: ") + e.what());
    }
    const auto rep = case_study(pair, s.quad);
    const bool symmetric = std::abs(std::log(pair.k / pair.k_complement())) < 1e-12L;

    Report r;
    r.results.set("k", rep.k);
    Json pw = Json::array();
    for (const auto& p : rep.pointwise_residuals) {
        Json j = Json::object();
        j.set("x", p.x).set("residual", p.residual);
        pw.push(j);
        if (symmetric) {
            r.checks.push_back(below("pointwise x=" + format_number(p.x), p.residual, case_study_pointwise_tol));
        }
    }
    r.results.set("pointwise_residuals", pw);
    Json mm = Json::array();
    for (const auto& m : rep.moment_match) {
        Json j = Json::object();
        j.set("n", m.n).set("mu_f", m.mu_f).set("mu_tilde", m.mu_tilde).set("gap", m.gap).set("budget", m.budget);
        mm.push(j);
        r.checks.push_back(at_most("moment gap n=" + std::to_string(m.n), m.gap, m.budget));
    }
    r.results.set("moment_match", mm);
    r.results.set("ls_residual", rep.ls_residual);
    r.checks.push_back(above("least-squares residual of D in span{b~, d~}", rep.ls_residual, case_study_ls_threshold));
    r.results.set("verdict", to_string(rep.verdict));
    r.results.set("notes", rep.notes);
    return r;
}

inline CommandOutput cmd_case_study(const Scenario& s, Format format) {
    Json command = Json::object();
    command.set("name", "case-study");
    if (format == Format::csv) return {2, "", "case-study: only --format json is available"};
    return run_command(s, command, format, [&] { return case_study_report(s); });
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string suite;
    std::string grid = "-5:5:5x-2:2:5";
    std::string orders = "0..8";
    int samples = 500;
};

inline const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"identity",  "adbc",      "fg",        "parametrization",
                                                "in-zero",   "stieltjes", "membership"};
    return names;
}

/// Uniform [0, 1) from a 64-bit engine, independent of the library's distributions.
inline real uniform01(std::mt19937_64& rng) { return static_cast<real>(rng() >> 11) * 0x1p-53L; }

inline constexpr real identity_tol = 1e-10L;
inline constexpr real adbc_tol = 1e-7L;
inline constexpr real fg_tol = 1e-7L;
inline constexpr real side_limit_tol = 1e-6L;
inline constexpr real param_tol = 1e-6L;
inline constexpr real param_form_tol = 1e-12L;
inline constexpr real in_zero_tol = 1e-7L;
inline constexpr real in_zero_rel_tol = 1e-16L;

/// Pick functions with bounded image used when no --pick is given.
inline std::vector<std::string> pick_catalogue() {
    return {"const:0,1", "const:0,2", "const:1,1", "const:-2,0.5", "gdelta:1", "gdelta:0.5", "shift:0.5:const:0,2"};
}

inline std::vector<cplx> parametrization_points() { return {{0, 1}, {1, 1}, {-2, 0.5L}, {3, 2}, {0.5L, 0.2L}}; }

inline std::vector<real> real_abscissae(int count, real lo, real hi) {
    std::vector<real> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

inline std::string point_label(cplx z) { return "z=" + format_number(z.real()) + "," + format_number(z.imag()); }

inline Json residual_rows(const std::vector<cplx>& zs, const std::vector<real>& vals) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < zs.size(); ++i) {
        Json row = Json::array();
        row.push(zs[i].real()).push(zs[i].imag()).push(vals[i]);
        rows.push(row);
    }
    return rows;
}

inline Report verify_report(const Scenario& s, const VerifyArgs& args) {
    const auto& suites = verify_suites();
    if (std::find(suites.begin(), suites.end(), args.suite) == suites.end()) {
        throw usage_error("verify: unknown suite '" + args.suite + "'");
    }
    const EntireM f = make_entire(s);
    Report r;
    r.results.set("suite", args.suite);

    if (args.suite == "identity") {
        if (args.samples < 1) throw usage_error("--samples: must be at least 1");
        std::mt19937_64 rng(s.seed);
        real worst = 0;
        for (int i = 0; i < args.samples; ++i) {
            const real x = -20 + 40 * uniform01(rng);
            const real radius = i % 5 == 0 ? real(0.99) : real(0.99) * std::sqrt(uniform01(rng));
            const cplx w = std::polar(radius, 2 * pi * uniform01(rng));
            const real res = key_identity_residual(f, w, x);
            worst = std::max(worst, res);
            r.checks.push_back(below("x=" + format_number(x) + " w=" + format_number(w.real()) + "," +
                                         format_number(w.imag()),
                                     res, identity_tol));
        }
        r.results.set("samples", args.samples);
        r.results.set("max_residual", worst);
    } else if (args.suite == "adbc" || args.suite == "fg") {
        const GEvaluator ge(f, s.quad);
        const auto zs = parse_grid(args.grid);
        std::vector<real> vals;
        const bool adbc = args.suite == "adbc";
        for (cplx z : zs) {
            vals.push_back(adbc ? adbc_residual(ge, z) : fg_residual(ge, z));
            r.checks.push_back(below(point_label(z), vals.back(), adbc ? adbc_tol : fg_tol));
        }
        r.results.set("grid", args.grid);
        r.results.set("residuals", residual_rows(zs, vals));
        if (!adbc) {
            Json gaps = Json::array();
            for (real x : real_abscissae(20, -5, 5)) {
                const real gap = side_limit_gap(ge, x);
                Json row = Json::array();
                row.push(x).push(gap);
                gaps.push(row);
                r.checks.push_back(below("side-limit x=" + format_number(x), gap, side_limit_tol));
            }
            r.results.set("side_limit_gaps", gaps);
        }
    } else if (args.suite == "parametrization") {
        const GEvaluator ge(f, s.quad);
        std::vector<std::string> picks = s.pick_set ? std::vector<std::string>{s.pick} : pick_catalogue();
        Json rows = Json::array();
        for (const auto& text : picks) {
            const PickFn phi = make_pick(text);
            if (!phi.in_Pb()) {
                if (s.pick_set) throw usage_error("--pick '" + text + "': parametrization needs bounded image");
                continue;
            }
            for (cplx z : parametrization_points()) {
                const auto pr = parametrization_residual(ge, phi, z, s.quad);
                Json row = Json::object();
                row.set("pick", text).set("z", z).set("lhs", pr.lhs).set("rhs", pr.rhs);
                row.set("residual", pr.residual).set("form_gap", pr.form_gap);
                rows.push(row);
                r.checks.push_back(below(text + " " + point_label(z), pr.residual, param_tol));
                r.checks.push_back(at_most(text + " " + point_label(z) + " form gap",
                                           pr.form_gap / std::max<real>(1, std::abs(pr.rhs)), param_form_tol));
            }
        }
        r.results.set("rows", rows);
    } else if (args.suite == "in-zero") {
        const PickFn phi = make_pick(s.pick);
        if (!phi.in_Pb()) throw usage_error("--pick '" + s.pick + "': in-zero needs bounded image");
        const auto orders = parse_orders(args.orders, max_moment_order);
        QuadConfig cfg = s.quad;
        if (!s.rel_tol_set) cfg.rel_tol = in_zero_rel_tol;
        const auto in = In_integrals(make_measure(f, phi), orders.back(), cfg);
        Json rows = Json::array();
        for (int n : orders) {
            const auto& v = in[static_cast<std::size_t>(n)];
            Json row = Json::object();
            row.set("n", n).set("value", v.value).set("error", v.error).set("l1", v.l1);
            rows.push(row);
            r.checks.push_back(below("|I_" + std::to_string(n) + "|", std::abs(v.value), in_zero_tol));
        }
        r.results.set("rel_tol", cfg.rel_tol);
        r.results.set("integrals", rows);
    } else if (args.suite == "stieltjes") {
        const PickFn phi = make_pick(s.pick);
        const MeasureSpec spec = make_measure(f, phi);
        const std::vector<real> eps{0.1L, 0.05L, 0.025L};
        Json rows = Json::array();
        for (real x : {-2.0L, -1.0L, 0.0L, 1.0L, 2.0L}) {
            const auto errs = stieltjes_inversion_check(spec, x, eps, s.quad);
            Json row = Json::object();
            row.set("x", x).set("eps", Json::array_of(eps)).set("errors", Json::array_of(errs));
            rows.push(row);
            for (std::size_t i = 1; i < errs.size(); ++i) {
                r.checks.push_back(below("x=" + format_number(x) + " ratio eps[" + std::to_string(i) + "]",
                                         errs[i] / errs[i - 1], 1));
            }
            r.checks.push_back(below("x=" + format_number(x) + " final/initial", errs.back() / errs.front(), 0.5L));
        }
        r.results.set("rows", rows);
    } else {
        const std::vector<int> powers{0, 1, 2, 3, 4, 5};
        const std::vector<real> radii{1e2L, 1e3L, 1e4L};
        const auto rep = check_membership(f, powers, radii, 64);
        r.results.set("zeros_ok", rep.zeros_ok);
        r.results.set("membership_verdict", to_string(rep.verdict));
        r.results.set("note", rep.note);
        Json samples = Json::array();
        for (const auto& d : rep.decay_samples) {
            Json j = Json::object();
            j.set("n", d.n).set("radius", d.radius).set("max_ratio", d.max_ratio);
            samples.push(j);
        }
        r.results.set("decay_samples", samples);
        r.checks.push_back(at_most("zeros in the closed upper half-plane", rep.zeros_ok ? 0 : 1, 0));
        r.checks.push_back(at_most("membership verdict is pass", rep.verdict == Verdict::pass ? 0 : 1, 0));
    }
    return r;
}

inline CommandOutput cmd_verify(const Scenario& s, const VerifyArgs& args, Format format) {
    Json command = Json::object();
    command.set("name", "verify");
    command.set("suite", args.suite);
    if (args.suite == "adbc" || args.suite == "fg") command.set("grid", args.grid);
    if (args.suite == "in-zero") command.set("n", args.orders);
    if (args.suite == "identity") command.set("samples", args.samples);
    return run_command(s, command, format, [&] { return verify_report(s, args); });
}

}  // namespace nevlab::cli

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nevlab/cli/commands.hpp"

namespace {

using namespace nevlab::cli;

struct Globals {
    std::string config;
    std::string format;
    std::string tol;
    std::string seed;
    std::string out;
    std::string model;
    std::string k;
    std::string pick;
};

void add_globals(CLI::App& app, Globals& g) {
    app.add_option("--config", g.config, "Scenario JSON file");
    app.add_option("--format", g.format, "Report format: json or csv");
    app.add_option("--tol", g.tol, "Relative quadrature tolerance");
    app.add_option("--seed", g.seed, "Seed for sampled invariants");
    app.add_option("--out", g.out, "Write the report to this file");
    app.add_option("--model", g.model, "iv, iv-tilde or zero-product");
    app.add_option("--k", g.k, "Elliptic modulus in (0, 1)");
    app.add_option("--pick", g.pick, "Pick function, e.g. const:0,1 or gdelta:1");
}

Scenario build_scenario(const Globals& g) {
    Scenario s = g.config.empty() ? Scenario{} : load_scenario(g.config);
    if (!g.model.empty()) s.model = g.model;
    if (!g.k.empty()) s.k = parse_real(g.k, "--k");
    if (!g.pick.empty()) {
        s.pick = g.pick;
        s.pick_set = true;
    }
    if (!g.tol.empty()) {
        s.quad.rel_tol = parse_real(g.tol, "--tol");
        s.rel_tol_set = true;
    }
    if (!g.seed.empty()) {
        try {
            std::size_t used = 0;
            s.seed = std::stoull(g.seed, &used);
            if (used != g.seed.size() || g.seed.front() == '-') throw std::invalid_argument("seed");
        } catch (const std::exception&) {
            throw usage_error("--seed: expected an unsigned 64-bit integer, got '" + g.seed + "'");
        }
    }
    return s;
}

Format pick_format(const Globals& g, Format fallback) { return g.format.empty() ? fallback : parse_format(g.format); }

int emit(const CommandOutput& out, const Globals& g) {
    if (!out.diagnostics.empty()) std::cerr << "nevlab: " << out.diagnostics << '\n';
    if (out.text.empty()) return out.exit_code;
    if (g.out.empty()) {
        std::cout << out.text;
    } else {
        std::ofstream file(g.out, std::ios::binary);
        if (!file) {
            std::cerr << "nevlab: cannot write " << g.out << '\n';
            return 2;
        }
        file << out.text;
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment problem measures, transforms and identity checks"};
    app.require_subcommand(1);
    Globals g;
    add_globals(app, g);

    MomentsArgs margs;
    std::string n_text = "10";
    auto* moments = app.add_subcommand("moments", "Moments of mu(.; phi)");
    moments->add_option("--n", n_text, "Highest moment order");
    moments->add_flag("--compare", margs.compare, "Compare against phi = i");

    VerifyArgs vargs;
    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    verify->add_option("suite", vargs.suite, "identity, adbc, fg, parametrization, in-zero, stieltjes or membership")
        ->required();
    verify->add_option("--grid", vargs.grid, "re_lo:re_hi:n x im_lo:im_hi:m");
    verify->add_option("--n", vargs.orders, "Orders a..b");
    verify->add_option("--samples", vargs.samples, "Sample count for the identity suite");

    DensityArgs dargs;
    std::string points_text = "801";
    auto* density = app.add_subcommand("density", "Sample the density in both forms");
    density->add_option("--range", dargs.range, "lo:hi");
    density->add_option("--points", points_text, "Number of points");

    auto* case_study_cmd = app.add_subcommand("case-study", "Tilde construction case study");

    for (auto* sub : {moments, verify, density, case_study_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const Scenario s = build_scenario(g);
        if (moments->parsed()) {
            margs.n = parse_int(n_text, "--n");
            return emit(cmd_moments(s, margs, pick_format(g, Format::json)), g);
        }
        if (verify->parsed()) return emit(cmd_verify(s, vargs, pick_format(g, Format::json)), g);
        if (density->parsed()) {
            dargs.points = parse_int(points_text, "--points");
            return emit(cmd_density(s, dargs, pick_format(g, Format::csv)), g);
        }
        return emit(cmd_case_study(s, pick_format(g, Format::json)), g);
    } catch (const usage_error& e) {
        std::cerr << "nevlab: " << e.what() << '\n';
        return 2;
    }
}

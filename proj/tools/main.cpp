// tsparse: sparse-signal lfdr analysis of t-scores under Student-t and Gaussian nulls.

#include "tsparse/errors.hpp"
#include "tsparse/oracle.hpp"
#include "tsparse/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace tsparse;
using nlohmann::json;

enum Exit { ok = 0, failed_checks = 1, bad_input = 2, no_convergence = 3, out_of_regime = 4 };

struct Common {
    std::string input = "-";
    std::optional<double> df;
    bool drop_degenerate = false;
    std::string first_group;
    std::optional<double> tol;
    bool json = false;
    bool csv = false;
};

struct ModelChoice {
    std::string null = "t";
    std::string d = "estimate";
};

void add_input(CLI::App* cmd, Common& c) {
    cmd->add_option("input", c.input, "CSV input: replicate matrix or site_id,t score file ('-' for stdin)");
    cmd->add_option("--df", c.df, "Degrees of freedom (required for score files)")->check(CLI::PositiveNumber);
    cmd->add_flag("--drop-degenerate", c.drop_degenerate, "Exclude zero-variance sites instead of failing");
    cmd->add_option("--first-group", c.first_group, "Group label whose mean comes first in two-sample differences");
    cmd->add_option("--tol", c.tol, "Relative truncation tolerance for the zeta series")->check(CLI::PositiveNumber);
}

void add_output(CLI::App* cmd, Common& c) {
    cmd->add_flag("--json", c.json, "Machine-readable JSON output");
    cmd->add_flag("--csv", c.csv, "CSV output");
}

void add_model(CLI::App* cmd, ModelChoice& m) {
    cmd->add_option("--null", m.null, "Null distribution: t or z")->check(CLI::IsMember({"t", "z"}));
    cmd->add_option("--d", m.d, "Power index: 'estimate' or a value in (0, 2)");
}

SeriesOptions series_options(const Common& c) {
    SeriesOptions s;
    if (c.tol) s.rel_tol = *c.tol;
    return s;
}

IngestResult load(const Common& c) {
    IngestOptions opts;
    opts.drop_degenerate = c.drop_degenerate;
    if (!c.first_group.empty()) opts.first_group = c.first_group;

    IngestResult result = [&] {
        if (c.input == "-") return read_panel(std::cin, c.df, opts);
        std::ifstream in(c.input);
        if (!in) throw input_error("cannot open " + c.input);
        return read_panel(in, c.df, opts);
    }();
    if (!result.dropped_sites.empty()) {
        std::cerr << "warning: dropped " << result.dropped_sites.size() << " degenerate site(s)\n";
    }
    return result;
}

std::optional<PowerIndex> parse_d(const std::string& text) {
    if (text == "estimate") return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw input_error("--d expects 'estimate' or a number, got '" + text + "'");
    }
    if (!(value > 0.0 && value < 2.0)) throw input_error("--d must lie in (0, 2)");
    return PowerIndex(value);
}

NullKind parse_null(const std::string& text) { return text == "z" ? NullKind::z : NullKind::t; }

FitOptions fit_options(const Common& c) {
    FitOptions f;
    f.series = series_options(c);
    return f;
}

int check_fit(const FitResult& fit, bool diagnostics) {
    if (!fit.converged) {
        std::cerr << "error: " << to_string(fit.null_kind) << "-null fit did not converge\n";
        return no_convergence;
    }
    if (diagnostics && (fit.rho_hat <= 0.0 || fit.rho_hat >= 1.0)) {
        std::cerr << "diagnostic: " << to_string(fit.null_kind) << "-null rho-hat at the boundary ("
                  << fit.rho_hat << ")\n";
        return out_of_regime;
    }
    return ok;
}

void print_fit(const FitResult& fit) {
    std::printf("null        %s\n", to_string(fit.null_kind));
    std::printf("sites       %zu\n", fit.n_sites);
    std::printf("df          %g\n", fit.df);
    std::printf("rho_hat     %.6g\n", fit.rho_hat);
    std::printf("d_hat       %.6g%s\n", fit.d_hat, fit.d_estimated ? "" : " (fixed)");
    std::printf("loglik      %.4f (relative to rho = 0)\n", fit.loglik_rel_null);
    std::printf("iterations  %d\n", fit.iterations);
}

int run_transform(const Common& c) {
    IngestResult data = load(c);
    ScorePanel& panel = data.panel;
    const auto z = panel.z_scores();
    if (c.json) {
        json sites = json::array();
        for (std::size_t i = 0; i < panel.size(); ++i) {
            sites.push_back({{"site_id", panel.site_ids[i]}, {"t", panel.t[i]}, {"z", z[i]}});
        }
        std::cout << json{{"df", panel.df.value()}, {"sites", sites}}.dump(2) << '\n';
        return ok;
    }
    std::cout << "site_id,t,z\n";
    for (std::size_t i = 0; i < panel.size(); ++i) {
        std::cout << panel.site_ids[i] << ',' << format_double(panel.t[i]) << ',' << format_double(z[i]) << '\n';
    }
    return ok;
}

int run_fit(const Common& c, const ModelChoice& m, bool diagnostics) {
    IngestResult data = load(c);
    const FitResult fit = fit_ml(data.panel, parse_null(m.null), parse_d(m.d), fit_options(c));
    if (c.json) {
        std::cout << fit_to_json(fit) << '\n';
    } else {
        print_fit(fit);
    }
    return check_fit(fit, diagnostics);
}

int run_lfdr(const Common& c, const ModelChoice& m, std::optional<double> rho, bool diagnostics) {
    IngestResult data = load(c);
    ScorePanel& panel = data.panel;
    const NullKind kind = parse_null(m.null);
    const auto fixed_d = parse_d(m.d);
    const SeriesOptions series = series_options(c);

    double rho_used = 0.0;
    double d_used = 1.0;
    int status = ok;
    if (rho) {
        if (!fixed_d) throw input_error("--rho requires a numeric --d");
        if (!(*rho >= 0.0 && *rho <= 1.0)) throw input_error("--rho must lie in [0, 1]");
        rho_used = *rho;
        d_used = fixed_d->value();
    } else {
        const FitResult fit = fit_ml(panel, kind, fixed_d, fit_options(c));
        status = check_fit(fit, diagnostics);
        if (status == no_convergence) return status;
        rho_used = fit.rho_hat;
        d_used = fit.d_hat;
    }

    const std::span<const double> scores = kind == NullKind::t ? std::span<const double>(panel.t) : panel.z_scores();
    const auto log_zeta = log_zeta_values(scores, kind, panel.df, PowerIndex(d_used), series);
    if (c.json) {
        json sites = json::array();
        for (std::size_t i = 0; i < panel.size(); ++i) {
            sites.push_back({{"site_id", panel.site_ids[i]},
                             {"score", scores[i]},
                             {"lfdr", lfdr_from_log_zeta(rho_used, log_zeta[i])}});
        }
        std::cout << json{{"null", to_string(kind)}, {"rho", rho_used}, {"d", d_used}, {"sites", sites}}.dump(2)
                  << '\n';
        return status;
    }
    if (c.csv) {
        std::cout << "site_id,score,lfdr\n";
        for (std::size_t i = 0; i < panel.size(); ++i) {
            std::cout << panel.site_ids[i] << ',' << format_double(scores[i]) << ','
                      << format_double(lfdr_from_log_zeta(rho_used, log_zeta[i])) << '\n';
        }
        return status;
    }
    std::printf("# %s-null lfdr at rho = %.6g, d = %.6g\n", to_string(kind), rho_used, d_used);
    std::printf("%-16s %12s %14s\n", "site", m.null == "t" ? "t" : "z", "lfdr");
    for (std::size_t i = 0; i < panel.size(); ++i) {
        std::printf("%-16s %12.4f %14.6g\n", panel.site_ids[i].c_str(), scores[i],
                    lfdr_from_log_zeta(rho_used, log_zeta[i]));
    }
    return status;
}

int run_bh(const Common& c, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("--alpha must lie in (0, 1)");
    IngestResult data = load(c);
    const ScorePanel& panel = data.panel;
    const auto p = two_sided_pvalues(panel);
    const auto rejected = bh_reject(p, alpha);
    if (c.json) {
        json sites = json::array();
        for (std::size_t i : rejected) {
            sites.push_back({{"site_id", panel.site_ids[i]}, {"t", panel.t[i]}, {"p_value", p[i]}});
        }
        std::cout << json{{"alpha", alpha}, {"n_sites", panel.size()}, {"n_rejected", rejected.size()},
                          {"rejected", sites}}
                         .dump(2)
                  << '\n';
        return ok;
    }
    if (c.csv) {
        std::cout << "site_id,t,p_value\n";
        for (std::size_t i : rejected) {
            std::cout << panel.site_ids[i] << ',' << format_double(panel.t[i]) << ',' << format_double(p[i]) << '\n';
        }
        return ok;
    }
    std::printf("BH(%g): %zu of %zu sites rejected\n", alpha, rejected.size(), panel.size());
    for (std::size_t i : rejected) {
        std::printf("%-16s %12.4f %14.6g\n", panel.site_ids[i].c_str(), panel.t[i], p[i]);
    }
    return ok;
}

int run_report(const Common& c, const ModelChoice& m, double alpha, std::size_t top, bool diagnostics) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("--alpha must lie in (0, 1)");
    IngestResult data = load(c);
    ScorePanel& panel = data.panel;
    const auto fixed_d = parse_d(m.d);
    const FitOptions opts = fit_options(c);
    const FitResult fit_t = fit_ml(panel, NullKind::t, fixed_d, opts);
    const FitResult fit_z = fit_ml(panel, NullKind::z, fixed_d, opts);
    for (const FitResult* fit : {&fit_t, &fit_z}) {
        if (const int status = check_fit(*fit, diagnostics); status == no_convergence) return status;
    }
    const LfdrReport report = build_report(panel, fit_t, fit_z, alpha, opts.series);
    if (c.json) {
        std::cout << report_to_json(report) << '\n';
    } else if (c.csv) {
        write_report_csv(std::cout, report);
    } else {
        write_report_table(std::cout, report, top);
    }
    return std::max(check_fit(fit_t, diagnostics), check_fit(fit_z, diagnostics));
}

int run_verify(std::uint64_t seed, bool as_json, std::size_t mc_samples, bool skip_mc) {
    oracle::VerifyOptions opts;
    opts.seed = seed;
    opts.mc_samples = mc_samples;
    opts.include_monte_carlo = !skip_mc;
    const auto results = oracle::run_verify(opts);
    std::size_t failures = 0;
    for (const auto& r : results) failures += r.passed ? 0 : 1;

    if (as_json) {
        json checks = json::array();
        for (const auto& r : results) {
            checks.push_back({{"name", r.name},
                              {"passed", r.passed},
                              {"measured", r.measured},
                              {"tolerance", r.tolerance},
                              {"detail", r.detail}});
        }
        std::cout << json{{"seed", seed}, {"checks", checks}, {"failures", failures}}.dump(2) << '\n';
    } else {
        for (const auto& r : results) {
            std::printf("%-4s  %-52s %11.3e  tol %9.2e", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured,
                        r.tolerance);
            if (!r.detail.empty()) std::printf("  %s", r.detail.c_str());
            std::printf("\n");
        }
        std::printf("%zu checks, %zu failed\n", results.size(), failures);
    }
    return failures == 0 ? ok : failed_checks;
}

int run_table1(bool as_json) {
    const double ts[] = {3.0, 4.0, 5.0, 7.0, 10.0, 15.0};
    const double ds[] = {0.5, 1.0, 1.5};
    const double zs[] = {3.0, 4.0, 5.0, 6.0};
    const DegreesOfFreedom k10(10.0);
    const DegreesOfFreedom k100(100.0);
    const PowerIndex unit(1.0);

    if (as_json) {
        json rows = json::array();
        for (double t : ts) {
            json ratios = json::object();
            for (double d : ds) ratios[format_double(d)] = pit_zeta_ratio(t, k10, PowerIndex(d));
            rows.push_back({{"t", t}, {"z", pit_transform(t, k10)}, {"ratios", ratios}});
        }
        json wide = json::array();
        for (double z : zs) {
            wide.push_back({{"z", z},
                            {"same_argument", same_argument_zeta_ratio(z, k100, unit)},
                            {"transformed_argument", transformed_argument_zeta_ratio(z, k100, unit)}});
        }
        std::cout << json{{"k", 10}, {"rows", rows}, {"k100_d1", wide}}.dump(2) << '\n';
        return ok;
    }
    std::printf("zeta_inf(z) / zeta_10(t), z = g(t), k = 10\n");
    std::printf("%6s %7s %8s %8s %8s\n", "t", "z", "d=0.5", "d=1.0", "d=1.5");
    for (double t : ts) {
        std::printf("%6.1f %7.3f", t, pit_transform(t, k10));
        for (double d : ds) std::printf(" %8.3f", pit_zeta_ratio(t, k10, PowerIndex(d)));
        std::printf("\n");
    }
    std::printf("\nd = 1, k = 100\n");
    std::printf("%6s %22s %32s\n", "z", "zeta_inf(z)/zeta_100(z)", "zeta_inf(z)/zeta_100(g^-1(z))");
    for (double z : zs) {
        std::printf("%6.1f %22.3f %32.3f\n", z, same_argument_zeta_ratio(z, k100, unit),
                    transformed_argument_zeta_ratio(z, k100, unit));
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-signal local false discovery rates for t-scores"};
    app.require_subcommand(1);

    Common common;
    ModelChoice model;
    bool diagnostics = false;
    std::optional<double> rho;
    double alpha = 0.1;
    std::size_t top = 6;
    std::uint64_t seed = oracle::VerifyOptions{}.seed;
    std::size_t mc_samples = oracle::VerifyOptions{}.mc_samples;
    bool skip_mc = false;

    auto* transform = app.add_subcommand("transform", "Probability integral transform of t-scores to z-scores");
    add_input(transform, common);
    transform->add_flag("--json", common.json, "Machine-readable JSON output");
    transform->add_flag("--csv", common.csv, "CSV output (the default)");

    auto* fit = app.add_subcommand("fit", "Maximum likelihood fit of (rho, d)");
    add_input(fit, common);
    add_model(fit, model);
    fit->add_flag("--json", common.json, "Machine-readable JSON output");
    fit->add_flag("--diagnostics", diagnostics, "Exit with status 4 when rho-hat is on the boundary");

    auto* lfdr = app.add_subcommand("lfdr", "Per-site local false discovery rates");
    add_input(lfdr, common);
    add_model(lfdr, model);
    add_output(lfdr, common);
    lfdr->add_option("--rho", rho, "Use this sparsity rate instead of fitting (needs a numeric --d)");
    lfdr->add_flag("--diagnostics", diagnostics, "Exit with status 4 when rho-hat is on the boundary");

    auto* bh = app.add_subcommand("bh", "Benjamini-Hochberg step-up rejections from two-sided t p-values");
    add_input(bh, common);
    add_output(bh, common);
    bh->add_option("--alpha", alpha, "FDR level")->capture_default_str();

    auto* report = app.add_subcommand("report", "Fits under both nulls, per-site lfdr table and BH summary");
    add_input(report, common);
    report->add_option("--d", model.d, "Power index: 'estimate' or a value in (0, 2)");
    add_output(report, common);
    report->add_option("--alpha", alpha, "FDR level for the BH set")->capture_default_str();
    report->add_option("--top", top, "Rows in the table (largest |t| first)")->capture_default_str();
    report->add_flag("--diagnostics", diagnostics, "Exit with status 4 when a rho-hat is on the boundary");

    auto* verify = app.add_subcommand("verify", "Cross-check the analytic formulas against quadrature and simulation");
    verify->add_option("--seed", seed, "Seed for the Monte Carlo checks")->capture_default_str();
    verify->add_option("--mc-samples", mc_samples, "Draws per Monte Carlo check")->capture_default_str();
    verify->add_flag("--no-monte-carlo", skip_mc, "Skip the Monte Carlo checks");
    verify->add_flag("--json", common.json, "Machine-readable JSON output");

    auto* table1 = app.add_subcommand("table1", "Zeta ratios for k = 10 and k = 100");
    table1->add_flag("--json", common.json, "Machine-readable JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    try {
        if (*transform) return run_transform(common);
        if (*fit) return run_fit(common, model, diagnostics);
        if (*lfdr) return run_lfdr(common, model, rho, diagnostics);
        if (*bh) return run_bh(common, alpha);
        if (*report) return run_report(common, model, alpha, top, diagnostics);
        if (*verify) return run_verify(seed, common.json, mc_samples, skip_mc);
        if (*table1) return run_table1(common.json);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return bad_input;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return bad_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return bad_input;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return no_convergence;
    } catch (const regime_error& e) {
        std::cerr << "out of regime: " << e.what() << '\n';
        return out_of_regime;
    }
    return ok;
}

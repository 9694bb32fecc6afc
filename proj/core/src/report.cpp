#include "tsparse/pipeline.hpp"

#include "tsparse/twogroups.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace tsparse {

namespace {

using nlohmann::json;

LfdrSummary summarize(const std::vector<double>& values) {
    LfdrSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

void check_fit(const FitResult& fit, NullKind expected, const ScorePanel& panel) {
    if (fit.null_kind != expected) {
        throw std::invalid_argument(std::string("expected a ") + to_string(expected) + "-null fit");
    }
    if (fit.n_sites != panel.size()) throw std::invalid_argument("fit was computed on a different number of sites");
    if (fit.df != panel.df.value()) throw std::invalid_argument("fit degrees of freedom differ from the panel");
}

json fit_json(const FitResult& fit) {
    return json{{"null", to_string(fit.null_kind)},
                {"rho_hat", fit.rho_hat},
                {"d_hat", fit.d_hat},
                {"d_estimated", fit.d_estimated},
                {"loglik_rel_null", fit.loglik_rel_null},
                {"iterations", fit.iterations},
                {"converged", fit.converged},
                {"n_sites", fit.n_sites},
                {"df", fit.df}};
}

json summary_json(const LfdrSummary& s) {
    return json{{"count", s.count}, {"min", s.min}, {"max", s.max}, {"mean", s.mean}};
}

} // namespace

LfdrReport build_report(ScorePanel& panel, const FitResult& fit_t, const FitResult& fit_z, double alpha,
                        const SeriesOptions& opts) {
    check_fit(fit_t, NullKind::t, panel);
    check_fit(fit_z, NullKind::z, panel);

    LfdrReport rep;
    rep.fit_t = fit_t;
    rep.fit_z = fit_z;
    rep.alpha = alpha;
    rep.df = panel.df.value();

    const auto z = panel.z_scores();
    const auto pvalues = two_sided_pvalues(panel);
    const auto rejected = bh_reject(pvalues, alpha);
    const ModelParams params_t(fit_t.rho_hat, PowerIndex(fit_t.d_hat), panel.df);
    const PowerIndex d_z(fit_z.d_hat);

    rep.sites.resize(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        SiteRecord& s = rep.sites[i];
        s.site_id = panel.site_ids[i];
        s.t = panel.t[i];
        s.z = z[i];
        s.lfdr_t = lfdr_t(s.t, params_t, opts);
        s.lfdr_z = lfdr_z(s.z, fit_z.rho_hat, d_z, opts);
        s.ratio = s.lfdr_z / s.lfdr_t;
        s.p_value = pvalues[i];
    }
    std::vector<double> in_set_t, in_set_z;
    for (std::size_t i : rejected) {
        rep.sites[i].bh_rejected = true;
        in_set_t.push_back(rep.sites[i].lfdr_t);
        in_set_z.push_back(rep.sites[i].lfdr_z);
    }
    rep.n_rejected = rejected.size();
    rep.bh_lfdr_t = summarize(in_set_t);
    rep.bh_lfdr_z = summarize(in_set_z);
    return rep;
}

std::vector<std::size_t> top_sites(const LfdrReport& report, std::size_t count) {
    std::vector<std::size_t> order(report.sites.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(report.sites[a].t) > std::abs(report.sites[b].t);
    });
    if (order.size() > count) order.resize(count);
    return order;
}

void write_report_table(std::ostream& out, const LfdrReport& report, std::size_t top) {
    char buf[256];
    auto fit_line = [&](const char* label, const FitResult& f) {
        std::snprintf(buf, sizeof buf, "%-8s rho = %.4f  d = %.2f%s  loglik (rel. null) = %.2f%s\n", label, f.rho_hat,
                      f.d_hat, f.d_estimated ? "" : " (fixed)", f.loglik_rel_null, f.converged ? "" : "  [not converged]");
        out << buf;
    };
    out << "sites: " << report.sites.size() << "  df: " << format_double(report.df) << '\n';
    fit_line("z-null", report.fit_z);
    fit_line("t-null", report.fit_t);
    out << '\n';
    std::snprintf(buf, sizeof buf, "%-12s %9s %10s %14s %14s %9s\n", "site", "Z", "T", "lfdr_z x1e4", "lfdr_t x1e4",
                  "z/t");
    out << buf;
    for (std::size_t i : top_sites(report, top)) {
        const SiteRecord& s = report.sites[i];
        std::snprintf(buf, sizeof buf, "%-12s %9.2f %10.2f %14.2f %14.2f %9.2f\n", s.site_id.c_str(), s.z, s.t,
                      s.lfdr_z * 1e4, s.lfdr_t * 1e4, s.ratio);
        out << buf;
    }
    out << '\n';
    std::snprintf(buf, sizeof buf, "BH(%.3g): %zu rejections\n", report.alpha, report.n_rejected);
    out << buf;
    if (report.n_rejected > 0) {
        std::snprintf(buf, sizeof buf, "  lfdr_t in BH set: min %.2f  max %.2f  mean %.3f\n", report.bh_lfdr_t.min,
                      report.bh_lfdr_t.max, report.bh_lfdr_t.mean);
        out << buf;
        std::snprintf(buf, sizeof buf, "  lfdr_z in BH set: min %.2f  max %.2f  mean %.3f\n", report.bh_lfdr_z.min,
                      report.bh_lfdr_z.max, report.bh_lfdr_z.mean);
        out << buf;
    }
}

void write_report_csv(std::ostream& out, const LfdrReport& report) {
    out << "site_id,t,z,lfdr_t,lfdr_z,ratio,p_value,bh_rejected\n";
    for (const auto& s : report.sites) {
        out << s.site_id << ',' << format_double(s.t) << ',' << format_double(s.z) << ',' << format_double(s.lfdr_t)
            << ',' << format_double(s.lfdr_z) << ',' << format_double(s.ratio) << ',' << format_double(s.p_value)
            << ',' << (s.bh_rejected ? 1 : 0) << '\n';
    }
}

std::string fit_to_json(const FitResult& fit, int indent) { return fit_json(fit).dump(indent); }

std::string report_to_json(const LfdrReport& report, int indent) {
    json sites = json::array();
    for (const auto& s : report.sites) {
        sites.push_back(json{{"site_id", s.site_id},
                             {"t", s.t},
                             {"z", s.z},
                             {"lfdr_t", s.lfdr_t},
                             {"lfdr_z", s.lfdr_z},
                             {"ratio", s.ratio},
                             {"p_value", s.p_value},
                             {"bh_rejected", s.bh_rejected}});
    }
    json j{{"df", report.df},
           {"alpha", report.alpha},
           {"fit_t", fit_json(report.fit_t)},
           {"fit_z", fit_json(report.fit_z)},
           {"n_sites", report.sites.size()},
           {"n_rejected", report.n_rejected},
           {"bh_lfdr_t", summary_json(report.bh_lfdr_t)},
           {"bh_lfdr_z", summary_json(report.bh_lfdr_z)},
           {"sites", std::move(sites)}};
    return j.dump(indent);
}

} // namespace tsparse

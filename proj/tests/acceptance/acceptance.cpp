// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Criteria 7-9 need the HIV expression matrix (7680 sites, 4 cases vs 4
// controls). Point TSPARSE_HIV_DATA at a CSV whose header row holds the group
// labels; TSPARSE_HIV_FIRST_GROUP optionally names the group subtracted from.

#include "tsparse/fit.hpp"
#include "tsparse/oracle.hpp"
#include "tsparse/pipeline.hpp"
#include "tsparse/specfun.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace tsparse;
using namespace tsparse::oracle;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::pass;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        if (!ok) status = Status::fail;
    }
};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.status = Status::fail;
        o.notes.push_back(std::string("FAIL exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Status::skip && budget_s > 0.0) o.check(secs < budget_s, fmt("runtime %.2f s < %.0f s", secs, budget_s));
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("%s [%d] %s (%.2f s)\n", tag, id, title, secs);
    for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    failures += o.status == Status::fail;
}

// ---- criteria without external data --------------------------------------

Outcome coefficient_identity() {
    Outcome o;
    for (double dv : {0.5, 1.0, 1.5}) {
        const PowerIndex d(dv);
        const auto table = mixture_coefficients(d, 20);
        double worst = 0.0;
        for (std::size_t r = 1; r <= 20; ++r) worst = std::max(worst, rel_err(coefficient_quadrature(d, r).value, table[r]));
        o.check(worst <= 1e-8, fmt("d=%.1f r=1..20: max rel err %.2e <= 1e-8", dv, worst));
    }
    return o;
}

Outcome catalan_case() {
    Outcome o;
    const auto table = mixture_coefficients(PowerIndex(1.0), 15);
    unsigned long long catalan = 1; // C_{r-1}
    double worst = 0.0;
    for (std::size_t r = 1; r <= 15; ++r) {
        worst = std::max(worst, std::abs(table[r] - std::ldexp(double(catalan), -int(2 * r - 1))));
        catalan = catalan * 2 * (2 * r - 1) / (r + 1);
    }
    o.check(worst <= 1e-14, fmt("max |zeta_{1,r} - C_{r-1}/2^{2r-1}| = %.2e <= 1e-14", worst));
    return o;
}

Outcome density_normalization() {
    Outcome o;
    for (double kv : {1.0, 2.0, 6.0, 9.0, 100.0}) {
        double worst = 0.0;
        for (std::size_t r = 0; r <= 10; ++r) worst = std::max(worst, std::abs(component_density_mass(DegreesOfFreedom(kv), r).value - 1.0));
        o.check(worst <= 1e-8, fmt("k=%g r<=10: max |int f_r - 1| = %.2e <= 1e-8", kv, worst));
    }
    // quadrature on |t| <= 50; beyond that the incomplete-beta form of the non-null law
    const ModelParams p(0.1, PowerIndex(1.0), DegreesOfFreedom(6.0));
    const double cut = 50.0;
    const double inner = 2.0 * quad::integrate([&](double t) { return t_mixture_pdf(t, p); }, 0.0, cut, {1e-13, 1e-12, 20000}).value;
    const MixtureCdf mix(p.d, p.k, 3.0, 2);
    const double outer = p.rho * (1.0 - mix.abs_cdf(cut)) + (1.0 - p.rho) * 2.0 * specfun::student_t_sf(cut, 6.0);
    const double err = std::abs(inner + outer - 1.0);
    o.check(err <= 1e-8, fmt("(rho,d,k)=(0.1,1,6): |int t_mixture_pdf - 1| = %.2e <= 1e-8", err));
    return o;
}

std::uint64_t retry_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL; }

Outcome component_law() {
    Outcome o;
    constexpr std::size_t n = 1'000'000;
    constexpr double threshold = 0.002;
    const auto judge = [&](const std::string& label, std::uint64_t seed, const std::function<double(std::uint64_t)>& ks_of) {
        double ks = ks_of(seed);
        std::string note = fmt("%s: KS %.5f", label.c_str(), ks);
        if (!(ks < threshold)) {
            ks = ks_of(retry_seed(seed));
            note += fmt(", retry KS %.5f", ks);
        }
        o.check(ks < threshold, note + " < 0.002");
    };
    const std::array<std::pair<std::size_t, double>, 3> cases{{{1, 6.0}, {2, 9.0}, {3, 100.0}}};
    std::uint64_t seed = 7001;
    for (const auto& [r, kv] : cases) {
        judge(fmt("f_%zu k=%g n=1e6", r, kv), seed++, [&](std::uint64_t s) { return component_mc(r, DegreesOfFreedom(kv), n, s).ks; });
    }
    judge("simulate_panel rho=1 d=1 k=6 n=1e6", seed, [&](std::uint64_t s) {
        return panel_mc_ks(PowerIndex(1.0), DegreesOfFreedom(6.0), n, s);
    });
    return o;
}

Outcome ratio_table() {
    Outcome o;
    constexpr std::array<double, 6> ts{3.0, 4.0, 5.0, 7.0, 10.0, 15.0};
    constexpr std::array<double, 6> zs{2.47, 3.02, 3.46, 4.12, 4.80, 5.51};
    constexpr std::array<double, 3> ds{0.5, 1.0, 1.5};
    constexpr std::array<std::array<double, 6>, 3> printed{{
        {0.84, 0.79, 0.73, 0.65, 0.57, 0.52},
        {0.94, 0.93, 0.90, 0.85, 0.82, 0.85},
        {1.05, 1.10, 1.12, 1.12, 1.18, 1.37},
    }};
    const DegreesOfFreedom k(10.0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double z = pit_transform(ts[i], k);
        o.check(std::abs(z - zs[i]) <= 0.01, fmt("t=%g: z %.4f vs %.2f", ts[i], z, zs[i]));
    }
    for (std::size_t j = 0; j < ds.size(); ++j) {
        std::string row = fmt("d=%.1f:", ds[j]);
        bool ok = true;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double v = pit_zeta_ratio(ts[i], k, PowerIndex(ds[j]));
            ok = ok && std::abs(v - printed[j][i]) <= 0.01;
            row += fmt(" %.4f/%.2f", v, printed[j][i]);
        }
        o.check(ok, row + " (within 0.01)");
    }
    return o;
}

Outcome k100_ratios() {
    Outcome o;
    constexpr std::array<double, 4> zs{3.0, 4.0, 5.0, 6.0};
    constexpr std::array<double, 4> printed{1.14, 1.62, 3.37, 11.68};
    const DegreesOfFreedom k(100.0);
    const PowerIndex d(1.0);
    double same = 0.0;
    double transformed = 0.0;
    std::string a = "same argument zeta_inf(z)/zeta_100(z):";
    std::string b = "transformed argument zeta_inf(z)/zeta_100(g^-1(z)):";
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double s = same_argument_zeta_ratio(zs[i], k, d);
        const double t = transformed_argument_zeta_ratio(zs[i], k, d);
        same = std::max(same, std::abs(s - printed[i]));
        transformed = std::max(transformed, std::abs(t - printed[i]));
        a += fmt(" %.4f", s);
        b += fmt(" %.4f", t);
    }
    o.notes.push_back(a + fmt(" (max err %.4f)", same));
    o.notes.push_back(b + fmt(" (max err %.4f)", transformed));
    const char* who = same <= 0.02 && transformed <= 0.02 ? "both" : same <= 0.02 ? "same argument" : transformed <= 0.02 ? "transformed argument" : "neither";
    o.check(same <= 0.02 || transformed <= 0.02, std::string("1.14, 1.62, 3.37, 11.68 within 0.02 reproduced by: ") + who);
    return o;
}

Outcome property_suite() {
    Outcome o;
    const DegreesOfFreedom k6(6.0);

    {
        const ModelParams p(0.05, PowerIndex(1.0), k6);
        double worst = 0.0;
        for (int i = 1; i <= 80; ++i) {
            const double t = 0.25 * i;
            const double z = pit_transform(t, k6);
            const double jac = specfun::student_t_pdf(t, 6.0) / specfun::norm_pdf(z);
            worst = std::max(worst, rel_err(pit_mixture_pdf(z, p) * jac, t_mixture_pdf(t, p)));
        }
        o.check(worst <= 1e-9, fmt("PIT change of variables: max rel err %.2e <= 1e-9", worst));
    }

    auto sim = simulate_panel(ModelParams(0.05, PowerIndex(1.0), k6), 20000, 17);
    ScorePanel panel(std::move(sim.scores), k6);
    {
        double worst = -INFINITY;
        for (double dv : {0.3, 1.0, 1.7}) {
            for (auto kind : {NullKind::t, NullKind::z}) {
                const auto lz = log_zeta_values(kind == NullKind::t ? std::span<const double>(panel.t) : panel.z_scores(), kind, k6, PowerIndex(dv));
                for (double rho = 0.01; rho <= 0.99; rho += 0.02) {
                    const double h = 0.01;
                    worst = std::max(worst, loglik_from_log_zeta(lz, rho - h) - 2.0 * loglik_from_log_zeta(lz, rho) + loglik_from_log_zeta(lz, rho + h));
                }
            }
        }
        o.check(worst <= 1e-9, fmt("rho-profile concavity: max second difference %.3e <= 1e-9", worst));
    }
    {
        const auto pt = two_sided_pvalues(panel);
        bool down_set = true;
        for (double alpha : {0.01, 0.05, 0.1, 0.25}) {
            const auto rej = bh_reject(pt, alpha);
            double worst_in = -1.0;
            for (auto i : rej) worst_in = std::max(worst_in, pt[i]);
            std::size_t below = 0;
            for (double p : pt) below += p <= worst_in;
            down_set = down_set && below == rej.size();
        }
        o.check(down_set, "BH rejection sets are p-value down-sets");
        std::vector<double> pz;
        for (double z : panel.z_scores()) pz.push_back(2.0 * specfun::norm_sf(std::abs(z)));
        double worst = 0.0;
        for (std::size_t i = 0; i < pt.size(); ++i) worst = std::max(worst, std::abs(pt[i] - pz[i]));
        o.check(worst <= 1e-12 && bh_reject(pt, 0.1) == bh_reject(pz, 0.1),
                fmt("t/z p-values agree (max diff %.2e) and give the same BH set", worst));
    }
    {
        double worst = 0.0;
        for (double dv : {0.5, 1.0, 1.5}) {
            for (int i = 1; i <= 12; ++i) {
                const double y = 0.5 * i;
                worst = std::max(worst, std::abs(zeta_k(y, DegreesOfFreedom(1e6), PowerIndex(dv)) / zeta_inf(y, PowerIndex(dv)) - 1.0));
            }
        }
        o.check(worst < 1e-3, fmt("zeta_k -> zeta_inf at k=1e6, y in [0.5,6]: max rel diff %.2e < 1e-3", worst));
    }
    {
        // coefficient moments with the r^{-1-a} tail beyond R added analytically
        constexpr std::size_t R = 1'000'000;
        double worst_h = 0.0;
        double worst_f = 0.0;
        for (double dv : {0.5, 1.0, 1.5}) {
            const double a = 0.5 * dv;
            const auto table = mixture_coefficients(PowerIndex(dv), R);
            const double tail = a / std::tgamma(1.0 - a);
            double harmonic = 0.0;
            for (std::size_t r = R; r >= 1; --r) harmonic += table[r] / double(r);
            harmonic += tail * std::pow(double(R), -1.0 - a) / (1.0 + a);
            worst_h = std::max(worst_h, std::abs(harmonic - (specfun::digamma(a + 1.0) - specfun::digamma(1.0))));
            for (int s = 1; s <= 3; ++s) {
                double m = 0.0;
                for (std::size_t r = R; r >= 1; --r) {
                    double f = 1.0;
                    for (int j = 1; j <= s; ++j) f *= double(j) / (double(r) + j);
                    m += table[r] * f;
                }
                m += tail * std::tgamma(s + 1.0) * std::pow(double(R), -a - s) / (a + s);
                worst_f = std::max(worst_f, std::abs(m - a / (a + s)));
            }
        }
        o.check(worst_h <= 1e-6, fmt("harmonic-number mean: max err %.2e <= 1e-6", worst_h));
        o.check(worst_f <= 1e-8, fmt("inverse factorial moments s<=3: max err %.2e <= 1e-8", worst_f));
        double worst_c = 0.0;
        for (double dv : {0.5, 0.8}) {
            const auto h1 = mixture_coefficients(PowerIndex(dv), 2000);
            const auto h2 = mixture_coefficients(PowerIndex(2.0 * dv), 2000);
            for (double t : {0.1, 0.5, 0.9}) {
                double p1 = 0.0, p2 = 0.0, power = 1.0;
                for (std::size_t r = 1; r <= 2000; ++r) {
                    power *= t;
                    p1 += h1[r] * power;
                    p2 += h2[r] * power;
                }
                worst_c = std::max(worst_c, std::abs(p1 * p1 - (2.0 * p1 - p2)));
            }
        }
        o.check(worst_c <= 1e-10, fmt("convolution identity h_a^2 = 2h_a - h_2a: max err %.2e <= 1e-10", worst_c));
    }
    {
        const double sigma = 0.01;
        const double first = sigma * std::sqrt(2.0 / std::numbers::pi);
        const double cauchy = sparsity_rate_quadrature(ScaleFamily::cauchy(), sigma).value;
        const double slab = sparsity_rate_quadrature(ScaleFamily::spike_slab(), sigma).value;
        o.check(rel_err(cauchy, first) < 0.03, fmt("Cauchy rate %.6g vs sigma sqrt(2/pi) %.6g (rel %.3f < 0.03)", cauchy, first, rel_err(cauchy, first)));
        o.check(rel_err(slab, 0.2 * first) < 0.03, fmt("spike-and-slab rate %.6g vs %.6g (rel %.3f < 0.03)", slab, 0.2 * first, rel_err(slab, 0.2 * first)));
    }
    {
        bool ok = true;
        const ModelParams p(0.02, PowerIndex(0.7), k6);
        double prev_t = 1.0, prev_z = 1.0;
        for (double s = 0.1; s < 80.0; s *= 1.2) {
            const double lt = lfdr_t(s, p), lz = lfdr_z(s, 0.02, PowerIndex(0.7));
            ok = ok && lt == lfdr_t(-s, p) && lz == lfdr_z(-s, 0.02, PowerIndex(0.7));
            ok = ok && lt >= 0.0 && lt <= prev_t && lz >= 0.0 && lz <= prev_z;
            prev_t = lt;
            prev_z = lz;
        }
        o.check(ok, "lfdr_t and lfdr_z even, in [0,1], non-increasing in |score|");
    }
    {
        const auto fit_t = fit_ml(panel, NullKind::t, PowerIndex(1.0));
        const auto fit_z = fit_ml(panel, NullKind::z, PowerIndex(1.0));
        const auto report = build_report(panel, fit_t, fit_z, 0.1);
        double worst = 0.0;
        for (const auto& s : report.sites) worst = std::max(worst, std::abs(s.ratio - s.lfdr_z / s.lfdr_t) / s.ratio);
        o.check(worst <= 1e-12, fmt("report ratio column = lfdr_z/lfdr_t (max rel diff %.2e)", worst));
        std::stringstream io;
        write_score_csv(io, panel);
        o.check(read_score_csv(io, k6).t == panel.t, "score CSV round trip is bit-exact");
    }
    {
        double worst = 0.0;
        for (double t = -6.0; t <= 6.0; t += 0.25) worst = std::max(worst, std::abs(specfun::student_t_cdf(t, 1e6) - specfun::norm_cdf(t)));
        o.check(worst < 1e-5, fmt("Student-t CDF at k=1e6 vs Phi: max diff %.2e < 1e-5", worst));
    }
    return o;
}

// ---- HIV data --------------------------------------------------------------

struct HivFits {
    ScorePanel panel;
    FitResult t_est, z_est, t_one, z_one;
};

std::optional<HivFits> hiv;
std::string hiv_problem;

void load_hiv() {
    const char* path = std::getenv("TSPARSE_HIV_DATA");
    if (!path || !*path) {
        hiv_problem = "TSPARSE_HIV_DATA not set; the HIV matrix is not bundled";
        return;
    }
    std::ifstream in(path);
    if (!in) {
        hiv_problem = std::string("cannot open ") + path;
        return;
    }
    IngestOptions opts;
    if (const char* g = std::getenv("TSPARSE_HIV_FIRST_GROUP"); g && *g) opts.first_group = g;
    auto ingest = read_panel(in, std::nullopt, opts);
    HivFits f{std::move(ingest.panel), {}, {}, {}, {}};
    f.t_est = fit_ml(f.panel, NullKind::t, std::nullopt);
    f.z_est = fit_ml(f.panel, NullKind::z, std::nullopt);
    f.t_one = fit_ml(f.panel, NullKind::t, PowerIndex(1.0));
    f.z_one = fit_ml(f.panel, NullKind::z, PowerIndex(1.0));
    hiv = std::move(f);
}

Outcome skipped() {
    Outcome o;
    o.status = Status::skip;
    o.notes.push_back(hiv_problem);
    return o;
}

void check_near(Outcome& o, const char* what, double got, double want, double tol) {
    o.check(std::abs(got - want) <= tol, fmt("%s %.5f vs %.4g (+/- %g)", what, got, want, tol));
}

Outcome hiv_fits() {
    if (!hiv) return skipped();
    Outcome o;
    o.notes.push_back(fmt("%zu sites, k = %g", hiv->panel.size(), hiv->panel.df.value()));
    check_near(o, "z-null rho", hiv->z_est.rho_hat, 0.0059, 0.0005);
    check_near(o, "z-null d", hiv->z_est.d_hat, 1.09, 0.02);
    check_near(o, "z-null loglik", hiv->z_est.loglik_rel_null, 48.23, 0.05);
    check_near(o, "t-null rho", hiv->t_est.rho_hat, 0.0045, 0.0005);
    check_near(o, "t-null d", hiv->t_est.d_hat, 0.60, 0.02);
    check_near(o, "t-null loglik", hiv->t_est.loglik_rel_null, 56.13, 0.05);
    check_near(o, "z-null rho (d=1)", hiv->z_one.rho_hat, 0.0053, 0.0005);
    check_near(o, "z-null loglik (d=1)", hiv->z_one.loglik_rel_null, 48.13, 0.05);
    check_near(o, "t-null rho (d=1)", hiv->t_one.rho_hat, 0.0078, 0.0005);
    check_near(o, "t-null loglik (d=1)", hiv->t_one.loglik_rel_null, 52.99, 0.05);
    return o;
}

struct PrintedRow {
    double lz, lt, ratio; // lfdr in units of 1e-4
};

void table_rows(Outcome& o, const char* label, const LfdrReport& report, const std::array<PrintedRow, 6>& printed) {
    const auto top = top_sites(report, 6);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& s = report.sites[top[i]];
        const double lz = std::round(1e6 * s.lfdr_z) / 100.0;
        const double lt = std::round(1e6 * s.lfdr_t) / 100.0;
        const double ratio = std::round(100.0 * s.ratio) / 100.0;
        const bool ok = rel_err(lz, printed[i].lz) <= 0.02 && rel_err(lt, printed[i].lt) <= 0.02 &&
                        std::abs(ratio - printed[i].ratio) <= 0.02;
        o.check(ok, fmt("%s Z=%.2f T=%.2f: lz %.2f/%.2f lt %.2f/%.2f ratio %.2f/%.2f", label, s.z, s.t, lz, printed[i].lz,
                        lt, printed[i].lt, ratio, printed[i].ratio));
    }
}

Outcome hiv_tables() {
    if (!hiv) return skipped();
    Outcome o;
    constexpr std::array<PrintedRow, 6> estimated{{
        {1.54, 0.77, 2.00}, {3.93, 1.95, 2.01}, {8.12, 4.03, 2.02}, {11.65, 5.78, 2.01}, {22.94, 11.44, 2.01}, {82.10, 41.86, 1.96},
    }};
    constexpr std::array<PrintedRow, 6> fixed{{
        {1.52, 1.43, 1.06}, {3.88, 3.38, 1.15}, {8.02, 6.60, 1.22}, {11.53, 9.22, 1.25}, {22.78, 17.32, 1.32}, {82.01, 57.30, 1.43},
    }};
    table_rows(o, "estimated d", build_report(hiv->panel, hiv->t_est, hiv->z_est, 0.1), estimated);
    table_rows(o, "d=1", build_report(hiv->panel, hiv->t_one, hiv->z_one, 0.1), fixed);
    return o;
}

Outcome hiv_bh() {
    if (!hiv) return skipped();
    Outcome o;
    const auto est = build_report(hiv->panel, hiv->t_est, hiv->z_est, 0.1);
    const auto one = build_report(hiv->panel, hiv->t_one, hiv->z_one, 0.1);
    o.check(est.n_rejected == 16, fmt("BH(0.1) rejections %zu == 16", est.n_rejected));
    check_near(o, "mean lfdr_t in BH set (estimated d)", est.bh_lfdr_t.mean, 0.108, 0.005);
    check_near(o, "mean lfdr_z in BH set (estimated d)", est.bh_lfdr_z.mean, 0.144, 0.005);
    check_near(o, "mean lfdr_t in BH set (d=1)", one.bh_lfdr_t.mean, 0.104, 0.005);
    check_near(o, "mean lfdr_z in BH set (d=1)", one.bh_lfdr_z.mean, 0.147, 0.005);
    return o;
}

} // namespace

int main() {
    run(1, "coefficient identity: quadrature vs mixture weights", 10.0, coefficient_identity);
    run(2, "Catalan case d=1", 0.0, catalan_case);
    run(3, "density normalization", 10.0, density_normalization);
    run(4, "component law by Monte Carlo", 60.0, component_law);
    run(5, "ratio table at k=10", 5.0, ratio_table);
    run(6, "k=100 ratios", 0.0, k100_ratios);

    const auto start = std::chrono::steady_clock::now();
    try {
        load_hiv();
    } catch (const std::exception& e) {
        hiv_problem = std::string("loading HIV data failed: ") + e.what();
        ++failures;
    }
    const double load_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // the fits run inside load_hiv, so their time is reported here
    run(7, "HIV maximum-likelihood fits", 0.0, [&] {
        Outcome o = hiv_fits();
        if (hiv) o.check(load_s < 120.0, fmt("data load and four fits %.2f s < 120 s", load_s));
        return o;
    });
    run(8, "HIV lfdr tables", 0.0, hiv_tables);
    run(9, "HIV BH comparison", 0.0, hiv_bh);
    run(10, "property suite", 180.0, property_suite);

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}

#include "tsparse/oracle.hpp"

#include "tsparse/specfun.hpp"
#include "tsparse/twogroups.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace tsparse::oracle {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

CheckResult make(std::string name, double measured, double tolerance, std::string detail = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.passed = std::isfinite(measured) && measured <= tolerance;
    c.detail = std::move(detail);
    return c;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

constexpr std::array<double, 3> kIndices{0.5, 1.0, 1.5};
constexpr std::array<double, 5> kDfs{1.0, 2.0, 6.0, 9.0, 100.0};

void coefficient_checks(std::vector<CheckResult>& out) {
    for (double dv : kIndices) {
        const PowerIndex d(dv);
        const auto table = mixture_coefficients(d, 20);
        double worst = 0.0;
        for (std::size_t r = 1; r <= 20; ++r) {
            worst = std::max(worst, rel_err(coefficient_quadrature(d, r).value, table[r]));
        }
        out.push_back(make("coefficient identity d=" + fmt("%.1f", dv) + " r<=20", worst, 1e-8));
    }

    // zeta_{1,r} = C_{r-1} / 2^{2r-1}, Catalan numbers exactly in integers
    const auto table = mixture_coefficients(PowerIndex(1.0), 15);
    double worst = 0.0;
    unsigned long long catalan = 1;
    for (std::size_t r = 1; r <= 15; ++r) {
        const double want = std::ldexp(static_cast<double>(catalan), -static_cast<int>(2 * r - 1));
        worst = std::max(worst, std::abs(table[r] - want));
        catalan = catalan * 2 * (2 * r - 1) / (r + 1);
    }
    out.push_back(make("Catalan weights d=1 r<=15", worst, 1e-14));
}

void moment_checks(std::vector<CheckResult>& out) {
    constexpr std::size_t R = 1'000'000;
    for (double dv : kIndices) {
        const PowerIndex d(dv);
        const double a = d.half();
        const auto table = mixture_coefficients(d, R);
        // zeta_r ~ a r^{-1-a} / Gamma(1-a) beyond R
        const double tail_scale = a / std::tgamma(1.0 - a);
        const double Rd = static_cast<double>(R);

        double harmonic = 0.0;
        for (std::size_t r = R; r >= 1; --r) harmonic += table[r] / static_cast<double>(r);
        harmonic += tail_scale * std::pow(Rd, -1.0 - a) / (1.0 + a);
        const double want = specfun::digamma(a + 1.0) - specfun::digamma(1.0);
        out.push_back(make("reciprocal moment d=" + fmt("%.1f", dv), std::abs(harmonic - want), 1e-6,
                           fmt("sum %.9f, harmonic %.9f", harmonic, want)));

        double worst = 0.0;
        for (int s = 1; s <= 3; ++s) {
            // r! / ((r+1)...(r+s)) is the reciprocal of binomial(r+s, s) times s!
            double moment = 0.0;
            for (std::size_t r = R; r >= 1; --r) {
                double factor = 1.0;
                for (int j = 1; j <= s; ++j) factor *= static_cast<double>(j) / (static_cast<double>(r) + j);
                moment += table[r] * factor;
            }
            moment += tail_scale * std::tgamma(s + 1.0) * std::pow(Rd, -a - s) / (a + s);
            const double want_s = a / (a + s);
            worst = std::max(worst, std::abs(moment - want_s));
        }
        out.push_back(make("inverse factorial moments d=" + fmt("%.1f", dv) + " s<=3", worst, 1e-8));
    }

    double worst = 0.0;
    for (double dv : {0.5, 0.8}) {
        const auto h1 = mixture_coefficients(PowerIndex(dv), 2000);
        const auto h2 = mixture_coefficients(PowerIndex(2.0 * dv), 2000);
        for (double t : {0.1, 0.5, 0.9}) {
            double p1 = 0.0;
            double p2 = 0.0;
            double power = 1.0;
            for (std::size_t r = 1; r <= 2000; ++r) {
                power *= t;
                p1 += h1[r] * power;
                p2 += h2[r] * power;
            }
            worst = std::max(worst, std::abs(p1 * p1 - (2.0 * p1 - p2)));
        }
    }
    out.push_back(make("convolution identity h^2 = 2h - h_2a", worst, 1e-10));
}

void density_checks(std::vector<CheckResult>& out) {
    for (double kv : kDfs) {
        const DegreesOfFreedom k(kv);
        double worst = 0.0;
        for (std::size_t r = 0; r <= 20; ++r) {
            worst = std::max(worst, std::abs(component_density_mass(k, r).value - 1.0));
        }
        out.push_back(make("f_r mass k=" + fmt("%g", kv) + " r<=20", worst, 1e-8));
    }

    // the tail beyond the cut comes from the beta representation, not the zeta series
    const ModelParams params(0.1, PowerIndex(1.0), DegreesOfFreedom(6.0));
    const double cut = 50.0;
    const auto f = [&](double t) { return t_mixture_pdf(t, params); };
    const double inner = 2.0 * quad::integrate(f, 0.0, cut, {1e-13, 1e-12, 20000}).value;
    const MixtureCdf mix(params.d, params.k, 3.0, 2);
    const double outer = params.rho * (1.0 - mix.abs_cdf(cut)) +
                         (1.0 - params.rho) * 2.0 * specfun::student_t_sf(cut, params.k.value());
    out.push_back(make("t mixture mass (0.1, 1, 6)", std::abs(inner + outer - 1.0), 1e-8));

    double worst = 0.0;
    for (int i = 1; i <= 19; i += 2) {
        worst = std::max(worst, std::abs(exceedance_normalization(PowerIndex(0.1 * i)).value - 1.0));
    }
    out.push_back(make("exceedance normalization d=0.1..1.9", worst, 1e-9));
}

void zeta_checks(std::vector<CheckResult>& out) {
    for (double dv : kIndices) {
        const PowerIndex d(dv);
        double worst = 0.0;
        for (double y : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0}) {
            worst = std::max(worst, rel_err(zeta_quadrature(y, d).value, zeta_inf(y, d)));
        }
        out.push_back(make("zeta_inf series vs quadrature d=" + fmt("%.1f", dv), worst, 1e-8));
    }
    for (double dv : kIndices) {
        const PowerIndex d(dv);
        for (double kv : {1.0, 6.0, 9.0, 100.0}) {
            const DegreesOfFreedom k(kv);
            double worst = 0.0;
            for (double t : {0.5, 2.0, 4.0, 8.0}) {
                worst = std::max(worst, rel_err(zeta_k_quadrature(t, k, d).value, zeta_k(t, k, d)));
            }
            out.push_back(make("zeta_k series vs quadrature d=" + fmt("%.1f", dv) + " k=" + fmt("%g", kv),
                               worst, 1e-7));
        }
    }
    for (double dv : kIndices) {
        const double mass = zeta_normalization_quadrature(PowerIndex(dv)).value;
        out.push_back(make("int phi zeta = 1 d=" + fmt("%.1f", dv), std::abs(mass - 1.0), 1e-7));
    }

    double worst = 0.0;
    for (double dv : kIndices) {
        for (int i = 1; i <= 12; ++i) {
            const double y = 0.5 * i;
            const PowerIndex d(dv);
            worst = std::max(worst, std::abs(zeta_k(y, DegreesOfFreedom(1e6), d) / zeta_inf(y, d) - 1.0));
        }
    }
    out.push_back(make("zeta_k -> zeta_inf at k=1e6, y in [0.5, 6]", worst, 1e-3));

    const ModelParams params(0.05, PowerIndex(1.0), DegreesOfFreedom(6.0));
    worst = 0.0;
    for (int i = 1; i <= 40; ++i) {
        const double t = 0.5 * i;
        const double z = pit_transform(t, params.k);
        const double jacobian = specfun::student_t_pdf(t, 6.0) / specfun::norm_pdf(z);
        worst = std::max(worst, rel_err(pit_mixture_pdf(z, params) * jacobian, t_mixture_pdf(t, params)));
    }
    out.push_back(make("PIT change of variables (0.05, 1, 6)", worst, 1e-9));
}

void rate_checks(std::vector<CheckResult>& out) {
    const double sigma = 0.01;
    const double first_order = sigma * std::sqrt(2.0 / std::numbers::pi);
    const double cauchy = sparsity_rate_quadrature(ScaleFamily::cauchy(), sigma).value;
    out.push_back(make("Cauchy rate sigma=0.01", rel_err(cauchy, first_order), 0.03,
                       fmt("quadrature %.6g, sigma sqrt(2/pi) %.6g", cauchy, first_order)));
    const double slab = sparsity_rate_quadrature(ScaleFamily::spike_slab(), sigma).value;
    out.push_back(make("spike-and-slab rate sigma=0.01", rel_err(slab, 0.2 * first_order), 0.03,
                       fmt("quadrature %.6g, 0.2 sigma sqrt(2/pi) %.6g", slab, 0.2 * first_order)));
    const double student = sparsity_rate_quadrature(ScaleFamily::student(0.5), sigma).value;
    const double student_formula = student_scale_rate(sigma, PowerIndex(0.5));
    out.push_back(make("Student-t rate d=0.5 sigma=0.01", rel_err(student, student_formula), 0.05,
                       fmt("quadrature %.6g, formula %.6g", student, student_formula)));

    for (double dv : {0.5, 1.5}) {
        std::array<double, 3> ratio{};
        const std::array<double, 3> sigmas{0.1, 0.01, 0.001};
        for (std::size_t i = 0; i < 3; ++i) {
            ratio[i] = sparsity_rate_quadrature(ScaleFamily::student(dv), sigmas[i]).value / std::pow(sigmas[i], dv);
        }
        const double first = std::abs(ratio[1] - ratio[0]);
        const double second = std::abs(ratio[2] - ratio[1]);
        auto c = make("rate / sigma^d stabilizes d=" + fmt("%.1f", dv), second / first, 1.0,
                      fmt("rate/sigma^d = %.6g, %.6g, %.6g", ratio[0], ratio[1], ratio[2]));
        c.passed = c.passed && second < first;
        out.push_back(c);
    }

    const auto log_zeta = [](double y) { return log_zeta_inf(y, PowerIndex(1.0)); };
    const double tv_coarse = sparse_approximation_tv(0.05, log_zeta) / (0.05 * std::sqrt(2.0 / std::numbers::pi));
    const double tv_fine = sparse_approximation_tv(0.01, log_zeta) / (0.01 * std::sqrt(2.0 / std::numbers::pi));
    auto c = make("TV/rho decreases (Cauchy, sigma 0.05 -> 0.01)", tv_fine / tv_coarse, 1.0,
                  fmt("TV/rho = %.4g at 0.05, %.4g at 0.01", tv_coarse, tv_fine));
    c.passed = c.passed && tv_fine < tv_coarse;
    out.push_back(c);
}

std::uint64_t retry_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL; }

template <class Run>
CheckResult monte_carlo(std::string name, std::uint64_t seed, Run run) {
    constexpr double threshold = 0.002;
    double ks = run(seed);
    std::string detail = fmt("KS %.5f", ks);
    if (!(ks < threshold)) {
        ks = run(retry_seed(seed));
        detail += fmt(", retry KS %.5f", ks);
    }
    auto c = make(std::move(name), ks, threshold, detail);
    c.passed = ks < threshold;
    return c;
}

void monte_carlo_checks(std::vector<CheckResult>& out, const VerifyOptions& opts) {
    const std::array<std::pair<std::size_t, double>, 5> cases{{{0, 6.0}, {1, 6.0}, {2, 9.0}, {3, 100.0}, {2, 100.0}}};
    std::uint64_t stream = 0;
    for (const auto& [r, kv] : cases) {
        const std::uint64_t seed = opts.seed + 1000 * ++stream;
        out.push_back(monte_carlo("f_r law r=" + std::to_string(r) + " k=" + fmt("%g", kv), seed, [&](std::uint64_t s) {
            return component_mc(r, DegreesOfFreedom(kv), opts.mc_samples, s).ks;
        }));
    }
    out.push_back(monte_carlo("simulate_panel rho=1 d=1 k=6", opts.seed + 1000 * ++stream, [&](std::uint64_t s) {
        return panel_mc_ks(PowerIndex(1.0), DegreesOfFreedom(6.0), opts.mc_samples, s);
    }));
}

void table_checks(std::vector<CheckResult>& out) {
    constexpr std::array<double, 6> ts{3.0, 4.0, 5.0, 7.0, 10.0, 15.0};
    constexpr std::array<double, 6> zs{2.47, 3.02, 3.46, 4.12, 4.80, 5.51};
    constexpr std::array<std::array<double, 6>, 3> printed{{
        {0.84, 0.79, 0.73, 0.65, 0.57, 0.52},
        {0.94, 0.93, 0.90, 0.85, 0.82, 0.85},
        {1.05, 1.10, 1.12, 1.12, 1.18, 1.37},
    }};
    const DegreesOfFreedom k(10.0);
    double worst_z = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) worst_z = std::max(worst_z, std::abs(pit_transform(ts[i], k) - zs[i]));
    out.push_back(make("ratio table z column (k=10)", worst_z, 0.01));
    double worst = 0.0;
    for (std::size_t j = 0; j < kIndices.size(); ++j) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            worst = std::max(worst, std::abs(pit_zeta_ratio(ts[i], k, PowerIndex(kIndices[j])) - printed[j][i]));
        }
    }
    out.push_back(make("ratio table 18 cells (k=10)", worst, 0.01));

    constexpr std::array<double, 4> z100{3.0, 4.0, 5.0, 6.0};
    constexpr std::array<double, 4> printed100{1.14, 1.62, 3.37, 11.68};
    const DegreesOfFreedom k100(100.0);
    double same = 0.0;
    double transformed = 0.0;
    for (std::size_t i = 0; i < z100.size(); ++i) {
        same = std::max(same, std::abs(same_argument_zeta_ratio(z100[i], k100, PowerIndex(1.0)) - printed100[i]));
        transformed = std::max(transformed,
                               std::abs(transformed_argument_zeta_ratio(z100[i], k100, PowerIndex(1.0)) - printed100[i]));
    }
    const bool same_ok = same <= 0.02;
    const bool transformed_ok = transformed <= 0.02;
    std::string detail = fmt("same-argument max err %.4f, transformed-argument max err %.4f", same, transformed);
    detail += "; reproduced by: ";
    detail += same_ok && transformed_ok ? "both" : same_ok ? "same argument" : transformed_ok ? "transformed argument" : "neither";
    out.push_back(make("k=100 ratios at z=3,4,5,6 (d=1)", std::min(same, transformed), 0.02, detail));
}

} // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    coefficient_checks(out);
    moment_checks(out);
    density_checks(out);
    zeta_checks(out);
    rate_checks(out);
    if (opts.include_monte_carlo) monte_carlo_checks(out, opts);
    table_checks(out);
    return out;
}

} // namespace tsparse::oracle

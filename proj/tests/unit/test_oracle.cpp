#include "tsparse/oracle.hpp"
#include "tsparse/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tsparse;
using namespace tsparse::oracle;

TEST_CASE("coefficient quadrature in the Catalan case") {
    CHECK(coefficient_quadrature(PowerIndex(1.0), 1).value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(coefficient_quadrature(PowerIndex(1.0), 3).value == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
    CHECK(coefficient_quadrature(PowerIndex(0.5), 5).value ==
          doctest::Approx(mixture_coefficients(PowerIndex(0.5), 5)[5]).epsilon(1e-8));
}

TEST_CASE("zeta quadrature") {
    CHECK(zeta_quadrature(0.0, PowerIndex(1.0)).value == 0.0);
    const auto q = zeta_quadrature(3.0, PowerIndex(1.0));
    CHECK(q.abs_error_estimate >= 0.0);
    CHECK(q.value == doctest::Approx(zeta_inf(3.0, PowerIndex(1.0))).epsilon(1e-8));
    CHECK(psi_quadrature(3.0, PowerIndex(1.0)).value ==
          doctest::Approx(specfun::norm_pdf(3.0) * q.value).epsilon(1e-8));
}

TEST_CASE("exceedance measure is normalized") {
    for (double d : {0.2, 1.0, 1.8}) {
        CHECK(exceedance_normalization(PowerIndex(d)).value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sparsity rate of the Cauchy family") {
    const double sigma = 0.01;
    const double rate = sparsity_rate_quadrature(ScaleFamily::cauchy(), sigma).value;
    CHECK(std::abs(rate / (sigma * std::sqrt(2.0 / std::numbers::pi)) - 1.0) < 0.03);
    const double slab = sparsity_rate_quadrature(ScaleFamily::spike_slab(), sigma).value;
    CHECK(slab == doctest::Approx(0.2 * rate).epsilon(1e-9));
}

TEST_CASE("component densities integrate to one") {
    CHECK(component_density_mass(DegreesOfFreedom(6.0), 0).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(component_density_mass(DegreesOfFreedom(1.0), 4).value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("CDF table of the Cauchy law") {
    const CdfTable cdf([](double t) { return 1.0 / (std::numbers::pi * (1.0 + t * t)); }, 1.0, 4000);
    CHECK(cdf.mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cdf(1.0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(cdf(-3.0) == doctest::Approx(0.5 + std::atan(-3.0) / std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("KS statistic on a tiny sample") {
    std::vector<double> x{0.5, 0.1};
    // uniform CDF: steps at 0.1 and 0.5 give max(0.1, 0.5 - 0.1, 1 - 0.5) = 0.5
    CHECK(ks_statistic(x, [](double u) { return u; }) == doctest::Approx(0.5));
    CHECK(x.front() == 0.1);
}

TEST_CASE("null component Monte Carlo") {
    const auto mc = component_mc(0, DegreesOfFreedom(6.0), 100000, 3);
    CHECK(mc.samples.size() == 100000);
    CHECK(mc.cdf_mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mc.ks < 1.63 / std::sqrt(100000.0));
    // same seed, same draws
    CHECK(component_mc(0, DegreesOfFreedom(6.0), 1000, 3).samples ==
          component_mc(0, DegreesOfFreedom(6.0), 1000, 3).samples);
}

TEST_CASE("mixture CDF") {
    const MixtureCdf cdf(PowerIndex(1.0), DegreesOfFreedom(6.0));
    CHECK(cdf.abs_cdf(0.0) == 0.0);
    CHECK(cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    double prev = 0.0;
    for (double t = 0.5; t < 200.0; t *= 2.0) {
        const double v = cdf.abs_cdf(t);
        CHECK(v > prev);
        CHECK(v < 1.0);
        CHECK(cdf(t) == doctest::Approx(0.5 + 0.5 * v).epsilon(1e-6));
        prev = v;
    }
}

TEST_CASE("sparse approximation error shrinks faster than the rate") {
    const auto log_zeta = [](double y) { return log_zeta_inf(y, PowerIndex(1.0)); };
    const double rho_a = student_scale_rate(0.05, PowerIndex(1.0));
    const double rho_b = student_scale_rate(0.01, PowerIndex(1.0));
    CHECK(sparse_approximation_tv(0.01, log_zeta) / rho_b < sparse_approximation_tv(0.05, log_zeta) / rho_a);
}

TEST_CASE("verify without Monte Carlo passes") {
    VerifyOptions opts;
    opts.include_monte_carlo = false;
    const auto results = run_verify(opts);
    CHECK(results.size() > 20);
    for (const auto& r : results) {
        INFO(r.name << ": " << r.measured << " vs " << r.tolerance << " " << r.detail);
        CHECK(r.passed);
    }
}

#pragma once

// Brute-force verifiers for the analytic formulas in coeffs/zeta: adaptive
// quadrature of the defining integrals and Monte Carlo draws from the
// constructive laws. The quadrature and sampling routines never call the
// series they check; run_verify pairs each series with its oracle.

#include "tsparse/coeffs.hpp"
#include "tsparse/quadrature.hpp"
#include "tsparse/zeta.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tsparse::oracle {

using quad::QuadratureResult;

// ---- sparsity rates -------------------------------------------------------

/// Symmetric scale families with a sparse limit.
struct ScaleFamily {
    enum class Kind { student, spike_slab, cauchy } kind;
    double d = 1.0; // Student-t degrees of freedom (power index) for Kind::student

    static ScaleFamily student(double d) { return {Kind::student, d}; }
    /// 0.8 delta_0 + 0.2 Cauchy(sigma)
    static ScaleFamily spike_slab() { return {Kind::spike_slab, 1.0}; }
    static ScaleFamily cauchy() { return {Kind::cauchy, 1.0}; }
};

/// Density of the family member with scale sigma (continuous part only for spike_slab).
double family_density(const ScaleFamily& family, double sigma, double x);

/// int (1 - exp(-x^2/2)) P_sigma(dx).
QuadratureResult sparsity_rate_quadrature(const ScaleFamily& family, double sigma);

/// int (1 - exp(-x^2/2)) C_d |x|^{-d-1} dx; equals one for a unit measure.
QuadratureResult exceedance_normalization(PowerIndex d);

// ---- zeta and coefficients ------------------------------------------------

/// int (cosh(xy) - 1) exp(-x^2/2) C_d |x|^{-d-1} dx.
QuadratureResult zeta_quadrature(double y, PowerIndex d);

/// phi(y) zeta(y), evaluated without forming exp(y^2/2).
QuadratureResult psi_quadrature(double y, PowerIndex d);

/// int phi(y) zeta(y) dy by nested quadrature; equals one.
QuadratureResult zeta_normalization_quadrature(PowerIndex d);

/// (1*3*...*(2r-1) / (2r)!) int x^{2r} exp(-x^2/2) H_d(dx), to compare with zeta_{d,r}.
QuadratureResult coefficient_quadrature(PowerIndex d, std::size_t r);

/// zeta_k(t) as (density of Y/s at t) / f_0(t), with Y ~ phi * zeta and
/// s^2 ~ chi^2_k / k, both integrals done by quadrature.
QuadratureResult zeta_k_quadrature(double t, DegreesOfFreedom k, PowerIndex d);

/// int f_r(t) dt over the real line.
QuadratureResult component_density_mass(DegreesOfFreedom k, std::size_t r);

// ---- CDFs and Monte Carlo -------------------------------------------------

/// CDF of a density on the real line, tabulated by quadrature on the grid
/// t = scale * tan(pi u / 2), u in (-1, 1), and linearly interpolated in u.
class CdfTable {
public:
    CdfTable(const std::function<double(double)>& density, double scale, std::size_t cells = 20000);

    double operator()(double t) const;
    /// Total mass before normalization.
    double mass() const noexcept { return mass_; }

private:
    double scale_;
    std::vector<double> cumulative_; // at u_j = -1 + 2j/cells
    double mass_;
};

/// Two-sided Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
/// Sorts the samples in place.
double ks_statistic(std::vector<double>& samples, const std::function<double(double)>& cdf);

struct MonteCarloResult {
    std::vector<double> samples;
    double ks = 0.0;
    double cdf_mass = 0.0; // quadrature mass of f_r before normalization
};

/// T = X_1 sqrt(k / X_2^2) with X_1 = +/- sqrt(chi^2_{2r+1}) and X_2^2 ~ chi^2_k;
/// KS distance of n draws to the quadrature CDF of f_r.
MonteCarloResult component_mc(std::size_t r, DegreesOfFreedom k, std::size_t n, std::uint64_t seed);

/// Law of a score drawn from the non-null component with the Student-t null
/// (rho = 1). Uses |T|^2 / (k + T^2) ~ Beta(r + 1/2, k/2) given the mixture
/// index r, summing incomplete beta values by their upward recurrence in r.
class MixtureCdf {
public:
    MixtureCdf(PowerIndex d, DegreesOfFreedom k, double scale = 3.0, std::size_t cells = 4000);

    /// P(|T| <= t) by direct summation, t >= 0.
    double abs_cdf(double t) const;
    /// Tabulated CDF of the signed score.
    double operator()(double t) const;

private:
    PowerIndex d_;
    DegreesOfFreedom k_;
    double scale_;
    std::vector<double> table_; // abs_cdf at t_j = scale tan(pi j / (2 cells))
};

/// KS distance between simulate_panel draws at rho = 1 and MixtureCdf.
double panel_mc_ks(PowerIndex d, DegreesOfFreedom k, std::size_t n, std::uint64_t seed);

/// Total-variation distance between the exact Cauchy(sigma) + N(0,1) convolution and
/// its sparse two-component approximation (1-rho) phi + rho phi zeta_inf with d = 1.
/// `log_zeta_inf` supplies the zeta function being checked.
double sparse_approximation_tv(double sigma, const std::function<double(double)>& log_zeta_inf);

// ---- verification matrix --------------------------------------------------

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20240607;
    std::size_t mc_samples = 1'000'000;
    bool include_monte_carlo = true;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

} // namespace tsparse::oracle

#pragma once

// Zeta functions (density ratios of the non-null to the null component)
// for inverse-power exceedance measures:
//
//   zeta_inf(y) = sum_r zeta_{d,r} y^{2r} / (1*3*...*(2r-1))          Gaussian null
//   zeta_k(t)   = sum_r zeta_{d,r} f_r(t) / f_0(t)                    Student-t_k null
//
// plus the component densities f_r, the two-groups marginal densities and
// the probability integral transform g(t) = Phi^{-1}(F_0(t; k)).

#include "tsparse/coeffs.hpp"

#include <cstddef>

namespace tsparse {

/// Degrees of freedom k > 0 of the Student-t null.
class DegreesOfFreedom {
public:
    explicit DegreesOfFreedom(double k);
    double value() const noexcept { return k_; }
    friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

private:
    double k_;
};

/// (rho, d, k): sparsity rate, power index, degrees of freedom.
struct ModelParams {
    ModelParams(double rho, PowerIndex d, DegreesOfFreedom k);

    double rho;
    PowerIndex d;
    DegreesOfFreedom k;
};

/// Truncation control for the zeta series.
struct SeriesOptions {
    /// Stop once a rigorous bound on the remaining tail is below rel_tol * partial sum.
    double rel_tol = 1e-12;
    /// Hard cap on the number of terms; exceeding it throws numerical_error.
    std::size_t max_terms = 100'000'000;
    /// zeta_k terms summed one by one before the remainder is taken from the
    /// Euler-Maclaurin formula. Far-tail t-scores need ~t^2/k terms otherwise.
    std::size_t direct_terms = 20'000;
};

// ---- Gaussian null --------------------------------------------------------

/// log zeta_inf(y); -inf at y = 0. Finite for every finite y.
double log_zeta_inf(double y, PowerIndex d, const SeriesOptions& opts = {});
/// zeta_inf(y); overflows to +inf past |y| ~ 38, use log_zeta_inf there.
double zeta_inf(double y, PowerIndex d, const SeriesOptions& opts = {});

// ---- Student-t null -------------------------------------------------------

/// log f_r(t)/f_0(t) = log[ t^{2r} (1+k)(3+k)...(2r-1+k) / ((1*3*...*(2r-1)) (k+t^2)^r) ].
double log_component_density_ratio(double t, DegreesOfFreedom k, std::size_t r);
double component_density_ratio(double t, DegreesOfFreedom k, std::size_t r);

/// log zeta_k(t); -inf at t = 0.
double log_zeta_k(double t, DegreesOfFreedom k, PowerIndex d, const SeriesOptions& opts = {});
double zeta_k(double t, DegreesOfFreedom k, PowerIndex d, const SeriesOptions& opts = {});

/// log f_r(t); f_0 is the Student-t density on k degrees of freedom.
double log_component_density(double t, DegreesOfFreedom k, std::size_t r);
double component_density(double t, DegreesOfFreedom k, std::size_t r);

/// (1 - rho) f_0(t) + rho f_0(t) zeta_k(t).
double t_mixture_pdf(double t, const ModelParams& params, const SeriesOptions& opts = {});

// ---- probability integral transform ---------------------------------------

/// g(t) = Phi^{-1}(F_0(t; k)), evaluated as sign(t) * upper-quantile(survival(|t|)).
double pit_transform(double t, DegreesOfFreedom k);

/// g^{-1}(z) = F_0^{-1}(Phi(z); k). Throws numerical_error once the result
/// leaves the double range, roughly |z| > sqrt(1400 k) for small k.
double pit_inverse(double z, DegreesOfFreedom k);

/// g'(t) = f_0(t) / phi(g(t)).
double pit_derivative(double t, DegreesOfFreedom k);

/// phi(z) (1 - rho + rho zeta_k(g^{-1}(z))). Same range limit as pit_inverse.
double pit_mixture_pdf(double z, const ModelParams& params, const SeriesOptions& opts = {});

// ---- null comparisons -----------------------------------------------------

/// zeta_inf(g(t)) / zeta_k(t): the Gaussian-null zeta at the transformed score
/// over the Student-t zeta at the original score.
double pit_zeta_ratio(double t, DegreesOfFreedom k, PowerIndex d);

/// zeta_inf(z) / zeta_k(z), both evaluated at the same argument.
double same_argument_zeta_ratio(double z, DegreesOfFreedom k, PowerIndex d);

/// zeta_inf(z) / zeta_k(g^{-1}(z)), the ratio at a common z-score.
double transformed_argument_zeta_ratio(double z, DegreesOfFreedom k, PowerIndex d);

} // namespace tsparse

#pragma once

// Scalar special functions: log-gamma, normal and Student-t distribution
// functions, and the double-step rising factorial.
//
// All functions are pure. Domain violations throw std::domain_error.

#include <cmath>
#include <numbers>

namespace tsparse::specfun {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178; // log(sqrt(2*pi))

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// ln B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// ln(Gamma(x + delta) / Gamma(x)) for x > 0, x + delta > 0, without the
/// cancellation of two large log-gamma values.
double log_gamma_ratio(double x, double delta);

/// Digamma psi(x) = d/dx ln Gamma(x).
double digamma(double x);

/// Standard normal density.
inline double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

/// Standard normal CDF Phi(z).
double norm_cdf(double z);

/// Upper tail 1 - Phi(z), accurate for large positive z.
double norm_sf(double z);

/// log(1 - Phi(z)), finite for every finite z (asymptotic expansion far in the tail).
double norm_log_sf(double z);

/// Phi^{-1}(p) for 0 < p < 1.
double norm_quantile(double p);

/// Upper-tail quantile: the z with 1 - Phi(z) = q, for 0 < q < 1.
double norm_upper_quantile(double q);

/// Upper-tail quantile from log q (q may be far below the smallest double).
double norm_upper_quantile_log(double log_q);

/// Student-t density on k > 0 degrees of freedom.
double student_t_pdf(double t, double k);

/// log of the Student-t density.
double student_t_log_pdf(double t, double k);

/// Student-t CDF F_0(t; k).
double student_t_cdf(double t, double k);

/// Survival 1 - F_0(t; k).
double student_t_sf(double t, double k);

/// log(1 - F_0(t; k)); stays finite when the survival underflows.
double student_t_log_sf(double t, double k);

/// Sign and log-magnitude of a(a+2)(a+4)...(a+2(r-1)).
/// An exactly-zero product is reported as sign 0 with log_abs = -inf.
struct SignedLog {
    int sign = 1;
    double log_abs = 0.0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

SignedLog double_rising_factorial_log(double a, unsigned r);

} // namespace tsparse::specfun

#include "tsparse/specfun.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tsparse::specfun {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Survival below this is handled through the leading incomplete-beta term.
constexpr double kTinyProbability = 1e-300;

void require_positive_df(double k, const char* who) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::domain_error(std::string(who) + ": degrees of freedom must be positive and finite");
    }
}

// log I_x(a, 1/2) for x -> 0, where x = k / (k + t^2), using
// I_x(a,b) = x^a (1-x)^b / (a B(a,b)) * (1 + (a+b)/(a+1) x + O(x^2)).
double log_sf_far_tail(double t, double k) {
    const double a = 0.5 * k;
    const double b = 0.5;
    const double log_t = std::log(t);
    // log x = log k - log(k + t^2), written so that t^2 never overflows
    const double log_x = std::log(k) - 2.0 * log_t - std::log1p(k * std::exp(-2.0 * log_t));
    const double x = std::exp(log_x);
    return std::log(0.5) + a * log_x + b * std::log1p(-x) - std::log(a) - log_beta(a, b) +
           std::log1p((a + b) / (a + 1.0) * x);
}

} // namespace

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("log_gamma: argument must be positive and finite");
    }
    return boost::math::lgamma(x);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_gamma_ratio(double x, double delta) {
    if (!(x > 0.0) || !(x + delta > 0.0) || !std::isfinite(x) || !std::isfinite(delta)) {
        throw std::domain_error("log_gamma_ratio: arguments out of range");
    }
    if (delta == 0.0) return 0.0;
    const double y = x + delta;
    if (x >= 100.0 && y >= 100.0) {
        // difference of Stirling series; the first omitted term is below 1e-17
        const auto tail = [](double z) {
            const double w = 1.0 / (z * z);
            return (1.0 / 12.0 - w * (1.0 / 360.0 - w / 1260.0)) / z;
        };
        return delta * std::log(x) + (y - 0.5) * std::log1p(delta / x) - delta + (tail(y) - tail(x));
    }
    const double ratio = boost::math::tgamma_delta_ratio(x, delta);
    if (ratio > 0.0 && std::isfinite(ratio)) return -std::log(ratio);
    return log_gamma(y) - log_gamma(x);
}

double digamma(double x) {
    if (!std::isfinite(x)) throw std::domain_error("digamma: non-finite argument");
    return boost::math::digamma(x);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double norm_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double norm_log_sf(double z) {
    if (z < 35.0) return std::log(norm_sf(z));
    // Mills-ratio expansion; the first omitted term is below 1e-13 relative at z = 35.
    const double w = 1.0 / (z * z);
    const double series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
    return -0.5 * z * z - std::log(z) - kLogSqrt2Pi + std::log(series);
}

double norm_upper_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("norm_upper_quantile: q must lie in (0, 1)");
    return kSqrt2 * boost::math::erfc_inv(2.0 * q);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must lie in (0, 1)");
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double norm_upper_quantile_log(double log_q) {
    if (!(log_q < 0.0) || std::isnan(log_q)) {
        throw std::domain_error("norm_upper_quantile_log: log q must be negative");
    }
    if (log_q > std::log(kTinyProbability)) return norm_upper_quantile(std::exp(log_q));

    // Newton on log(1 - Phi(z)) = log_q from the leading asymptotic root.
    const double u = -2.0 * log_q;
    double z = std::sqrt(u - std::log(u) - 2.0 * kLogSqrt2Pi);
    for (int it = 0; it < 50; ++it) {
        const double h = norm_log_sf(z) - log_q;
        const double slope = -std::exp(-0.5 * z * z - kLogSqrt2Pi - norm_log_sf(z));
        const double step = h / slope;
        z -= step;
        if (std::abs(step) <= 1e-15 * z) break;
    }
    return z;
}

double student_t_log_pdf(double t, double k) {
    require_positive_df(k, "student_t_pdf");
    return -0.5 * (k + 1.0) * std::log1p(t * t / k) - 0.5 * std::log(k) - log_beta(0.5, 0.5 * k);
}

double student_t_pdf(double t, double k) { return std::exp(student_t_log_pdf(t, k)); }

double student_t_sf(double t, double k) {
    require_positive_df(k, "student_t_sf");
    if (std::isnan(t)) throw std::domain_error("student_t_sf: NaN argument");
    if (t < 0.0) return 1.0 - student_t_sf(-t, k);
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    if (t2 < k) {
        return 0.5 * boost::math::ibetac(0.5, 0.5 * k, t2 / (k + t2));
    }
    return 0.5 * boost::math::ibeta(0.5 * k, 0.5, k / (k + t2));
}

double student_t_cdf(double t, double k) {
    require_positive_df(k, "student_t_cdf");
    if (t < 0.0) return student_t_sf(-t, k);
    return 1.0 - student_t_sf(t, k);
}

double student_t_log_sf(double t, double k) {
    require_positive_df(k, "student_t_log_sf");
    if (t <= 0.0) return std::log1p(-student_t_sf(-t, k));
    if (std::isinf(t)) return -std::numeric_limits<double>::infinity();
    const double s = student_t_sf(t, k);
    if (s > kTinyProbability) return std::log(s);
    return log_sf_far_tail(t, k);
}

SignedLog double_rising_factorial_log(double a, unsigned r) {
    SignedLog out;
    for (unsigned j = 0; j < r; ++j) {
        const double factor = a + 2.0 * j;
        if (factor == 0.0) return {0, -std::numeric_limits<double>::infinity()};
        if (factor < 0.0) out.sign = -out.sign;
        out.log_abs += std::log(std::abs(factor));
    }
    return out;
}

} // namespace tsparse::specfun

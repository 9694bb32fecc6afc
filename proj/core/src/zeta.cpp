#include "tsparse/zeta.hpp"

#include "detail/log_sum.hpp"
#include "tsparse/errors.hpp"
#include "tsparse/quadrature.hpp"
#include "tsparse/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsparse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": argument must be finite");
}

[[noreturn]] void too_many_terms(const char* who) {
    throw numerical_error(std::string(who) + ": series did not converge within the term cap");
}

// log of the mixture weight ratio zeta_{r+1} / zeta_r = (2r - d) / (2r + 2)
inline double log_weight_step(double r, double d) { return std::log1p(-(d + 2.0) / (2.0 * r + 2.0)); }

// Mixture (1 - rho) + rho * zeta given log zeta, returned as a log.
double log_mixture_factor(double rho, double log_zeta) {
    if (rho == 0.0) return 0.0;
    if (rho == 1.0) return log_zeta;
    return detail::log_add_exp(std::log1p(-rho), std::log(rho) + log_zeta);
}

// log term_r of the zeta_k series from log-gamma ratios (no accumulated
// rounding from the step-by-step recurrence), a = d/2.
double log_zeta_k_term(double r, double a, double kv, double log_q) {
    const double b = 0.5 * (1.0 + kv);
    return std::log(a) - specfun::log_gamma(1.0 - a) - specfun::log_gamma_ratio(r - a, 1.0 + a) +
           specfun::log_gamma_ratio(r + 0.5, b - 0.5) - specfun::log_gamma_ratio(0.5, b - 0.5) + r * log_q;
}

// Remainder sum_{r >= R} term_r of the zeta_k series, given log term_R.
// As a function of real r,
//   term(r) = c Gamma(r - a) / Gamma(r + 1) * Gamma(r + b) / Gamma(r + 1/2) * q^r
// with a = d/2, b = (1 + k)/2. Euler-Maclaurin:
//   sum_{r >= R} term = int_R^inf term + term(R)/2 - term'(R)/12 + O(term''').
// Past a few thousand terms every derivative of log term is O(1/R + k/t^2),
// so the dropped part is far below the series tolerance.
double log_zeta_k_remainder(double R, double log_term_R, double a, double kv, double log_q) {
    const double b = 0.5 * (1.0 + kv);
    const auto log_shape = [=](double r) {
        return -specfun::log_gamma_ratio(r - a, 1.0 + a) + specfun::log_gamma_ratio(r + 0.5, b - 0.5) + r * log_q;
    };
    const auto slope = [=](double r) {
        return specfun::digamma(r - a) - specfun::digamma(r + 1.0) + specfun::digamma(r + b) -
               specfun::digamma(r + 0.5) + log_q;
    };
    const double base = log_shape(R);

    // integrate in v = log(r / R) out to where the integrand is below e^-45
    // of its value at R and falling
    double v_end = std::log(2.0);
    for (;;) {
        const double r = R * std::exp(v_end);
        const double here = log_shape(r) + v_end;
        if (here - base < -45.0 && log_shape(1.01 * r) + v_end + std::log(1.01) < here) break;
        v_end *= 2.0;
        if (v_end > 700.0) throw numerical_error("zeta_k: score too large for the series remainder");
    }
    const auto integrand = [&](double v) {
        const double r = R * std::exp(v);
        return std::exp(log_shape(r) - base + v);
    };
    const quad::QuadratureResult integral = quad::integrate(integrand, 0.0, v_end, {0.0, 1e-13, 20000});
    const double scaled = R * integral.value + 0.5 - slope(R) / 12.0;
    return log_term_R + std::log(scaled);
}

} // namespace

DegreesOfFreedom::DegreesOfFreedom(double k) : k_(k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::domain_error("degrees of freedom must be positive and finite");
    }
}

ModelParams::ModelParams(double rho_, PowerIndex d_, DegreesOfFreedom k_) : rho(rho_), d(d_), k(k_) {
    if (!(rho_ >= 0.0 && rho_ <= 1.0)) throw std::domain_error("sparsity rate rho must lie in [0, 1]");
}

double log_zeta_inf(double y, PowerIndex d, const SeriesOptions& opts) {
    check_finite(y, "zeta_inf");
    if (y == 0.0) return kNegInf;
    const double dv = d.value();
    const double log_y2 = 2.0 * std::log(std::abs(y));
    const double y2 = y * y;

    // term_r = zeta_r y^{2r} / (2r-1)!!
    double log_term = std::log(0.5 * dv) + log_y2;
    detail::LogSum acc;
    for (std::size_t r = 1; r <= opts.max_terms; ++r) {
        acc.add(log_term);
        const double rr = static_cast<double>(r);
        // every later step ratio is below y^2 / (2r + 1)
        const double bound = y2 / (2.0 * rr + 1.0);
        const double log_next = log_term + log_weight_step(rr, dv) + log_y2 - std::log(2.0 * rr + 1.0);
        if (bound < 1.0) {
            const double log_tail = log_next - std::log1p(-bound);
            if (log_tail < std::log(opts.rel_tol) + acc.log_value()) return acc.log_value();
        }
        log_term = log_next;
    }
    too_many_terms("zeta_inf");
}

double zeta_inf(double y, PowerIndex d, const SeriesOptions& opts) {
    return std::exp(log_zeta_inf(y, d, opts));
}

double log_component_density_ratio(double t, DegreesOfFreedom k, std::size_t r) {
    check_finite(t, "component_density_ratio");
    if (r == 0) return 0.0;
    if (t == 0.0) return kNegInf;
    const double kv = k.value();
    const double t2 = t * t;
    const double log_q = -std::log1p(kv / t2); // log t^2 / (k + t^2)
    double out = 0.0;
    for (std::size_t j = 1; j <= r; ++j) {
        out += log_q + std::log1p(kv / (2.0 * static_cast<double>(j) - 1.0));
    }
    return out;
}

double component_density_ratio(double t, DegreesOfFreedom k, std::size_t r) {
    return std::exp(log_component_density_ratio(t, k, r));
}

double log_zeta_k(double t, DegreesOfFreedom k, PowerIndex d, const SeriesOptions& opts) {
    check_finite(t, "zeta_k");
    if (t == 0.0) return kNegInf;
    const double dv = d.value();
    const double kv = k.value();
    const double t2 = t * t;
    const double log_q = -std::log1p(kv / t2);
    const double q = std::exp(log_q);

    // term_r = zeta_r * f_r(t) / f_0(t)
    double log_term = std::log(0.5 * dv) + log_q + std::log1p(kv);
    detail::LogSum acc;
    for (std::size_t r = 1; r <= opts.max_terms; ++r) {
        if (r > opts.direct_terms && r > 1000) {
            return detail::log_add_exp(acc.log_value(),
                                       log_zeta_k_remainder(static_cast<double>(r), log_term, 0.5 * dv, kv, log_q));
        }
        if (r % 256 == 0) log_term = log_zeta_k_term(static_cast<double>(r), 0.5 * dv, kv, log_q);
        acc.add(log_term);
        const double rr = static_cast<double>(r);
        const double growth = kv / (2.0 * rr + 1.0);
        // (2r'-d)/(2r'+2) < 1 and 1 + k/(2r'+1) is decreasing, so every later
        // step ratio is below q (1 + k/(2r+1))
        const double bound = q * (1.0 + growth);
        const double log_next = log_term + log_weight_step(rr, dv) + log_q + std::log1p(growth);
        if (bound < 1.0) {
            const double log_tail = log_next - std::log1p(-bound);
            if (log_tail < std::log(opts.rel_tol) + acc.log_value()) return acc.log_value();
        }
        log_term = log_next;
    }
    too_many_terms("zeta_k");
}

double zeta_k(double t, DegreesOfFreedom k, PowerIndex d, const SeriesOptions& opts) {
    return std::exp(log_zeta_k(t, k, d, opts));
}

double log_component_density(double t, DegreesOfFreedom k, std::size_t r) {
    check_finite(t, "component_density");
    const double kv = k.value();
    const double rr = static_cast<double>(r);
    double log_power = 0.0;
    if (r > 0) {
        if (t == 0.0) return kNegInf;
        log_power = 2.0 * rr * std::log(std::abs(t));
    }
    return log_power - (rr + 0.5 + 0.5 * kv) * std::log1p(t * t / kv) - (rr + 0.5) * std::log(kv) -
           specfun::log_beta(rr + 0.5, 0.5 * kv);
}

double component_density(double t, DegreesOfFreedom k, std::size_t r) {
    return std::exp(log_component_density(t, k, r));
}

double t_mixture_pdf(double t, const ModelParams& params, const SeriesOptions& opts) {
    const double log_f0 = log_component_density(t, params.k, 0);
    if (params.rho == 0.0) return std::exp(log_f0);
    return std::exp(log_f0 + log_mixture_factor(params.rho, log_zeta_k(t, params.k, params.d, opts)));
}

double pit_transform(double t, DegreesOfFreedom k) {
    check_finite(t, "pit_transform");
    if (t == 0.0) return 0.0;
    const double z = specfun::norm_upper_quantile_log(specfun::student_t_log_sf(std::abs(t), k.value()));
    return t < 0.0 ? -z : z;
}

double pit_inverse(double z, DegreesOfFreedom k) {
    check_finite(z, "pit_inverse");
    if (z == 0.0) return 0.0;
    const double kv = k.value();
    const double target = specfun::norm_log_sf(std::abs(z));
    auto residual = [&](double t) { return specfun::student_t_log_sf(t, kv) - target; };

    // residual is strictly decreasing on [0, inf)
    double lo = 0.0;
    double hi = 1.0;
    while (residual(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw numerical_error("pit_inverse: bracket overflow");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-3 * hi) break;
    }
    // Newton polish, kept inside the bracket
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double h = residual(t);
        if (h == 0.0) break;
        if (h > 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        const double slope =
            -std::exp(specfun::student_t_log_pdf(t, kv) - specfun::student_t_log_sf(t, kv));
        double next = t - h / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - t);
        t = next;
        if (step <= 1e-15 * t || hi - lo <= 4e-16 * hi) break;
    }
    return z < 0.0 ? -t : t;
}

double pit_derivative(double t, DegreesOfFreedom k) {
    const double z = pit_transform(t, k);
    return std::exp(specfun::student_t_log_pdf(t, k.value()) + 0.5 * z * z + specfun::kLogSqrt2Pi);
}

double pit_mixture_pdf(double z, const ModelParams& params, const SeriesOptions& opts) {
    check_finite(z, "pit_mixture_pdf");
    const double log_phi = -0.5 * z * z - specfun::kLogSqrt2Pi;
    if (params.rho == 0.0) return std::exp(log_phi);
    const double t = pit_inverse(z, params.k);
    return std::exp(log_phi + log_mixture_factor(params.rho, log_zeta_k(t, params.k, params.d, opts)));
}

double pit_zeta_ratio(double t, DegreesOfFreedom k, PowerIndex d) {
    return std::exp(log_zeta_inf(pit_transform(t, k), d) - log_zeta_k(t, k, d));
}

double same_argument_zeta_ratio(double z, DegreesOfFreedom k, PowerIndex d) {
    return std::exp(log_zeta_inf(z, d) - log_zeta_k(z, k, d));
}

double transformed_argument_zeta_ratio(double z, DegreesOfFreedom k, PowerIndex d) {
    return std::exp(log_zeta_inf(z, d) - log_zeta_k(pit_inverse(z, k), k, d));
}

} // namespace tsparse

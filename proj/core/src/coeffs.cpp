#include "tsparse/coeffs.hpp"

#include "tsparse/errors.hpp"
#include "tsparse/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tsparse {

PowerIndex::PowerIndex(double d) : d_(d) {
    if (!(d > 0.0 && d < 2.0)) {
        throw std::domain_error("power index d must lie in the open interval (0, 2)");
    }
}

double inverse_power_constant(PowerIndex d) {
    const double dv = d.value();
    return dv * std::exp((0.5 * dv - 1.0) * std::numbers::ln2 - specfun::log_gamma(1.0 - 0.5 * dv));
}

double student_scale_rate(double sigma, PowerIndex d) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::domain_error("student_scale_rate: sigma must be positive");
    }
    const double dv = d.value();
    const double log_num = 0.5 * dv * std::log(dv) + specfun::log_gamma(0.5 * (dv + 1.0));
    const double log_den = std::log(inverse_power_constant(d)) + 0.5 * std::log(std::numbers::pi) +
                           specfun::log_gamma(0.5 * dv);
    return std::exp(log_num - log_den + dv * std::log(sigma));
}

double rescale_rate(double rho, double m, PowerIndex d) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rescale_rate: rho must lie in [0, 1]");
    if (!(m >= 1.0) || !std::isfinite(m)) throw std::domain_error("rescale_rate: m must be >= 1");
    const double out = rho * std::pow(m, d.half());
    if (out > 1.0) {
        throw regime_error("rescaled sparsity rate exceeds one; sparse approximation is invalid");
    }
    return out;
}

double log_mixture_coefficient(PowerIndex d, std::size_t r) {
    if (r == 0) throw std::domain_error("mixture coefficients are indexed from r = 1");
    // zeta_r = a Gamma(r - a) / (Gamma(1 - a) r!), a = d/2
    const double a = d.half();
    const double rr = static_cast<double>(r);
    return std::log(a) + specfun::log_gamma_ratio(rr + 1.0, -1.0 - a) - specfun::log_gamma(1.0 - a);
}

double mixture_tail_mass(PowerIndex d, std::size_t R) {
    const double a = d.half();
    const double rr = static_cast<double>(R);
    return std::exp(specfun::log_gamma_ratio(rr + 1.0, -a) - specfun::log_gamma(1.0 - a));
}

CoefficientTable::CoefficientTable(PowerIndex d, std::size_t count)
    : d_(d), tail_mass_(mixture_tail_mass(d, count)) {
    if (count == 0) throw std::domain_error("coefficient table needs at least one term");
    weights_.reserve(count);
    const double dv = d.value();
    double w = 0.5 * dv;
    for (std::size_t r = 1; r <= count; ++r) {
        weights_.push_back(w);
        const double rr = static_cast<double>(r);
        w *= (2.0 * rr - dv) / (2.0 * rr + 2.0);
    }
}

CoefficientTable mixture_coefficients(PowerIndex d, std::size_t count) {
    return CoefficientTable(d, count);
}

} // namespace tsparse

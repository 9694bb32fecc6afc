#include "tsparse/oracle.hpp"

#include "tsparse/errors.hpp"
#include "tsparse/specfun.hpp"
#include "tsparse/twogroups.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace tsparse::oracle {

namespace {

using quad::QuadratureOptions;

constexpr double kPi = std::numbers::pi;

QuadratureResult add(QuadratureResult a, const QuadratureResult& b) {
    a.value += b.value;
    a.abs_error_estimate += b.abs_error_estimate;
    a.subdivisions += b.subdivisions;
    return a;
}

// int_0^inf (cosh(xy) - 1) exp(-x^2/2) C_d x^{-d-1} dx for y >= 0, times phi(y)
// when times_phi is set. (cosh(xy) - 1) exp(-x^2/2) = exp(xy - x^2/2) (1 - exp(-xy))^2 / 2,
// and with the phi(y) factor the exponent is formed as -(x-y)^2/2 directly.
// The integrand peaks near x = y with unit width; for y >= 2 the range is
// split around the peak so that it cannot be stepped over.
QuadratureResult half_cosh_integral(double y, PowerIndex d, bool times_phi, double rel_tol) {
    const double dv = d.value();
    const double log_c = std::log(0.5 * inverse_power_constant(d)) - (times_phi ? specfun::kLogSqrt2Pi : 0.0);
    const auto f = [=](double x) {
        if (x <= 0.0) return 0.0;
        const double xy = x * y;
        if (xy == 0.0) return 0.0;
        const double gauss = times_phi ? -0.5 * (x - y) * (x - y) : xy - 0.5 * x * x;
        return std::exp(log_c - (dv + 1.0) * std::log(x) + 2.0 * std::log(-std::expm1(-xy)) + gauss);
    };
    const double p0 = quad::origin_power(1.0 - dv);
    if (y < 2.0) {
        return quad::integrate_from(f, 0.0, p0, QuadratureOptions{1e-300, rel_tol, 20000});
    }

    const double lo = std::max(0.5 * y, y - 40.0);
    const double hi = y + 40.0;
    QuadratureResult peak = quad::integrate(f, lo, hi, QuadratureOptions{1e-300, rel_tol, 20000});
    const QuadratureOptions rest{1e-14 * std::abs(peak.value), rel_tol, 20000};

    // [0, y/2] with x = (y/2) w^p to smooth the origin
    const double half = 0.5 * y;
    const auto origin = [&](double w) {
        if (w <= 0.0) return 0.0;
        return f(half * std::pow(w, p0)) * half * p0 * std::pow(w, p0 - 1.0);
    };
    QuadratureResult total = add(peak, quad::integrate(origin, 0.0, 1.0, rest));
    if (lo > half) total = add(total, quad::integrate(f, half, lo, rest));
    return add(total, quad::integrate_from(f, hi, 1.0, rest));
}

double student_t_scale_density(double d, double sigma, double x) {
    return specfun::student_t_pdf(x / sigma, d) / sigma;
}

double cauchy_density(double sigma, double x) { return sigma / (kPi * (x * x + sigma * sigma)); }

} // namespace

double family_density(const ScaleFamily& family, double sigma, double x) {
    switch (family.kind) {
    case ScaleFamily::Kind::student: return student_t_scale_density(family.d, sigma, x);
    case ScaleFamily::Kind::cauchy: return cauchy_density(sigma, x);
    case ScaleFamily::Kind::spike_slab: return 0.2 * cauchy_density(sigma, x);
    }
    return 0.0;
}

QuadratureResult sparsity_rate_quadrature(const ScaleFamily& family, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("sparsity_rate_quadrature: sigma must be positive");
    const double tail_index = family.kind == ScaleFamily::Kind::student ? family.d : 1.0;
    // x = sigma s; the atom at zero contributes nothing to the weighted integral
    const auto f = [&](double s) {
        const double x = sigma * s;
        return -std::expm1(-0.5 * x * x) * family_density(family, sigma, x) * sigma;
    };
    auto r = quad::integrate_from(f, 0.0, std::max(1.0, 2.0 / tail_index), QuadratureOptions{5e-11, 1e-12, 20000});
    r.value *= 2.0;
    r.abs_error_estimate *= 2.0;
    return r;
}

QuadratureResult exceedance_normalization(PowerIndex d) {
    const double dv = d.value();
    const double c = inverse_power_constant(d);
    const auto f = [=](double x) { return -std::expm1(-0.5 * x * x) * c * std::pow(x, -dv - 1.0); };
    const double p = std::max(quad::origin_power(1.0 - dv), 2.0 / dv);
    auto r = quad::integrate_from(f, 0.0, p, QuadratureOptions{1e-12, 1e-12, 20000});
    r.value *= 2.0;
    r.abs_error_estimate *= 2.0;
    return r;
}

QuadratureResult zeta_quadrature(double y, PowerIndex d) {
    if (!std::isfinite(y)) throw std::domain_error("zeta_quadrature: y must be finite");
    if (y == 0.0) return {};
    auto r = half_cosh_integral(std::abs(y), d, false, 1e-12);
    r.value *= 2.0;
    r.abs_error_estimate *= 2.0;
    return r;
}

QuadratureResult psi_quadrature(double y, PowerIndex d) {
    if (!std::isfinite(y)) throw std::domain_error("psi_quadrature: y must be finite");
    if (y == 0.0) return {};
    auto r = half_cosh_integral(std::abs(y), d, true, 1e-12);
    r.value *= 2.0;
    r.abs_error_estimate *= 2.0;
    return r;
}

QuadratureResult zeta_normalization_quadrature(PowerIndex d) {
    // psi(y) = C_d y^{-1-d} (1 + (d+1)(d+2) / (2 y^2) + O(y^-4)) beyond the cut
    const double dv = d.value();
    const double cut = 2000.0;
    const auto psi = [&](double y) { return psi_quadrature(y, d).value; };
    auto r = quad::integrate(psi, 0.0, cut, QuadratureOptions{1e-11, 1e-11, 20000});
    const double tail = inverse_power_constant(d) *
                        (std::pow(cut, -dv) / dv + 0.5 * (dv + 1.0) * std::pow(cut, -dv - 2.0));
    r.value = 2.0 * (r.value + tail);
    r.abs_error_estimate *= 2.0;
    return r;
}

QuadratureResult coefficient_quadrature(PowerIndex d, std::size_t r) {
    if (r == 0) throw std::domain_error("coefficient_quadrature: r must be positive");
    const double dv = d.value();
    const double rr = static_cast<double>(r);
    const double exponent = 2.0 * rr - 1.0 - dv;
    // scale out the peak value of x^e exp(-x^2/2) at x = sqrt(e) for e > 0
    const double x_peak = exponent > 0.0 ? std::sqrt(exponent) : 1.0;
    const double log_scale = exponent * std::log(x_peak) - 0.5 * x_peak * x_peak;
    const auto f = [=](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp(exponent * std::log(x) - 0.5 * x * x - log_scale);
    };
    auto q = quad::integrate_from(f, 0.0, quad::origin_power(exponent), QuadratureOptions{1e-300, 1e-13, 20000});
    // log of (1*3*...*(2r-1)) / (2r)!
    const double log_odd_factorial = specfun::log_gamma(2.0 * rr + 1.0) - rr * std::log(2.0) -
                                     specfun::log_gamma(rr + 1.0);
    const double log_factor = log_odd_factorial - specfun::log_gamma(2.0 * rr + 1.0) + log_scale +
                              std::log(2.0 * inverse_power_constant(d));
    const double factor = std::exp(log_factor);
    return {q.value * factor, q.abs_error_estimate * factor, q.subdivisions};
}

QuadratureResult zeta_k_quadrature(double t, DegreesOfFreedom k, PowerIndex d) {
    if (t == 0.0) return {};
    const double kv = k.value();
    const double log_norm = -0.5 * kv * std::log(2.0) - specfun::log_gamma(0.5 * kv);
    // density of s = sqrt(chi^2_k / k)
    const auto log_s_density = [=](double s) {
        const double w = kv * s * s;
        return std::log(2.0 * kv * s) + (0.5 * kv - 1.0) * std::log(w) - 0.5 * w + log_norm;
    };
    const auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double ls = log_s_density(s);
        if (ls < -745.0) return 0.0;
        return psi_quadrature(t * s, d).value * s * std::exp(ls);
    };
    auto q = quad::integrate_from(integrand, 0.0, 1.0, QuadratureOptions{1e-300, 1e-10, 20000});
    const double f0 = specfun::student_t_pdf(t, kv);
    return {q.value / f0, q.abs_error_estimate / f0, q.subdivisions};
}

QuadratureResult component_density_mass(DegreesOfFreedom k, std::size_t r) {
    const auto f = [&](double t) { return component_density(t, k, r); };
    auto q = quad::integrate_from(f, 0.0, std::max(1.0, 2.0 / k.value()), QuadratureOptions{1e-12, 1e-12, 20000});
    q.value *= 2.0;
    q.abs_error_estimate *= 2.0;
    return q;
}

CdfTable::CdfTable(const std::function<double(double)>& density, double scale, std::size_t cells)
    : scale_(scale), cumulative_(cells + 1, 0.0) {
    const double half_pi = 0.5 * kPi;
    const auto g = [&](double u) {
        const double c = std::cos(half_pi * u);
        if (c <= 0.0) return 0.0;
        const double t = scale * std::tan(half_pi * u);
        const double f = density(t);
        return f == 0.0 ? 0.0 : f * scale * half_pi / (c * c);
    };
    const double width = 2.0 / static_cast<double>(cells);
    double acc = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
        const double a = -1.0 + width * static_cast<double>(j);
        acc += quad::gauss_kronrod15(g, a, a + width).value;
        cumulative_[j + 1] = acc;
    }
    mass_ = acc;
    for (double& c : cumulative_) c /= mass_;
}

double CdfTable::operator()(double t) const {
    if (std::isinf(t)) return t < 0.0 ? 0.0 : 1.0;
    const double u = 2.0 / kPi * std::atan(t / scale_);
    const double cells = static_cast<double>(cumulative_.size() - 1);
    const double pos = std::clamp(0.5 * (u + 1.0) * cells, 0.0, cells);
    const auto j = std::min(static_cast<std::size_t>(pos), cumulative_.size() - 2);
    const double frac = pos - static_cast<double>(j);
    return cumulative_[j] + frac * (cumulative_[j + 1] - cumulative_[j]);
}

double ks_statistic(std::vector<double>& samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

MonteCarloResult component_mc(std::size_t r, DegreesOfFreedom k, std::size_t n, std::uint64_t seed) {
    if (n < 1000) throw std::domain_error("component_mc: need at least 1000 samples");
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(std::lround(k.value() * 1000.0))};
    std::mt19937_64 rng(seq);
    std::chi_squared_distribution<double> numerator(2.0 * static_cast<double>(r) + 1.0);
    std::chi_squared_distribution<double> denominator(k.value());
    std::uniform_int_distribution<int> sign(0, 1);

    MonteCarloResult out;
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x1 = std::sqrt(numerator(rng));
        if (sign(rng)) x1 = -x1;
        out.samples.push_back(x1 * std::sqrt(k.value() / denominator(rng)));
    }
    const CdfTable cdf([&](double t) { return component_density(t, k, r); },
                       std::sqrt(2.0 * static_cast<double>(r) + 1.0));
    out.cdf_mass = cdf.mass();
    std::vector<double> sorted = out.samples;
    out.ks = ks_statistic(sorted, [&](double t) { return cdf(t); });
    return out;
}

double sparse_approximation_tv(double sigma, const std::function<double(double)>& log_zeta_inf) {
    const double rho = sigma * std::sqrt(2.0 / kPi);
    // exact density: (1/pi) int phi(y - sigma tan(theta)) dtheta
    const auto exact = [&](double y) {
        const auto f = [&](double theta) { return specfun::norm_pdf(y - sigma * std::tan(theta)); };
        const double cuts[] = {-0.5 * kPi, std::atan((y - 10.0) / sigma), std::atan(y / sigma),
                               std::atan((y + 10.0) / sigma), 0.5 * kPi};
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            total += quad::integrate(f, cuts[i], cuts[i + 1], QuadratureOptions{1e-15, 1e-12, 20000}).value;
        }
        return total / kPi;
    };
    const auto gap = [&](double y) {
        const double log_phi = -0.5 * y * y - specfun::kLogSqrt2Pi;
        const double approx = (1.0 - rho) * std::exp(log_phi) +
                              (y == 0.0 ? 0.0 : rho * std::exp(log_phi + log_zeta_inf(y)));
        return std::abs(exact(y) - approx);
    };
    const QuadratureOptions opts{1e-11, 1e-8, 20000};
    // symmetric in y, so TV = 1/2 int_R |.| = int_0^inf |.|. Both densities are
    // sigma / (pi y^2) to leading order, so the gap past y = 400 is O(sigma 400^-3).
    return quad::integrate(gap, 0.0, 40.0, opts).value + quad::integrate(gap, 40.0, 400.0, opts).value;
}

} // namespace tsparse::oracle

namespace tsparse::oracle {

MixtureCdf::MixtureCdf(PowerIndex d, DegreesOfFreedom k, double scale, std::size_t cells)
    : d_(d), k_(k), scale_(scale), table_(cells + 1, 1.0) {
    table_[0] = 0.0;
    for (std::size_t j = 1; j < cells; ++j) {
        table_[j] = abs_cdf(scale * std::tan(0.5 * kPi * static_cast<double>(j) / static_cast<double>(cells)));
    }
}

double MixtureCdf::abs_cdf(double t) const {
    t = std::abs(t);
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    const double kv = k_.value();
    const double b = 0.5 * kv;
    const double x = t * t / (kv + t * t);
    const double log_x = std::log(x);
    const double log_1mx = std::log1p(-x);

    // I_x(a + 1, b) = I_x(a, b) - x^a (1-x)^b Gamma(a+b) / (Gamma(a+1) Gamma(b))
    double a = 1.5;
    double incomplete = boost::math::ibeta(a, b, x);
    double log_step = a * log_x + b * log_1mx + std::lgamma(a + b) - std::lgamma(a + 1.0) - std::lgamma(b);
    const double dv = d_.value();
    double weight = 0.5 * dv;
    double total = 0.0;
    double weight_left = 1.0;
    for (std::size_t r = 1;; ++r) {
        total += weight * incomplete;
        weight_left -= weight;
        // the weights still to come sum to at most weight_left and each
        // multiplies something no larger than the current incomplete value
        if (incomplete * weight_left < 1e-15 || incomplete <= 0.0) break;
        incomplete = std::max(0.0, incomplete - std::exp(log_step));
        log_step += log_x + std::log((a + b) / (a + 1.0));
        a += 1.0;
        const double rr = static_cast<double>(r);
        weight *= (2.0 * rr - dv) / (2.0 * rr + 2.0);
    }
    return total;
}

double MixtureCdf::operator()(double t) const {
    if (std::isinf(t)) return t < 0.0 ? 0.0 : 1.0;
    const double cells = static_cast<double>(table_.size() - 1);
    const double pos = std::min(2.0 / kPi * std::atan(std::abs(t) / scale_) * cells, cells);
    const auto j = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
    const double frac = pos - static_cast<double>(j);
    const double inside = table_[j] + frac * (table_[j + 1] - table_[j]);
    return t < 0.0 ? 0.5 * (1.0 - inside) : 0.5 * (1.0 + inside);
}

double panel_mc_ks(PowerIndex d, DegreesOfFreedom k, std::size_t n, std::uint64_t seed) {
    SimulatedPanel panel = simulate_panel(ModelParams(1.0, d, k), n, seed);
    const MixtureCdf cdf(d, k);
    return ks_statistic(panel.scores, [&](double t) { return cdf(t); });
}

} // namespace tsparse::oracle

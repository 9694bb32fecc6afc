#include "tsparse/twogroups.hpp"

#include "detail/log_sum.hpp"
#include "tsparse/errors.hpp"
#include "tsparse/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsparse {

namespace {

constexpr std::size_t kChunkSize = 4096;

// log P(X > n) for the Sibuya(a) law: Gamma(n+1-a) / (Gamma(1-a) Gamma(n+1)).
double sibuya_log_survival(double n, double a) {
    return specfun::log_gamma(n + 1.0 - a) - specfun::log_gamma(1.0 - a) - specfun::log_gamma(n + 1.0);
}

} // namespace

const char* to_string(NullKind kind) { return kind == NullKind::t ? "t" : "z"; }

double lfdr_from_log_zeta(double rho, double log_zeta) {
    if (rho == 0.0) return 1.0;
    if (rho == 1.0) return log_zeta == -std::numeric_limits<double>::infinity() ? 1.0 : 0.0;
    // 1 / (1 + exp(log odds))
    const double log_odds = std::log(rho) - std::log1p(-rho) + log_zeta;
    if (log_odds > 0.0) {
        const double e = std::exp(-log_odds);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(log_odds));
}

double lfdr_t(double t, const ModelParams& params, const SeriesOptions& opts) {
    if (params.rho == 0.0) return 1.0;
    return lfdr_from_log_zeta(params.rho, log_zeta_k(t, params.k, params.d, opts));
}

double lfdr_z(double z, double rho, PowerIndex d, const SeriesOptions& opts) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("lfdr_z: rho must lie in [0, 1]");
    if (rho == 0.0) return 1.0;
    return lfdr_from_log_zeta(rho, log_zeta_inf(z, d, opts));
}

double posterior_odds(double score, const ModelParams& params, NullKind null_kind,
                      const SeriesOptions& opts) {
    if (params.rho == 1.0) throw regime_error("posterior odds are unbounded at rho = 1");
    if (params.rho == 0.0) return 0.0;
    const double log_zeta = null_kind == NullKind::t ? log_zeta_k(score, params.k, params.d, opts)
                                                     : log_zeta_inf(score, params.d, opts);
    return std::exp(std::log(params.rho) - std::log1p(-params.rho) + log_zeta);
}

double sample_mixture_index(PowerIndex d, std::mt19937_64& rng) {
    const double a = d.half();
    // U in (0, 1]; smallest n with P(X > n) < U
    const double u = 1.0 - std::generate_canonical<double, 64>(rng);
    const double log_u = std::log(u);
    if (sibuya_log_survival(1.0, a) < log_u) return 1.0;

    // P(X > n) ~ n^{-a} / Gamma(1-a); bracket around the asymptotic inverse
    const double guess = std::exp(-(log_u + specfun::log_gamma(1.0 - a)) / a);
    double lo = 1.0; // survival(lo) >= u
    double hi = std::max(2.0, std::ceil(guess));
    while (!(sibuya_log_survival(hi, a) < log_u)) {
        lo = hi;
        hi *= 2.0;
    }
    if (hi > 0x1p52) {
        // beyond exact integer resolution the law is effectively continuous
        while (hi - lo > 1e-12 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (sibuya_log_survival(mid, a) < log_u) hi = mid; else lo = mid;
        }
        return std::ceil(hi);
    }
    while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        if (sibuya_log_survival(mid, a) < log_u) hi = mid; else lo = mid;
    }
    return hi;
}

double sample_component(double r, DegreesOfFreedom k, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    double y;
    if (r == 0.0) {
        y = normal(rng);
    } else {
        // Y^2 ~ chi^2_{2r+1} = 2 Gamma(r + 1/2, 1)
        std::gamma_distribution<double> gamma(r + 0.5, 1.0);
        std::bernoulli_distribution coin(0.5);
        y = std::sqrt(2.0 * gamma(rng));
        if (coin(rng)) y = -y;
    }
    std::chi_squared_distribution<double> chi2(k.value());
    const double s = std::sqrt(chi2(rng) / k.value());
    return y / s;
}

std::mt19937_64 derived_generator(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x7453u};
    return std::mt19937_64(seq);
}

SimulatedPanel simulate_panel(const ModelParams& params, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::domain_error("simulate_panel: n must be positive");
    SimulatedPanel out;
    out.df = params.k.value();
    out.scores.resize(n);
    out.non_null.resize(n);
    for (std::size_t start = 0, chunk = 0; start < n; start += kChunkSize, ++chunk) {
        auto rng = derived_generator(seed, chunk);
        std::bernoulli_distribution active(params.rho);
        const std::size_t stop = std::min(n, start + kChunkSize);
        for (std::size_t i = start; i < stop; ++i) {
            const bool h = active(rng);
            const double r = h ? sample_mixture_index(params.d, rng) : 0.0;
            out.non_null[i] = h ? 1 : 0;
            out.scores[i] = sample_component(r, params.k, rng);
        }
    }
    return out;
}

} // namespace tsparse

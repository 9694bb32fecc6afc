#pragma once

// Two-groups model: latent H ~ Bernoulli(rho), score | H drawn from the null
// (f_0 or phi) or the non-null component (null density times zeta).

#include "tsparse/zeta.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tsparse {

enum class NullKind { t, z };

const char* to_string(NullKind kind);

/// lfdr under the Student-t null: (1-rho) / (1 - rho + rho zeta_k(t)).
double lfdr_t(double t, const ModelParams& params, const SeriesOptions& opts = {});

/// lfdr under the Gaussian null: (1-rho) / (1 - rho + rho zeta_inf(z)).
double lfdr_z(double z, double rho, PowerIndex d, const SeriesOptions& opts = {});

/// lfdr from a precomputed log zeta value.
double lfdr_from_log_zeta(double rho, double log_zeta);

/// rho / (1 - rho) * zeta(score), with zeta chosen by the null kind.
/// Throws regime_error at rho = 1, where the odds are unbounded.
double posterior_odds(double score, const ModelParams& params, NullKind null_kind,
                      const SeriesOptions& opts = {});

/// Simulated t-scores with the latent labels kept for checking.
struct SimulatedPanel {
    std::vector<double> scores;
    std::vector<std::uint8_t> non_null; // H_i
    double df = 0.0;
};

/// Draw r from the mixture weights zeta_{d,r} (Sibuya law with parameter d/2).
/// Returned as a double because the law is heavy tailed and draws can exceed 2^64.
double sample_mixture_index(PowerIndex d, std::mt19937_64& rng);

/// One draw from f_r: T = Y / s with Y = +/- sqrt(chi^2_{2r+1}) and s^2 ~ chi^2_k / k.
double sample_component(double r, DegreesOfFreedom k, std::mt19937_64& rng);

/// n independent scores from the two-groups t-model. Output depends only on
/// (params, n, seed): scores are generated in fixed-size chunks, each chunk
/// seeded from (seed, chunk index).
SimulatedPanel simulate_panel(const ModelParams& params, std::size_t n, std::uint64_t seed);

/// Generator for a chunk/stream derived from a base seed.
std::mt19937_64 derived_generator(std::uint64_t seed, std::uint64_t stream);

} // namespace tsparse

#pragma once

// Maximum likelihood for (rho, d) in the two-groups model, with the
// log-likelihood measured relative to the null model rho = 0:
//
//   l(rho, d) = sum_i log(1 + rho (zeta(x_i) - 1)),
//
// zeta = zeta_k on t-scores or zeta_inf on z-scores. For fixed d the
// profile in rho is strictly concave, so rho-hat is a single root.

#include "tsparse/panel.hpp"
#include "tsparse/twogroups.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tsparse {

struct FitResult {
    double rho_hat = 0.0;
    double d_hat = 1.0;
    bool d_estimated = false;
    double loglik_rel_null = 0.0; // nats
    NullKind null_kind = NullKind::t;
    int iterations = 0;
    bool converged = true;
    std::size_t n_sites = 0;
    double df = 0.0;
};

struct ProfileResult {
    double rho_hat = 0.0;
    double loglik = 0.0;
    int iterations = 0;
};

struct FitOptions {
    double grid_lo = 0.05;
    double grid_hi = 1.95;
    double grid_step = 0.05;
    double d_tol = 1e-4;
    int max_iterations = 200;
    SeriesOptions series{};
};

/// log zeta(x_i) for every score; zeta_k when kind == t (k required), zeta_inf otherwise.
std::vector<double> log_zeta_values(std::span<const double> scores, NullKind kind,
                                    std::optional<DegreesOfFreedom> k, PowerIndex d,
                                    const SeriesOptions& opts = {});

/// sum_i log((1 - rho) + rho zeta_i) from cached log zeta values.
double loglik_from_log_zeta(std::span<const double> log_zeta, double rho);

/// Relative log-likelihood of the panel at (rho, d).
double loglik(ScorePanel& panel, double rho, PowerIndex d, NullKind kind, const SeriesOptions& opts = {});

/// argmax over rho in [0, 1] for cached log zeta values.
ProfileResult profile_rho(std::span<const double> log_zeta);

ProfileResult profile_rho(ScorePanel& panel, PowerIndex d, NullKind kind, const SeriesOptions& opts = {});

/// Fit on raw scores. For kind == t the scores are t-scores and k is required;
/// for kind == z they are z-scores. fixed_d = nullopt estimates d.
FitResult fit_ml(std::span<const double> scores, NullKind kind, std::optional<DegreesOfFreedom> k,
                 std::optional<PowerIndex> fixed_d, const FitOptions& opts = {});

FitResult fit_ml(ScorePanel& panel, NullKind kind, std::optional<PowerIndex> fixed_d,
                 const FitOptions& opts = {});

} // namespace tsparse

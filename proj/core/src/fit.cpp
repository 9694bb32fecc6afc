#include "tsparse/fit.hpp"

#include "detail/log_sum.hpp"
#include "tsparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tsparse {

namespace {

constexpr double kLogHuge = 700.0; // exp() beyond this is treated as infinite

// d/drho log((1-rho) + rho zeta) = (zeta - 1) / (1 + rho (zeta - 1)), and minus its square.
struct ScoreTerms {
    double score = 0.0;
    double curvature = 0.0;
};

ScoreTerms score_at(std::span<const double> log_zeta, double rho) {
    ScoreTerms out;
    for (double lz : log_zeta) {
        double term;
        if (lz > kLogHuge) {
            term = 1.0 / rho;
        } else {
            const double w = std::expm1(lz);
            term = w / (1.0 + rho * w);
        }
        out.score += term;
        out.curvature -= term * term;
    }
    return out;
}

void require_nonempty(std::span<const double> scores) {
    if (scores.empty()) throw input_error("cannot fit an empty score panel");
    for (double s : scores) {
        if (!std::isfinite(s)) throw input_error("score panel contains a non-finite score");
    }
}

class ProfileCache {
public:
    ProfileCache(std::span<const double> scores, NullKind kind, std::optional<DegreesOfFreedom> k,
                 const SeriesOptions& series)
        : scores_(scores), kind_(kind), k_(k), series_(series) {}

    ProfileResult at(double d) {
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        const auto lz = log_zeta_values(scores_, kind_, k_, PowerIndex(d), series_);
        return cache_.emplace(d, profile_rho(lz)).first->second;
    }

private:
    std::span<const double> scores_;
    NullKind kind_;
    std::optional<DegreesOfFreedom> k_;
    SeriesOptions series_;
    std::map<double, ProfileResult> cache_;
};

struct Refined {
    double d;
    ProfileResult profile;
    int iterations;
    bool converged;
};

// Golden-section maximization of the profile log-likelihood over [lo, hi].
Refined golden_section(ProfileCache& cache, double lo, double hi, const FitOptions& opts) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = cache.at(x1).loglik;
    double f2 = cache.at(x2).loglik;
    int it = 0;
    while (hi - lo > opts.d_tol && it < opts.max_iterations) {
        ++it;
        // ties move toward smaller d
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = cache.at(x1).loglik;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = cache.at(x2).loglik;
        }
    }
    const bool converged = hi - lo <= opts.d_tol;
    const double d = f1 >= f2 ? x1 : x2;
    return {d, cache.at(d), it, converged};
}

} // namespace

std::vector<double> log_zeta_values(std::span<const double> scores, NullKind kind,
                                    std::optional<DegreesOfFreedom> k, PowerIndex d,
                                    const SeriesOptions& opts) {
    if (kind == NullKind::t && !k) throw std::invalid_argument("t-null requires degrees of freedom");
    std::vector<double> out;
    out.reserve(scores.size());
    for (double s : scores) {
        out.push_back(kind == NullKind::t ? log_zeta_k(s, *k, d, opts) : log_zeta_inf(s, d, opts));
    }
    return out;
}

double loglik_from_log_zeta(std::span<const double> log_zeta, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("loglik: rho must lie in [0, 1]");
    if (rho == 0.0) return 0.0;
    const double log_null = std::log1p(-rho);
    const double log_rho = std::log(rho);
    double total = 0.0;
    for (double lz : log_zeta) {
        total += rho == 1.0 ? lz : detail::log_add_exp(log_null, log_rho + lz);
    }
    return total;
}

double loglik(ScorePanel& panel, double rho, PowerIndex d, NullKind kind, const SeriesOptions& opts) {
    const std::span<const double> scores = kind == NullKind::t ? std::span<const double>(panel.t)
                                                               : panel.z_scores();
    require_nonempty(scores);
    return loglik_from_log_zeta(log_zeta_values(scores, kind, panel.df, d, opts), rho);
}

ProfileResult profile_rho(std::span<const double> log_zeta) {
    const double n = static_cast<double>(log_zeta.size());
    const double tol = 1e-10 * std::max(1.0, n);

    // S(0) = sum (zeta_i - 1); decreasing likelihood from the null
    double s0 = 0.0;
    for (double lz : log_zeta) s0 += lz > kLogHuge ? std::numeric_limits<double>::infinity() : std::expm1(lz);
    if (!(s0 > 0.0)) return {0.0, 0.0, 0};

    // S(1) = sum (1 - 1/zeta_i); -inf when any zeta_i = 0
    double s1 = 0.0;
    for (double lz : log_zeta) s1 += -std::expm1(-lz);
    if (s1 >= 0.0) return {1.0, loglik_from_log_zeta(log_zeta, 1.0), 0};

    // safeguarded Newton on the decreasing score S(rho) over (0, 1)
    double lo = 0.0;
    double hi = 1.0;
    double rho = 0.5 * std::min(1.0, s0 / n);
    if (!(rho > 0.0)) rho = 1e-12;
    int it = 0;
    for (; it < 500; ++it) {
        const ScoreTerms st = score_at(log_zeta, rho);
        if (std::abs(st.score) <= tol) break;
        if (st.score > 0.0) lo = rho; else hi = rho;
        double next = rho - st.score / st.curvature;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4e-16 * hi) break;
        rho = next;
    }
    return {rho, loglik_from_log_zeta(log_zeta, rho), it};
}

ProfileResult profile_rho(ScorePanel& panel, PowerIndex d, NullKind kind, const SeriesOptions& opts) {
    const std::span<const double> scores = kind == NullKind::t ? std::span<const double>(panel.t)
                                                               : panel.z_scores();
    require_nonempty(scores);
    return profile_rho(log_zeta_values(scores, kind, panel.df, d, opts));
}

FitResult fit_ml(std::span<const double> scores, NullKind kind, std::optional<DegreesOfFreedom> k,
                 std::optional<PowerIndex> fixed_d, const FitOptions& opts) {
    require_nonempty(scores);
    FitResult out;
    out.null_kind = kind;
    out.n_sites = scores.size();
    out.df = k ? k->value() : 0.0;

    ProfileCache cache(scores, kind, k, opts.series);
    if (fixed_d) {
        const ProfileResult p = cache.at(fixed_d->value());
        out.rho_hat = p.rho_hat;
        out.d_hat = fixed_d->value();
        out.loglik_rel_null = p.loglik;
        out.iterations = p.iterations;
        return out;
    }

    out.d_estimated = true;
    std::vector<double> grid;
    const auto steps = static_cast<int>(std::lround((opts.grid_hi - opts.grid_lo) / opts.grid_step));
    for (int i = 0; i <= steps; ++i) grid.push_back(opts.grid_lo + i * opts.grid_step);
    std::vector<double> ll;
    for (double d : grid) ll.push_back(cache.at(d).loglik);

    std::vector<Refined> candidates;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool left_ok = i == 0 || ll[i] > ll[i - 1];
        const bool right_ok = i + 1 == grid.size() || ll[i] >= ll[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = i == 0 ? grid[i] : grid[i - 1];
        const double hi = i + 1 == grid.size() ? grid[i] : grid[i + 1];
        Refined r = golden_section(cache, lo, hi, opts);
        // the grid point itself may beat the refined interior point on a flat profile
        if (ll[i] > r.profile.loglik) r = {grid[i], cache.at(grid[i]), r.iterations, r.converged};
        candidates.push_back(r);
    }

    const auto best = std::max_element(candidates.begin(), candidates.end(),
                                       [](const Refined& a, const Refined& b) {
                                           if (a.profile.loglik != b.profile.loglik) {
                                               return a.profile.loglik < b.profile.loglik;
                                           }
                                           return a.d > b.d;
                                       });
    out.rho_hat = best->profile.rho_hat;
    out.d_hat = best->d;
    out.loglik_rel_null = best->profile.loglik;
    out.converged = std::all_of(candidates.begin(), candidates.end(), [](const Refined& r) { return r.converged; });
    for (const auto& c : candidates) out.iterations += c.iterations;
    return out;
}

FitResult fit_ml(ScorePanel& panel, NullKind kind, std::optional<PowerIndex> fixed_d, const FitOptions& opts) {
    if (kind == NullKind::t) return fit_ml(panel.t, kind, panel.df, fixed_d, opts);
    FitResult out = fit_ml(panel.z_scores(), kind, std::nullopt, fixed_d, opts);
    out.df = panel.df.value();
    return out;
}

} // namespace tsparse

#pragma once

// Inverse-power exceedance measures H_d(dx) = C_d |x|^{-d-1} dx and the
// mixture weights zeta_{d,r} = -(-d)(-d+2)...(-d+2(r-1)) / (2^r r!).
//
// The weights are the probabilities of the Sibuya distribution with
// parameter a = d/2 (probability generating function 1 - (1-t)^a), so
// they are positive, sum to one, and decay like r^{-1-d/2}.

#include <cstddef>
#include <span>
#include <vector>

namespace tsparse {

/// Tail exponent d of an inverse-power exceedance measure, 0 < d < 2.
class PowerIndex {
public:
    explicit PowerIndex(double d);

    double value() const noexcept { return d_; }
    /// Sibuya parameter d/2.
    double half() const noexcept { return 0.5 * d_; }

    friend bool operator==(PowerIndex, PowerIndex) = default;

private:
    double d_;
};

/// C_d = d 2^{d/2-1} / Gamma(1 - d/2), the constant that normalizes H_d.
double inverse_power_constant(PowerIndex d);

/// First-order sparsity rate of the Student-t_d scale family at scale sigma.
double student_scale_rate(double sigma, PowerIndex d);

/// rho_m = rho m^{d/2}; throws regime_error if the result exceeds one.
double rescale_rate(double rho, double m, PowerIndex d);

/// log zeta_{d,r} for r >= 1.
double log_mixture_coefficient(PowerIndex d, std::size_t r);

/// Exact tail mass sum_{r > R} zeta_{d,r} = Gamma(R+1-d/2) / (Gamma(1-d/2) R!).
double mixture_tail_mass(PowerIndex d, std::size_t R);

class CoefficientTable {
public:
    CoefficientTable(PowerIndex d, std::size_t count);

    PowerIndex index() const noexcept { return d_; }
    std::size_t size() const noexcept { return weights_.size(); }

    /// zeta_{d,r}, 1-based as in the series.
    double operator[](std::size_t r) const { return weights_.at(r - 1); }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Probability mass beyond the last stored coefficient.
    double tail_mass() const noexcept { return tail_mass_; }

private:
    PowerIndex d_;
    std::vector<double> weights_;
    double tail_mass_;
};

inline constexpr std::size_t kDefaultCoefficientCount = 256;

CoefficientTable mixture_coefficients(PowerIndex d, std::size_t count = kDefaultCoefficientCount);

} // namespace tsparse

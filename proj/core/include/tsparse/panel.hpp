#pragma once

#include "tsparse/zeta.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsparse {

/// Per-site t-scores sharing one degrees-of-freedom value, with optional
/// derived z-scores z_i = g(t_i; k).
struct ScorePanel {
    ScorePanel(std::vector<double> t_scores, DegreesOfFreedom k, std::vector<std::string> ids = {});

    std::vector<double> t;
    DegreesOfFreedom df;
    std::vector<std::string> site_ids;
    std::optional<std::vector<double>> z;

    std::size_t size() const noexcept { return t.size(); }

    /// Fills z by the probability integral transform if it is not present yet.
    void ensure_z_scores();

    /// z-scores; computes them on first use.
    std::span<const double> z_scores();
};

} // namespace tsparse

#include "tsparse/panel.hpp"

#include "tsparse/errors.hpp"

#include <cmath>

namespace tsparse {

ScorePanel::ScorePanel(std::vector<double> t_scores, DegreesOfFreedom k, std::vector<std::string> ids)
    : t(std::move(t_scores)), df(k), site_ids(std::move(ids)) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) throw input_error("non-finite t-score", i + 1);
    }
    if (site_ids.empty()) {
        site_ids.reserve(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) site_ids.push_back(std::to_string(i + 1));
    } else if (site_ids.size() != t.size()) {
        throw input_error("site id count does not match score count");
    }
}

void ScorePanel::ensure_z_scores() {
    if (z) return;
    std::vector<double> out;
    out.reserve(t.size());
    for (double ti : t) out.push_back(pit_transform(ti, df));
    z = std::move(out);
}

std::span<const double> ScorePanel::z_scores() {
    ensure_z_scores();
    return *z;
}

} // namespace tsparse

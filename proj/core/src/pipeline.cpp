#include "tsparse/pipeline.hpp"

#include "tsparse/errors.hpp"
#include "tsparse/specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tsparse {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view cell, double& out) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

double require_double(std::string_view cell, std::size_t row, std::size_t col) {
    double v;
    if (cell.empty()) throw input_error("missing value", row, col);
    if (!parse_double(cell, v)) throw input_error("non-numeric cell '" + std::string(cell) + "'", row, col);
    return v;
}

bool blank(std::string_view line) { return trim(line).empty(); }

struct Moments {
    double mean = 0.0;
    double ss = 0.0; // sum of squared deviations
    std::size_t n = 0;
};

Moments moments(std::span<const double> x) {
    Moments m;
    m.n = x.size();
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m.n);
    for (double v : x) m.ss += (v - m.mean) * (v - m.mean);
    return m;
}

[[noreturn]] void degenerate_sites(const std::vector<std::string>& ids) {
    std::string msg = "zero variance at " + std::to_string(ids.size()) + " site(s): ";
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) msg += (i ? ", " : "") + ids[i];
    if (ids.size() > 10) msg += ", ...";
    msg += " (use --drop-degenerate to exclude them)";
    throw input_error(msg);
}

void require_rectangular(const Matrix& matrix, std::size_t columns) {
    if (matrix.rows.empty()) throw input_error("matrix has no rows");
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        if (matrix.rows[i].size() != columns) {
            throw input_error("expected " + std::to_string(columns) + " values, found " +
                                  std::to_string(matrix.rows[i].size()),
                              i + 1);
        }
    }
}

std::string site_name(const Matrix& matrix, std::size_t i) {
    return i < matrix.site_ids.size() ? matrix.site_ids[i] : std::to_string(i + 1);
}

IngestResult finish(std::vector<double> scores, std::vector<std::string> ids, std::vector<std::string> degenerate,
                    double k, const IngestOptions& opts) {
    if (!degenerate.empty() && !opts.drop_degenerate) degenerate_sites(degenerate);
    if (scores.empty()) throw input_error("no usable sites after dropping degenerate ones");
    return {ScorePanel(std::move(scores), DegreesOfFreedom(k), std::move(ids)), std::move(degenerate)};
}

} // namespace

IngestResult ingest_two_sample(const Matrix& matrix, std::span<const std::string> group_labels,
                               const IngestOptions& opts) {
    const std::size_t columns = group_labels.size();
    require_rectangular(matrix, columns);

    std::vector<std::string> distinct;
    for (const auto& label : group_labels) {
        if (std::find(distinct.begin(), distinct.end(), label) == distinct.end()) distinct.push_back(label);
    }
    if (distinct.size() != 2) {
        throw input_error("two-sample design needs exactly two group labels, found " +
                          std::to_string(distinct.size()));
    }
    if (opts.first_group) {
        if (*opts.first_group == distinct[1]) {
            std::swap(distinct[0], distinct[1]);
        } else if (*opts.first_group != distinct[0]) {
            throw input_error("group label '" + *opts.first_group + "' not present in header");
        }
    }
    std::vector<std::size_t> g1, g2;
    for (std::size_t j = 0; j < columns; ++j) (group_labels[j] == distinct[0] ? g1 : g2).push_back(j);
    if (g1.size() < 2 || g2.size() < 2) throw input_error("each group needs at least two samples");

    const double m1 = static_cast<double>(g1.size());
    const double m2 = static_cast<double>(g2.size());
    const double k = m1 + m2 - 2.0;

    std::vector<double> scores;
    std::vector<std::string> ids, degenerate;
    std::vector<double> a(g1.size()), b(g2.size());
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        const auto& row = matrix.rows[i];
        for (std::size_t j = 0; j < g1.size(); ++j) a[j] = row[g1[j]];
        for (std::size_t j = 0; j < g2.size(); ++j) b[j] = row[g2[j]];
        const Moments ma = moments(a);
        const Moments mb = moments(b);
        const double pooled = (ma.ss + mb.ss) / k;
        if (!(pooled > 0.0)) {
            degenerate.push_back(site_name(matrix, i));
            continue;
        }
        scores.push_back((ma.mean - mb.mean) / (std::sqrt(pooled) * std::sqrt(1.0 / m1 + 1.0 / m2)));
        ids.push_back(site_name(matrix, i));
    }
    return finish(std::move(scores), std::move(ids), std::move(degenerate), k, opts);
}

IngestResult ingest_one_sample(const Matrix& matrix, const IngestOptions& opts) {
    if (matrix.rows.empty()) throw input_error("matrix has no rows");
    const std::size_t m = matrix.rows.front().size();
    require_rectangular(matrix, m);
    if (m < 2) throw input_error("one-sample design needs at least two replicates per site");

    std::vector<double> scores;
    std::vector<std::string> ids, degenerate;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        const Moments mo = moments(matrix.rows[i]);
        const double var = mo.ss / static_cast<double>(m - 1);
        if (!(var > 0.0)) {
            degenerate.push_back(site_name(matrix, i));
            continue;
        }
        scores.push_back(std::sqrt(static_cast<double>(m)) * mo.mean / std::sqrt(var));
        ids.push_back(site_name(matrix, i));
    }
    return finish(std::move(scores), std::move(ids), std::move(degenerate), static_cast<double>(m - 1), opts);
}

InputKind detect_input_kind(const std::string& first_line) {
    const auto cells = split_csv(first_line);
    if (cells.size() == 2 && cells[0] == "site_id" && cells[1] == "t") return InputKind::scores;
    double v;
    for (const auto& c : cells) {
        if (!parse_double(c, v)) return InputKind::two_sample;
    }
    return InputKind::one_sample;
}

Matrix read_matrix_csv(std::istream& in, bool has_header) {
    Matrix out;
    std::string line;
    std::size_t row = 0;
    bool id_column = false;
    std::size_t width = 0;
    if (has_header) {
        while (std::getline(in, line)) {
            ++row;
            if (!blank(line)) break;
        }
        if (blank(line)) throw input_error("empty input");
        auto cells = split_csv(line);
        id_column = cells.front().empty() || cells.front() == "site_id";
        for (std::size_t j = id_column ? 1 : 0; j < cells.size(); ++j) {
            if (cells[j].empty()) throw input_error("empty group label", row, j + 1);
            out.column_labels.emplace_back(cells[j]);
        }
        width = cells.size();
    }
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split_csv(line);
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            throw input_error("expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()),
                              row);
        }
        std::vector<double> values;
        values.reserve(cells.size());
        for (std::size_t j = id_column ? 1 : 0; j < cells.size(); ++j) {
            values.push_back(require_double(cells[j], row, j + 1));
        }
        out.site_ids.push_back(id_column ? std::string(cells[0]) : std::to_string(out.rows.size() + 1));
        out.rows.push_back(std::move(values));
    }
    if (out.rows.empty()) throw input_error("matrix has no data rows");
    return out;
}

ScorePanel read_score_csv(std::istream& in, DegreesOfFreedom k) {
    std::vector<double> scores;
    std::vector<std::string> ids;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2) throw input_error("score file rows need exactly two fields: site_id,t", row);
        if (ids.empty() && cells[0] == "site_id" && cells[1] == "t") continue;
        if (cells[0].empty()) throw input_error("missing site id", row, 1);
        ids.emplace_back(cells[0]);
        scores.push_back(require_double(cells[1], row, 2));
    }
    if (scores.empty()) throw input_error("score file has no rows");
    return ScorePanel(std::move(scores), k, std::move(ids));
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_score_csv(std::ostream& out, const ScorePanel& panel) {
    out << "site_id,t\n";
    for (std::size_t i = 0; i < panel.size(); ++i) out << panel.site_ids[i] << ',' << format_double(panel.t[i]) << '\n';
}

IngestResult read_panel(std::istream& in, std::optional<double> df, const IngestOptions& opts) {
    std::string first;
    while (std::getline(in, first) && blank(first)) {}
    if (blank(first)) throw input_error("empty input");
    std::stringstream rest;
    rest << first << '\n';
    if (in.peek() != std::char_traits<char>::eof()) rest << in.rdbuf();

    switch (detect_input_kind(first)) {
    case InputKind::scores: {
        if (!df) throw input_error("score files need --df");
        return {read_score_csv(rest, DegreesOfFreedom(*df)), {}};
    }
    case InputKind::two_sample: {
        const Matrix m = read_matrix_csv(rest, true);
        return ingest_two_sample(m, m.column_labels, opts);
    }
    case InputKind::one_sample:
        break;
    }
    return ingest_one_sample(read_matrix_csv(rest, false), opts);
}

std::vector<double> two_sided_pvalues(const ScorePanel& panel) {
    std::vector<double> out;
    out.reserve(panel.size());
    for (double t : panel.t) out.push_back(std::min(1.0, 2.0 * specfun::student_t_sf(std::abs(t), panel.df.value())));
    return out;
}

std::vector<std::size_t> bh_reject(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("bh_reject: alpha must lie in (0, 1)");
    const std::size_t n = pvalues.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    // largest rank k with p_(k) <= alpha k / n
    std::size_t k_star = 0;
    for (std::size_t rank = n; rank >= 1; --rank) {
        if (pvalues[order[rank - 1]] <= alpha * static_cast<double>(rank) / static_cast<double>(n)) {
            k_star = rank;
            break;
        }
    }
    std::vector<std::size_t> out;
    if (k_star == 0) return out;
    const double threshold = pvalues[order[k_star - 1]];
    for (std::size_t i = 0; i < n; ++i) {
        if (pvalues[i] <= threshold) out.push_back(i);
    }
    return out;
}

} // namespace tsparse

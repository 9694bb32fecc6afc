#pragma once

// Data ingestion (replicate matrices -> t-scores), p-values, Benjamini-Hochberg
// step-up control and the per-site lfdr report.

#include "tsparse/fit.hpp"
#include "tsparse/panel.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsparse {

/// Sites as rows, samples as columns.
struct Matrix {
    std::vector<std::string> site_ids;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> column_labels; // empty for unlabeled (one-sample) input
};

struct IngestOptions {
    /// Exclude zero-variance sites instead of failing.
    bool drop_degenerate = false;
    /// Label of the group whose mean comes first in the difference; default is
    /// the first label that appears in the header.
    std::optional<std::string> first_group;
};

struct IngestResult {
    ScorePanel panel;
    std::vector<std::string> dropped_sites;
};

/// Pooled-variance two-sample t: (m1bar - m2bar) / (s_p sqrt(1/m1 + 1/m2)), k = m1 + m2 - 2.
IngestResult ingest_two_sample(const Matrix& matrix, std::span<const std::string> group_labels,
                               const IngestOptions& opts = {});

/// One-sample t: sqrt(m) ybar / s, k = m - 1.
IngestResult ingest_one_sample(const Matrix& matrix, const IngestOptions& opts = {});

// ---- CSV ------------------------------------------------------------------

enum class InputKind { one_sample, two_sample, scores };

/// Classifies a CSV stream by its first line without consuming it:
/// a `site_id,t` header marks a score file, any other non-numeric first line
/// marks a labeled two-sample matrix, and a numeric first line a one-sample matrix.
InputKind detect_input_kind(const std::string& first_line);

/// Reads a matrix. With has_header, the first row holds column labels; a first
/// header cell of `site_id` (or empty) marks a leading id column. Without a
/// header, rows are all numeric and sites are numbered from 1.
Matrix read_matrix_csv(std::istream& in, bool has_header);

/// Reads `site_id,t` rows (optional header) into a panel on k degrees of freedom.
ScorePanel read_score_csv(std::istream& in, DegreesOfFreedom k);

/// Writes `site_id,t` rows with shortest round-trip formatting.
void write_score_csv(std::ostream& out, const ScorePanel& panel);

/// Ingests any supported CSV input. `df` is required for score files.
IngestResult read_panel(std::istream& in, std::optional<double> df, const IngestOptions& opts = {});

// ---- testing --------------------------------------------------------------

/// p_i = 2 (1 - F_0(|t_i|; k)).
std::vector<double> two_sided_pvalues(const ScorePanel& panel);

/// Indices (ascending) rejected by the BH step-up rule at level alpha.
std::vector<std::size_t> bh_reject(std::span<const double> pvalues, double alpha);

// ---- report ---------------------------------------------------------------

struct SiteRecord {
    std::string site_id;
    double t = 0.0;
    double z = 0.0;
    double lfdr_t = 1.0;
    double lfdr_z = 1.0;
    double ratio = 1.0; // lfdr_z / lfdr_t
    double p_value = 1.0;
    bool bh_rejected = false;
};

struct LfdrSummary {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct LfdrReport {
    std::vector<SiteRecord> sites;
    FitResult fit_t;
    FitResult fit_z;
    double alpha = 0.1;
    double df = 0.0;
    std::size_t n_rejected = 0;
    LfdrSummary bh_lfdr_t; // over the BH rejection set
    LfdrSummary bh_lfdr_z;
};

/// Per-site lfdr under both nulls at the fitted parameters, with BH flags at alpha.
/// Throws std::invalid_argument when a fit does not belong to the panel.
LfdrReport build_report(ScorePanel& panel, const FitResult& fit_t, const FitResult& fit_z, double alpha,
                        const SeriesOptions& opts = {});

/// Site indices ordered by decreasing |t| (ties by input order).
std::vector<std::size_t> top_sites(const LfdrReport& report, std::size_t count);

void write_report_table(std::ostream& out, const LfdrReport& report, std::size_t top = 6);
void write_report_csv(std::ostream& out, const LfdrReport& report);
std::string report_to_json(const LfdrReport& report, int indent = 2);
std::string fit_to_json(const FitResult& fit, int indent = 2);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

} // namespace tsparse

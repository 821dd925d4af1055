#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace functensor {

/// Per-DoF nMSE of one method over repeated random splits.
struct ExperimentReport {
    std::string method;
    std::size_t rank = 0;
    std::string config_digest;
    std::vector<std::uint64_t> seeds;
    /// split_nmse[s][k]: nMSE (fraction, not percent) of DoF k on split s.
    std::vector<std::vector<double>> split_nmse;

    void add_split(std::uint64_t seed, std::vector<double> per_dof);

    [[nodiscard]] std::size_t dofs() const;
    /// Mean over splits, per DoF.
    [[nodiscard]] std::vector<double> per_dof_mean() const;
    /// Mean over DoFs, per split.
    [[nodiscard]] std::vector<double> split_means() const;
    [[nodiscard]] double mean() const;
    /// Sample standard deviation of split_means() (0 for a single split).
    [[nodiscard]] double std_dev() const;
};

/// One formatted line of a results table, in percent.
struct ReportRow {
    std::string label;
    std::vector<double> per_dof_pct;
    double mean_pct = 0.0;
    double std_pct = 0.0;
};

[[nodiscard]] ReportRow to_row(const ExperimentReport& report);

/// Reads externally reported rows: `label v1 ... vC mean std` per line, values in
/// percent, labels may not contain whitespace. Each label gets a
/// " (published)" suffix.
[[nodiscard]] std::vector<ReportRow> parse_reference_rows(const std::string& text,
                                                          const std::string& origin);

/// Aligned plain-text table with two-decimal percentages.
[[nodiscard]] std::string format_table(const std::vector<ReportRow>& rows);
/// Tab-separated equivalent of format_table.
[[nodiscard]] std::string rows_to_tsv(const std::vector<ReportRow>& rows);

struct SweepPoint {
    std::size_t rank = 0;
    double mean_pct = 0.0;
    double std_pct = 0.0;
};

struct RankSweepResult {
    std::string method;
    std::vector<SweepPoint> points;  // ranks strictly increasing

    /// Throws ConfigError if ranks are not strictly increasing.
    void validate() const;
};

[[nodiscard]] std::string sweep_to_tsv(const RankSweepResult& sweep);

}  // namespace functensor

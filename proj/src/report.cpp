#include "functensor/report.hpp"


#include "functensor/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace functensor {

namespace {

std::string pct(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
}

}  // namespace

void ExperimentReport::add_split(std::uint64_t seed, std::vector<double> per_dof) {
    if (!split_nmse.empty() && per_dof.size() != split_nmse.front().size()) {
        throw ShapeError("report: split has a different DoF count");
    }
    seeds.push_back(seed);
    split_nmse.push_back(std::move(per_dof));
}

std::size_t ExperimentReport::dofs() const {
    return split_nmse.empty() ? 0 : split_nmse.front().size();
}

std::vector<double> ExperimentReport::per_dof_mean() const {
    std::vector<double> out(dofs(), 0.0);
    for (const auto& split : split_nmse) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += split[k];
    }
    for (double& v : out) v /= static_cast<double>(split_nmse.size());
    return out;
}

std::vector<double> ExperimentReport::split_means() const {
    std::vector<double> out;
    for (const auto& split : split_nmse) {
        out.push_back(std::accumulate(split.begin(), split.end(), 0.0) /
                      static_cast<double>(split.size()));
    }
    return out;
}

double ExperimentReport::mean() const {
    const auto m = split_means();
    if (m.empty()) return 0.0;
    return std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(m.size());
}

double ExperimentReport::std_dev() const {
    const auto m = split_means();
    if (m.size() < 2) return 0.0;
    const double mu = mean();
    double ss = 0.0;
    for (double v : m) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(m.size() - 1));
}

ReportRow to_row(const ExperimentReport& report) {
    ReportRow row;
    row.label = report.method;
    if (report.rank > 0 && report.method != "linear") {
        row.label += " (rank " + std::to_string(report.rank) + ")";
    }
    for (double v : report.per_dof_mean()) row.per_dof_pct.push_back(100.0 * v);
    row.mean_pct = 100.0 * report.mean();
    row.std_pct = 100.0 * report.std_dev();
    return row;
}

std::vector<ReportRow> parse_reference_rows(const std::string& text, const std::string& origin) {
    std::vector<ReportRow> rows;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string label;
        if (!(tokens >> label) || label.front() == '#') continue;
        std::vector<double> values;
        for (std::string t; tokens >> t;) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument(t);
            } catch (const std::exception&) {
                throw DataError(origin + ": row " + std::to_string(line_no) + ": '" + t +
                                "' is not numeric");
            }
        }
        if (values.size() < 3) {
            throw DataError(origin + ": row " + std::to_string(line_no) +
                            " needs per-DoF values, a mean and a std");
        }
        ReportRow row;
        row.label = label + " (published)";
        row.std_pct = values.back();
        values.pop_back();
        row.mean_pct = values.back();
        values.pop_back();
        row.per_dof_pct = std::move(values);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_table(const std::vector<ReportRow>& rows) {
    std::size_t dofs = 0;
    std::size_t label_width = 6;
    for (const auto& r : rows) {
        dofs = std::max(dofs, r.per_dof_pct.size());
        label_width = std::max(label_width, r.label.size());
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_width)) << "Method";
    for (std::size_t k = 0; k < dofs; ++k) out << " | " << std::right << std::setw(6) << ("DoF " + std::to_string(k + 1));
    out << " | Mean +- std in %\n";
    out << std::string(label_width + dofs * 9 + 19, '-') << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(label_width)) << r.label;
        for (std::size_t k = 0; k < dofs; ++k) {
            out << " | " << std::right << std::setw(6)
                << (k < r.per_dof_pct.size() ? pct(r.per_dof_pct[k]) : std::string("-"));
        }
        out << " | " << pct(r.mean_pct) << " +- " << pct(r.std_pct) << '\n';
    }
    return out.str();
}

std::string rows_to_tsv(const std::vector<ReportRow>& rows) {
    std::size_t dofs = 0;
    for (const auto& r : rows) dofs = std::max(dofs, r.per_dof_pct.size());
    std::ostringstream out;
    out << "method";
    for (std::size_t k = 0; k < dofs; ++k) out << "\tdof" << k + 1 << "_pct";
    out << "\tmean_pct\tstd_pct\n";
    for (const auto& r : rows) {
        out << r.label;
        for (std::size_t k = 0; k < dofs; ++k) {
            out << '\t' << (k < r.per_dof_pct.size() ? pct(r.per_dof_pct[k]) : std::string("-"));
        }
        out << '\t' << pct(r.mean_pct) << '\t' << pct(r.std_pct) << '\n';
    }
    return out.str();
}

void RankSweepResult::validate() const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].rank <= points[i - 1].rank) {
            throw ConfigError("sweep ranks must be strictly increasing");
        }
    }
}

std::string sweep_to_tsv(const RankSweepResult& sweep) {
    sweep.validate();
    std::ostringstream out;
    out << "method\trank\tmean_nmse_pct\tstd_pct\n";
    for (const auto& p : sweep.points) {
        out << sweep.method << '\t' << p.rank << '\t' << pct(p.mean_pct) << '\t' << pct(p.std_pct)
            << '\n';
    }
    return out.str();
}

}  // namespace functensor

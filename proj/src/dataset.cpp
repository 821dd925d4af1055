#include "functensor/dataset.hpp"

#include "functensor/config.hpp"
#include "functensor/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace functensor {

namespace {

const char* const kBlockNames[3] = {"position", "velocity", "acceleration"};

void copy_columns(const Matrix& table, std::size_t first, Matrix& out) {
    for (std::size_t i = 0; i < table.rows; ++i) {
        for (std::size_t j = 0; j < out.cols; ++j) out(i, j) = table(i, first + j);
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

TrajectoryDataset TrajectoryDataset::subset(std::span<const std::size_t> indices) const {
    TrajectoryDataset out;
    out.dof = dof;
    out.channels = channels;
    out.positions = positions.gather(indices);
    out.velocities = velocities.gather(indices);
    out.accelerations = accelerations.gather(indices);
    out.torques = torques.gather(indices);
    if (clean_torques) out.clean_torques = clean_torques->gather(indices);
    out.source = source;
    return out;
}

Matrix TrajectoryDataset::inputs() const {
    Matrix x(size(), 3 * dof);
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t m = 0; m < 3; ++m) {
            auto src = block(m).row(i);
            std::copy(src.begin(), src.end(), x.row(i).begin() + m * dof);
        }
    }
    return x;
}

const Matrix& TrajectoryDataset::block(std::size_t mode) const {
    switch (mode) {
        case 0: return positions;
        case 1: return velocities;
        case 2: return accelerations;
        default: throw ShapeError("input block index must be 0, 1 or 2");
    }
}

std::vector<double> TrajectoryDataset::torque_channel(std::size_t channel) const {
    if (channel >= channels) throw ShapeError("torque channel out of range");
    std::vector<double> y(size());
    for (std::size_t i = 0; i < size(); ++i) y[i] = torques(i, channel);
    return y;
}

Matrix parse_numeric_table(const std::string& text, const std::string& origin) {
    Matrix table;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> row;
    while (std::getline(lines, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), '\t', ' ');
        const auto first = line.find_first_not_of(" \r");
        if (first == std::string::npos || line[first] == '#') continue;

        row.clear();
        std::istringstream cells(line);
        std::string cell;
        while (cells >> cell) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            double v = 0.0;
            const char* b = cell.data();
            const char* e = b + cell.size();
            if (!cell.empty() && *b == '+') ++b;
            auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
                throw DataError(origin + ": row " + std::to_string(line_no) + ", column " +
                                std::to_string(row.size() + 1) + ": '" + cell +
                                "' is not a finite number");
            }
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (table.rows == 0) {
            table.cols = row.size();
        } else if (row.size() != table.cols) {
            throw DataError(origin + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(table.cols));
        }
        table.data.insert(table.data.end(), row.begin(), row.end());
        ++table.rows;
    }
    if (table.rows == 0) throw DataError(origin + ": no data rows");
    return table;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << contents;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " +
                        ec.message());
    }
}

TrajectoryDataset dataset_from_table(const Matrix& table, std::string source) {
    TrajectoryDataset ds;
    ds.source = std::move(source);
    if (table.cols == 28) {
        ds.dof = ds.channels = 7;
    } else if (table.cols == 10) {
        ds.dof = ds.channels = 2;
    } else {
        throw DataError(ds.source + ": expected 28 columns (10 for synthetic two-link data), got " +
                        std::to_string(table.cols));
    }
    const std::size_t c = ds.dof;
    ds.positions = Matrix(table.rows, c);
    ds.velocities = Matrix(table.rows, c);
    ds.accelerations = Matrix(table.rows, c);
    ds.torques = Matrix(table.rows, ds.channels);
    copy_columns(table, 0, ds.positions);
    copy_columns(table, c, ds.velocities);
    copy_columns(table, 2 * c, ds.accelerations);
    copy_columns(table, 3 * c, ds.torques);
    if (table.cols == 10) {
        ds.clean_torques = Matrix(table.rows, ds.channels);
        copy_columns(table, 3 * c + ds.channels, *ds.clean_torques);
    }
    return ds;
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
    return dataset_from_table(parse_numeric_table(read_text_file(path), path.string()),
                              path.string());
}

std::string dataset_to_text(const TrajectoryDataset& ds) {
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::string line;
        auto append = [&](std::span<const double> values) {
            for (double v : values) {
                if (!line.empty()) line += ' ';
                line += format_double(v);
            }
        };
        append(ds.positions.row(i));
        append(ds.velocities.row(i));
        append(ds.accelerations.row(i));
        append(ds.torques.row(i));
        if (ds.clean_torques) append(ds.clean_torques->row(i));
        out += line;
        out += '\n';
    }
    return out;
}

SplitSpec split(std::size_t n, std::uint64_t seed) {
    if (n < 20) {
        throw ConfigError("dataset too small to split: " + std::to_string(n) +
                          " samples, need at least 20");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    const auto n_test = static_cast<std::size_t>(std::llround(0.10 * static_cast<double>(n)));
    const auto n_val =
        static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n - n_test)));

    SplitSpec s;
    s.seed = seed;
    s.test.assign(perm.begin(), perm.begin() + n_test);
    s.validation.assign(perm.begin() + n_test, perm.begin() + n_test + n_val);
    s.train.assign(perm.begin() + n_test + n_val, perm.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

Standardizer Standardizer::fit(const TrajectoryDataset& train, bool standardize_inputs) {
    if (train.size() == 0) throw ConfigError("cannot standardize an empty training split");
    const std::size_t c = train.dof;
    const double n = static_cast<double>(train.size());
    Standardizer s;
    s.standardize_inputs = standardize_inputs;
    s.input_mean.assign(3 * c, 0.0);
    s.input_std.assign(3 * c, 1.0);

    std::vector<std::string> degenerate;
    if (standardize_inputs) {
        for (std::size_t m = 0; m < 3; ++m) {
            const Matrix& b = train.block(m);
            for (std::size_t j = 0; j < c; ++j) {
                double mean = 0.0;
                for (std::size_t i = 0; i < b.rows; ++i) mean += b(i, j);
                mean /= n;
                double var = 0.0;
                for (std::size_t i = 0; i < b.rows; ++i) var += (b(i, j) - mean) * (b(i, j) - mean);
                var /= n;
                s.input_mean[m * c + j] = mean;
                s.input_std[m * c + j] = std::sqrt(var);
                if (!(var > 0.0)) {
                    degenerate.push_back(std::string(kBlockNames[m]) + "[" + std::to_string(j) + "]");
                }
            }
        }
    }

    s.target_variance.assign(train.channels, 0.0);
    for (std::size_t k = 0; k < train.channels; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) mean += train.torques(i, k);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double d = train.torques(i, k) - mean;
            var += d * d;
        }
        s.target_variance[k] = var / n;
        if (!(s.target_variance[k] > 0.0)) degenerate.push_back("torque[" + std::to_string(k) + "]");
    }

    if (!degenerate.empty()) {
        std::string msg = "zero-variance columns in training split:";
        for (const auto& d : degenerate) msg += " " + d;
        throw ConfigError(msg);
    }
    return s;
}

TrajectoryDataset Standardizer::apply(const TrajectoryDataset& ds) const {
    if (ds.dof * 3 != input_mean.size()) throw ShapeError("standardizer/dataset dof mismatch");
    TrajectoryDataset out = ds;
    if (!standardize_inputs) return out;
    const std::size_t c = ds.dof;
    for (std::size_t m = 0; m < 3; ++m) {
        Matrix& b = m == 0 ? out.positions : m == 1 ? out.velocities : out.accelerations;
        for (std::size_t i = 0; i < b.rows; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                b(i, j) = (b(i, j) - input_mean[m * c + j]) / input_std[m * c + j];
            }
        }
    }
    return out;
}

TrajectoryDataset Standardizer::inverse(const TrajectoryDataset& ds) const {
    if (ds.dof * 3 != input_mean.size()) throw ShapeError("standardizer/dataset dof mismatch");
    TrajectoryDataset out = ds;
    if (!standardize_inputs) return out;
    const std::size_t c = ds.dof;
    for (std::size_t m = 0; m < 3; ++m) {
        Matrix& b = m == 0 ? out.positions : m == 1 ? out.velocities : out.accelerations;
        for (std::size_t i = 0; i < b.rows; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                b(i, j) = b(i, j) * input_std[m * c + j] + input_mean[m * c + j];
            }
        }
    }
    return out;
}

std::string Standardizer::digest() const {
    std::string text = standardize_inputs ? "z" : "raw";
    for (const auto* v : {&input_mean, &input_std, &target_variance}) {
        text += '|';
        for (double x : *v) text += format_double(x) + ",";
    }
    return digest_hex(text);
}

std::vector<double> nmse(const Matrix& predictions, const Matrix& targets,
                         std::span<const double> train_variance) {
    if (predictions.rows != targets.rows || predictions.cols != targets.cols) {
        throw ShapeError("nmse: predictions and targets differ in shape");
    }
    if (train_variance.size() != targets.cols) {
        throw ShapeError("nmse: variance count does not match channel count");
    }
    if (targets.rows == 0) throw ShapeError("nmse: no samples");
    std::vector<double> out(targets.cols, 0.0);
    for (std::size_t k = 0; k < targets.cols; ++k) {
        if (!(train_variance[k] > 0.0)) {
            throw DomainError("nmse: training variance must be > 0 (channel " +
                              std::to_string(k) + ")");
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < targets.rows; ++i) {
            const double d = predictions(i, k) - targets(i, k);
            sse += d * d;
        }
        out[k] = sse / static_cast<double>(targets.rows) / train_variance[k];
    }
    return out;
}

namespace arm {

std::array<double, 4> mass_matrix(std::span<const double> q) {
    const double c2 = std::cos(q[1]);
    // m1 = m2 = 1, l1 = l2 = 1
    const double m11 = 3.0 + 2.0 * c2;
    const double m12 = 1.0 + c2;
    return {m11, m12, m12, 1.0};
}

std::array<double, 2> coriolis(std::span<const double> q, std::span<const double> qd) {
    const double s2 = std::sin(q[1]);
    return {-s2 * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]), s2 * qd[0] * qd[0]};
}

std::array<double, 2> gravity(std::span<const double> q) {
    const double c1 = std::cos(q[0]);
    const double c12 = std::cos(q[0] + q[1]);
    return {kGravity * (2.0 * c1 + c12), kGravity * c12};
}

std::array<double, 2> friction(std::span<const double> qd) {
    auto sign = [](double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; };
    return {kViscousFriction * qd[0] + kCoulombFriction * sign(qd[0]),
            kViscousFriction * qd[1] + kCoulombFriction * sign(qd[1])};
}

std::array<double, 2> inverse_dynamics(std::span<const double> q, std::span<const double> qd,
                                       std::span<const double> qdd, bool with_friction) {
    const auto m = mass_matrix(q);
    const auto h = coriolis(q, qd);
    const auto g = gravity(q);
    std::array<double, 2> tau{m[0] * qdd[0] + m[1] * qdd[1] + h[0] + g[0],
                              m[2] * qdd[0] + m[3] * qdd[1] + h[1] + g[1]};
    if (with_friction) {
        const auto f = friction(qd);
        tau[0] += f[0];
        tau[1] += f[1];
    }
    return tau;
}

}  // namespace arm

TrajectoryDataset gen_synthetic_arm(std::size_t n, std::uint64_t seed, double noise_std,
                                    const SyntheticArmOptions& options) {
    if (n == 0) throw ConfigError("gen_synthetic_arm: n must be >= 1");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw ConfigError("gen_synthetic_arm: noise_std must be finite and >= 0");
    }
    TrajectoryDataset ds;
    ds.dof = ds.channels = 2;
    ds.positions = Matrix(n, 2);
    ds.velocities = Matrix(n, 2);
    ds.accelerations = Matrix(n, 2);
    ds.torques = Matrix(n, 2);
    ds.clean_torques = Matrix(n, 2);
    ds.source = "synthetic-two-link(seed=" + std::to_string(seed) + ")";

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    std::uniform_real_distribution<double> acc(-5.0, 5.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        auto q = ds.positions.row(i);
        auto qd = ds.velocities.row(i);
        auto qdd = ds.accelerations.row(i);
        for (auto& v : q) v = pos(rng);
        for (auto& v : qd) v = vel(rng);
        for (auto& v : qdd) v = acc(rng);
        const auto tau = arm::inverse_dynamics(q, qd, qdd, options.friction);
        for (std::size_t k = 0; k < 2; ++k) {
            (*ds.clean_torques)(i, k) = tau[k];
            ds.torques(i, k) = tau[k] + noise_std * noise(rng);
        }
    }
    return ds;
}

}  // namespace functensor

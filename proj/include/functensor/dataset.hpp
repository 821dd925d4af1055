#pragma once

#include "functensor/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace functensor {

/// Joint-space samples: positions, velocities, accelerations (N x c each) and
/// torques (N x C).
struct TrajectoryDataset {
    std::size_t dof = 0;
    std::size_t channels = 0;
    Matrix positions;
    Matrix velocities;
    Matrix accelerations;
    Matrix torques;
    /// Noise-free torques, present only for synthetic data.
    std::optional<Matrix> clean_torques;
    std::string source;

    [[nodiscard]] std::size_t size() const { return torques.rows; }
    [[nodiscard]] TrajectoryDataset subset(std::span<const std::size_t> indices) const;
    /// Concatenated [q, qd, qdd] rows, N x 3c.
    [[nodiscard]] Matrix inputs() const;
    /// One of the three input blocks: 0 positions, 1 velocities, 2 accelerations.
    [[nodiscard]] const Matrix& block(std::size_t mode) const;
    [[nodiscard]] std::vector<double> torque_channel(std::size_t channel) const;
};

/// Parses a whitespace- or comma-delimited numeric table. '#' starts a comment line.
/// Throws DataError on empty input, ragged rows, or non-numeric/non-finite cells.
[[nodiscard]] Matrix parse_numeric_table(const std::string& text, const std::string& origin);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// 28 columns: q(1-7), qd(8-14), qdd(15-21), torques(22-28).
/// 10 columns: synthetic two-link layout q(2), qd(2), qdd(2), torques(2), clean torques(2).
[[nodiscard]] TrajectoryDataset load_dataset(const std::filesystem::path& path);
[[nodiscard]] TrajectoryDataset dataset_from_table(const Matrix& table, std::string source);

/// Serializes in the layout load_dataset reads back.
[[nodiscard]] std::string dataset_to_text(const TrajectoryDataset& ds);

struct SplitSpec {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

/// Seeded shuffle; 10% test, then 5% of the remainder as validation. Each
/// index list is sorted. Throws ConfigError when n < 20.
[[nodiscard]] SplitSpec split(std::size_t n, std::uint64_t seed);
[[nodiscard]] inline SplitSpec split(const TrajectoryDataset& ds, std::uint64_t seed) {
    return split(ds.size(), seed);
}

/// Z-scores inputs with training statistics and records training target variance.
struct Standardizer {
    bool standardize_inputs = true;
    std::vector<double> input_mean;    // 3c
    std::vector<double> input_std;     // 3c
    std::vector<double> target_variance;  // C, population variance

    /// Throws ConfigError naming every zero-variance input column when
    /// `standardize_inputs` is set, or if a target channel has zero variance.
    [[nodiscard]] static Standardizer fit(const TrajectoryDataset& train,
                                          bool standardize_inputs = true);

    [[nodiscard]] TrajectoryDataset apply(const TrajectoryDataset& ds) const;
    [[nodiscard]] TrajectoryDataset inverse(const TrajectoryDataset& ds) const;

    /// Stable hex digest of the statistics, used to match models to data.
    [[nodiscard]] std::string digest() const;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Per-channel mean squared error divided by the training variance.
[[nodiscard]] std::vector<double> nmse(const Matrix& predictions, const Matrix& targets,
                                       std::span<const double> train_variance);

namespace arm {

inline constexpr double kGravity = 9.81;
inline constexpr double kViscousFriction = 0.5;
inline constexpr double kCoulombFriction = 0.3;

/// Two-link planar arm with unit point masses at the distal end of unit-length
/// links, angles measured from the horizontal, gravity along -y.
[[nodiscard]] std::array<double, 4> mass_matrix(std::span<const double> q);
[[nodiscard]] std::array<double, 2> coriolis(std::span<const double> q, std::span<const double> qd);
[[nodiscard]] std::array<double, 2> gravity(std::span<const double> q);
[[nodiscard]] std::array<double, 2> friction(std::span<const double> qd);

/// M(q) qdd + C(q, qd) qd + g(q), optionally plus friction.
[[nodiscard]] std::array<double, 2> inverse_dynamics(std::span<const double> q,
                                                     std::span<const double> qd,
                                                     std::span<const double> qdd,
                                                     bool with_friction = true);

}  // namespace arm

struct SyntheticArmOptions {
    bool friction = true;
};

/// Samples q ~ U[-pi, pi]^2, qd ~ U[-2, 2]^2, qdd ~ U[-5, 5]^2 and computes torques
/// with the two-link model plus Gaussian observation noise of std `noise_std`.
[[nodiscard]] TrajectoryDataset gen_synthetic_arm(std::size_t n, std::uint64_t seed,
                                                  double noise_std,
                                                  const SyntheticArmOptions& options = {});

}  // namespace functensor

#pragma once

#include "functensor/baselines.hpp"
#include "functensor/dataset.hpp"
#include "functensor/functional_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace functensor {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<FunctionalModel, LinearModel, RbfNetwork>;

/// A self-contained predictor: the model, the torque channels it produces, and
/// the standardizer/split it was trained under.
struct ModelFile {
    std::string manifest;
    std::uint64_t split_seed = 0;
    std::size_t dof = 0;
    /// Row count of the dataset the split was drawn from.
    std::size_t dataset_size = 0;
    std::vector<std::size_t> channels;
    Standardizer standardizer;
    AnyModel model;

    /// "tucker", "parafac", "linear" or "rbf-net".
    [[nodiscard]] std::string kind_tag() const;

    /// Predictions (N x channels.size()) for a dataset already transformed by
    /// `standardizer`.
    [[nodiscard]] Matrix predict(const TrajectoryDataset& standardized) const;
};

[[nodiscard]] std::string serialize_model(const ModelFile& file);
/// Throws DataError on a malformed or unsupported-version file.
[[nodiscard]] ModelFile parse_model(const std::string& text, const std::string& origin);

void save_model(const ModelFile& file, const std::filesystem::path& path);
[[nodiscard]] ModelFile load_model(const std::filesystem::path& path);

}  // namespace functensor

#pragma once

#include "functensor/dataset.hpp"
#include "functensor/model_io.hpp"
#include "functensor/report.hpp"
#include "functensor/training.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace functensor {

enum class Method { Tucker, Parafac, Linear, RbfNet };

/// "tucker", "parafac", "linear", "rbf-net"; throws ConfigError otherwise.
[[nodiscard]] Method parse_method(std::string_view name);
[[nodiscard]] std::string_view to_string(Method method);

/// A seeded split with every part transformed by the training-split standardizer.
struct PreparedSplit {
    SplitSpec split;
    Standardizer standardizer;
    std::size_t dataset_size = 0;
    TrajectoryDataset train;
    TrajectoryDataset validation;
    TrajectoryDataset test;
};

[[nodiscard]] PreparedSplit prepare_split(const TrajectoryDataset& raw, std::uint64_t seed,
                                          bool standardize_inputs = true);

struct TrainedMethod {
    std::vector<ModelFile> files;
    /// One history per trained model (empty for the closed-form linear fit).
    std::vector<TrainHistory> histories;
};

/// Tucker/PARAFAC give one file per torque channel; linear and rbf-net give a
/// single file covering all channels.
[[nodiscard]] TrainedMethod train_method(const PreparedSplit& data, Method method,
                                         const TrainConfig& cfg, const std::string& manifest);

enum class Subset { Train, Validation, Test };

/// Row indices touched during an evaluation.
struct EvaluationAudit {
    std::vector<std::size_t> rows_read;
    bool disjoint_from_train = true;
};

/// Per-channel nMSE of the models on one subset of the seed's split, using the
/// standardizer and training variances stored in the model files. Only the
/// rows of that subset are read. Throws ConfigError if the models are
/// incompatible with each other or the data, or do not cover every channel once.
[[nodiscard]] std::vector<double> evaluate_models(std::span<const ModelFile> models,
                                                  const TrajectoryDataset& raw, std::uint64_t seed,
                                                  Subset subset = Subset::Test,
                                                  EvaluationAudit* audit = nullptr);

/// Trains and evaluates `method` on each seed's split; one report per rank.
[[nodiscard]] std::vector<ExperimentReport> run_sweep(const TrajectoryDataset& raw, Method method,
                                                      std::span<const std::size_t> ranks,
                                                      std::span<const std::uint64_t> seeds,
                                                      const TrainConfig& cfg,
                                                      bool standardize_inputs = true);

[[nodiscard]] RankSweepResult to_sweep_result(Method method,
                                              std::span<const ExperimentReport> reports);

/// "functensor cmd=<cmd> method=<m> config=<digest> seeds=<...>" provenance line.
[[nodiscard]] std::string make_manifest(std::string_view command, Method method,
                                        const TrainConfig& cfg,
                                        std::span<const std::uint64_t> seeds);

}  // namespace functensor

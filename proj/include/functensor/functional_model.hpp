#pragma once

#include "functensor/basis.hpp"
#include "functensor/dataset.hpp"
#include "functensor/matrix.hpp"
#include "functensor/tensor.hpp"
#include "functensor/training.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace functensor {

enum class ModelKind { Tucker, Parafac };

[[nodiscard]] std::string_view to_string(ModelKind kind);

/// Functional tensor model for one torque channel:
///   Phi(x1, x2, x3) = sum G(r1, r2, r3) A1(x1, r1) A2(x2, r2) A3(x3, r3)
/// where A_i are Gaussian basis banks over positions, velocities and
/// accelerations. The PARAFAC kind keeps only the superdiagonal `weights`.
struct FunctionalModel {
    ModelKind kind = ModelKind::Tucker;
    std::size_t rank = 0;
    std::size_t dim = 0;
    std::size_t dof_index = 0;
    DenseTensor core;             // Tucker: rank x rank x rank
    std::vector<double> weights;  // PARAFAC: rank
    std::array<GaussianBasis, 3> bases;

    /// core/weights, then centers and shape of each basis in mode order.
    [[nodiscard]] std::vector<std::span<double>> parameter_blocks();
    [[nodiscard]] std::size_t parameter_count() const;

    /// Throws ShapeError if ranks or input dims disagree.
    void validate() const;

    friend bool operator==(const FunctionalModel&, const FunctionalModel&) = default;
};

/// Inputs and targets for one torque channel.
struct ChannelSamples {
    std::array<Matrix, 3> inputs;  // positions, velocities, accelerations: N x c
    std::vector<double> targets;

    [[nodiscard]] std::size_t size() const { return targets.size(); }
};

[[nodiscard]] ChannelSamples channel_samples(const TrajectoryDataset& ds, std::size_t channel);

/// Gradient bundle laid out like FunctionalModel::parameter_blocks().
struct FunctionalGradient {
    std::vector<double> d_core;  // rank^3 (Tucker) or rank (PARAFAC)
    std::array<BasisGradient, 3> bases;

    [[nodiscard]] static FunctionalGradient zeros_like(const FunctionalModel& model);
    [[nodiscard]] std::vector<std::span<const double>> blocks() const;
};

/// Basis centers from k-means on each input block, identity shape factors,
/// core (or weights) drawn from N(0, 0.05^2). Seeded from (cfg.seed, dof_index).
[[nodiscard]] FunctionalModel init_model(const std::array<Matrix, 3>& train_inputs,
                                         const TrainConfig& cfg, ModelKind kind,
                                         std::size_t dof_index = 0);

/// Evaluates through tensor-core's tucker_eval / parafac_eval.
[[nodiscard]] double forward(const FunctionalModel& model, std::span<const double> x1,
                             std::span<const double> x2, std::span<const double> x3);

/// Predictions for every sample.
[[nodiscard]] std::vector<double> predict(const FunctionalModel& model,
                                          const std::array<Matrix, 3>& inputs);

/// Squared-error sum over the samples (or the indexed subset).
[[nodiscard]] double cost(const FunctionalModel& model, const ChannelSamples& samples);
[[nodiscard]] double cost(const FunctionalModel& model, const ChannelSamples& samples,
                          std::span<const std::size_t> indices);

/// Analytic gradient of the summed squared error; returns {cost, gradient}.
[[nodiscard]] std::pair<double, FunctionalGradient> cost_and_gradients(
    const FunctionalModel& model, const ChannelSamples& samples,
    std::span<const std::size_t> indices);
[[nodiscard]] FunctionalGradient gradients(const FunctionalModel& model,
                                           const ChannelSamples& samples);

/// nMSE of the model on `samples` against the given training variance.
[[nodiscard]] double channel_nmse(const FunctionalModel& model, const ChannelSamples& samples,
                                  double train_variance);

/// Mini-batch Adam with early stopping on validation nMSE (variance taken from
/// the training targets). `model` is left at the best validation snapshot.
TrainHistory train(FunctionalModel& model, const ChannelSamples& train_set,
                   const ChannelSamples& validation_set, const TrainConfig& cfg);

struct TrainedChannel {
    FunctionalModel model;
    TrainHistory history;
};

/// One independently initialized and trained model per torque channel of the
/// (already standardized) datasets. Uses cfg.threads workers; results do not
/// depend on the worker count.
[[nodiscard]] std::vector<TrainedChannel> train_all_dofs(const TrajectoryDataset& train_set,
                                                         const TrajectoryDataset& validation_set,
                                                         const TrainConfig& cfg, ModelKind kind);

}  // namespace functensor

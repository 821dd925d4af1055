#pragma once

#include "functensor/dataset.hpp"
#include "functensor/matrix.hpp"
#include "functensor/training.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace functensor {

/// y = W x + b.
struct LinearModel {
    Matrix weights;            // C x d
    std::vector<double> bias;  // C

    [[nodiscard]] std::vector<double> predict(std::span<const double> x) const;
    [[nodiscard]] Matrix predict(const Matrix& inputs) const;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Least squares with an unpenalized bias column and ridge penalty on W,
/// solved by column-pivoted Householder QR of the ridge-augmented system.
/// Throws NumericalError if the system is rank deficient and ridge == 0.
[[nodiscard]] LinearModel fit_linear(const Matrix& inputs, const Matrix& targets, double ridge);

/// y_k = sum_i w_ik exp(-beta_i |x - c_i|^2) with beta_i = s_i^2.
struct RbfNetwork {
    Matrix centers;                  // r x d
    std::vector<double> width_roots; // r, beta_i = width_roots[i]^2
    Matrix weights;                  // r x C

    [[nodiscard]] std::size_t units() const { return centers.rows; }
    [[nodiscard]] double beta(std::size_t i) const { return width_roots[i] * width_roots[i]; }
    [[nodiscard]] std::vector<double> predict(std::span<const double> x) const;
    [[nodiscard]] Matrix predict(const Matrix& inputs) const;
    [[nodiscard]] std::vector<std::span<double>> parameter_blocks();

    friend bool operator==(const RbfNetwork&, const RbfNetwork&) = default;
};

struct RbfGradient {
    std::vector<double> d_centers;
    std::vector<double> d_width_roots;
    std::vector<double> d_weights;

    [[nodiscard]] std::vector<std::span<const double>> blocks() const {
        return {d_centers, d_width_roots, d_weights};
    }
};

/// Summed squared error over all channels of the indexed samples and its gradient.
[[nodiscard]] std::pair<double, RbfGradient> rbf_cost_and_gradients(
    const RbfNetwork& net, const Matrix& inputs, const Matrix& targets,
    std::span<const std::size_t> indices);

/// Centers from k-means over the inputs, beta = 1, weights ~ N(0, 0.05^2).
[[nodiscard]] RbfNetwork init_rbf_network(const Matrix& inputs, std::size_t channels,
                                          std::size_t units, std::uint64_t seed);

struct RbfFit {
    RbfNetwork network;
    TrainHistory history;  // val_nmse is the channel-averaged validation nMSE
};

/// Trains every parameter by mini-batch Adam on the concatenated [q, qd, qdd]
/// inputs of already standardized datasets; cfg.rank is the unit count.
[[nodiscard]] RbfFit fit_rbf_network(const TrajectoryDataset& train_set,
                                     const TrajectoryDataset& validation_set,
                                     const TrainConfig& cfg);

}  // namespace functensor

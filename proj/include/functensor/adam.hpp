#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace functensor {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    /// Throws ConfigError unless 0 < beta1, beta2 < 1, eps > 0 and learning_rate > 0.
    void validate() const;
};

/// First/second moment accumulators, one block per parameter block.
struct AdamState {
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::uint64_t step = 0;

    /// Zeroed state shaped after the given parameter blocks.
    [[nodiscard]] static AdamState for_blocks(std::span<const std::span<double>> params);
};

/// One bias-corrected Adam update over every parameter block.
/// Throws ShapeError if params, grads and state disagree in shape.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace functensor

#pragma once

#include "functensor/dataset.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace fixtures {

using Target = std::function<double(std::span<const double>, std::span<const double>,
                                    std::span<const double>, std::size_t)>;

/// Uniform inputs in [-1, 1]^(3 * dof) with targets from `fn` per channel.
inline functensor::TrajectoryDataset make_dataset(std::size_t n, std::size_t dof,
                                                  std::size_t channels, std::uint64_t seed,
                                                  const Target& fn) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    functensor::TrajectoryDataset ds;
    ds.dof = dof;
    ds.channels = channels;
    ds.positions = functensor::Matrix(n, dof);
    ds.velocities = functensor::Matrix(n, dof);
    ds.accelerations = functensor::Matrix(n, dof);
    ds.torques = functensor::Matrix(n, channels);
    ds.source = "fixture";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dof; ++j) {
            ds.positions(i, j) = u(rng);
            ds.velocities(i, j) = u(rng);
            ds.accelerations(i, j) = u(rng);
        }
        for (std::size_t c = 0; c < channels; ++c) {
            ds.torques(i, c) =
                fn(ds.positions.row(i), ds.velocities.row(i), ds.accelerations.row(i), c);
        }
    }
    return ds;
}

}  // namespace fixtures

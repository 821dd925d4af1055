#pragma once

#include "functensor/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace functensor {

struct KMeansOptions {
    std::size_t max_iterations = 100;
    double relative_tolerance = 1e-6;
};

struct KMeansResult {
    Matrix centers;                         // k x c
    std::vector<double> objective_history;  // J after seeding, then after each Lloyd iteration
    std::size_t iterations = 0;

    [[nodiscard]] double objective() const { return objective_history.back(); }
};

/// Sum over points of the squared distance to the nearest center.
[[nodiscard]] double kmeans_objective(const Matrix& points, const Matrix& centers);

/// Lloyd's algorithm from deterministic k-means++ seeding.
///
/// Stops once the assignment is stable, the relative decrease of J falls below
/// `relative_tolerance`, or after `max_iterations`. An empty cluster is re-seeded
/// with the point farthest from its current center. Throws ConfigError if
/// k == 0, points is empty, or k > N.
[[nodiscard]] KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                                  const KMeansOptions& options = {});

}  // namespace functensor

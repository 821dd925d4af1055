#include "functensor/kmeans.hpp"

#include "functensor/errors.hpp"

#include <limits>
#include <random>
#include <string>

namespace functensor {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct Assignment {
    std::vector<std::size_t> label;
    std::vector<double> distance;  // squared distance to the assigned center
    double objective = 0.0;
};

Assignment assign(const Matrix& points, const Matrix& centers) {
    Assignment a;
    a.label.resize(points.rows);
    a.distance.resize(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        auto p = points.row(i);
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < centers.rows; ++k) {
            const double d = squared_distance(p, centers.row(k));
            if (d < best) {
                best = d;
                arg = k;
            }
        }
        a.label[i] = arg;
        a.distance[i] = best;
        a.objective += best;
    }
    return a;
}

Matrix seed_plus_plus(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
    Matrix centers(k, points.cols);
    std::uniform_int_distribution<std::size_t> pick(0, points.rows - 1);
    std::size_t first = pick(rng);
    std::copy_n(points.row(first).begin(), points.cols, centers.row(0).begin());

    std::vector<double> nearest(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        nearest[i] = squared_distance(points.row(i), centers.row(0));
    }
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : nearest) total += d;
        std::size_t chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = points.rows - 1;
            for (std::size_t i = 0; i < points.rows; ++i) {
                target -= nearest[i];
                if (target < 0.0 && nearest[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        std::copy_n(points.row(chosen).begin(), points.cols, centers.row(c).begin());
        for (std::size_t i = 0; i < points.rows; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centers.row(c)));
        }
    }
    return centers;
}

}  // namespace

double kmeans_objective(const Matrix& points, const Matrix& centers) {
    return assign(points, centers).objective;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (k == 0) throw ConfigError("kmeans: k must be >= 1");
    if (points.rows == 0) throw ConfigError("kmeans: no points");
    if (k > points.rows) {
        throw ConfigError("kmeans: k = " + std::to_string(k) + " exceeds the number of points (" +
                          std::to_string(points.rows) + ")");
    }

    std::mt19937_64 rng(seed);
    KMeansResult result;
    result.centers = seed_plus_plus(points, k, rng);
    Assignment current = assign(points, result.centers);
    result.objective_history.push_back(current.objective);

    const std::size_t c = points.cols;
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        // Update step: cluster means.
        std::fill(result.centers.data.begin(), result.centers.data.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < points.rows; ++i) {
            auto dst = result.centers.row(current.label[i]);
            auto p = points.row(i);
            for (std::size_t j = 0; j < c; ++j) dst[j] += p[j];
            ++counts[current.label[i]];
        }
        for (std::size_t cl = 0; cl < k; ++cl) {
            if (counts[cl] == 0) {
                std::size_t far = 0;
                for (std::size_t i = 1; i < points.rows; ++i) {
                    if (current.distance[i] > current.distance[far]) far = i;
                }
                std::copy_n(points.row(far).begin(), c, result.centers.row(cl).begin());
                current.distance[far] = 0.0;
                continue;
            }
            for (double& v : result.centers.row(cl)) v /= static_cast<double>(counts[cl]);
        }

        Assignment next = assign(points, result.centers);
        const double previous = current.objective;
        const bool stable = next.label == current.label;
        current = std::move(next);
        result.objective_history.push_back(current.objective);
        result.iterations = iter + 1;
        if (stable || current.objective == 0.0 ||
            previous - current.objective <= options.relative_tolerance * previous) {
            break;
        }
    }
    return result;
}

}  // namespace functensor

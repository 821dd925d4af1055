#include "functensor/baselines.hpp"

#include "functensor/errors.hpp"
#include "functensor/kmeans.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace functensor {

namespace {

constexpr double kOutputInitStd = 0.05;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<double> LinearModel::predict(std::span<const double> x) const {
    if (x.size() != weights.cols) {
        throw ShapeError("linear model expects " + std::to_string(weights.cols) + " inputs, got " +
                         std::to_string(x.size()));
    }
    std::vector<double> y(bias);
    for (std::size_t k = 0; k < weights.rows; ++k) {
        auto w = weights.row(k);
        for (std::size_t j = 0; j < x.size(); ++j) y[k] += w[j] * x[j];
    }
    return y;
}

Matrix LinearModel::predict(const Matrix& inputs) const {
    Matrix out(inputs.rows, weights.rows);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        auto y = predict(inputs.row(i));
        std::copy(y.begin(), y.end(), out.row(i).begin());
    }
    return out;
}

LinearModel fit_linear(const Matrix& inputs, const Matrix& targets, double ridge) {
    if (inputs.rows != targets.rows) throw ShapeError("fit_linear: row counts differ");
    if (inputs.rows == 0) throw ConfigError("fit_linear: no samples");
    if (!(ridge >= 0.0)) throw ConfigError("fit_linear: ridge must be >= 0");
    const auto n = static_cast<Eigen::Index>(inputs.rows);
    const auto d = static_cast<Eigen::Index>(inputs.cols);
    const auto c = static_cast<Eigen::Index>(targets.cols);
    const Eigen::Index extra = ridge > 0.0 ? d : 0;

    // [X 1; sqrt(ridge) I 0] [W^T; b^T] ~= [Y; 0]
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + extra, d + 1);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + extra, c);
    a.topLeftCorner(n, d) = Eigen::Map<const RowMatrix>(inputs.data.data(), n, d);
    a.col(d).head(n).setOnes();
    rhs.topRows(n) = Eigen::Map<const RowMatrix>(targets.data.data(), n, c);
    if (extra > 0) a.bottomLeftCorner(d, d).diagonal().setConstant(std::sqrt(ridge));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < d + 1) {
        throw NumericalError("fit_linear: design matrix is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(d + 1) +
                             "); use a positive ridge");
    }
    const Eigen::MatrixXd solution = qr.solve(rhs);  // (d+1) x C

    LinearModel model;
    model.weights = Matrix(targets.cols, inputs.cols);
    model.bias.resize(targets.cols);
    for (Eigen::Index k = 0; k < c; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) model.weights(k, j) = solution(j, k);
        model.bias[k] = solution(d, k);
    }
    return model;
}

std::vector<double> RbfNetwork::predict(std::span<const double> x) const {
    if (x.size() != centers.cols) {
        throw ShapeError("RBF network expects " + std::to_string(centers.cols) + " inputs, got " +
                         std::to_string(x.size()));
    }
    std::vector<double> y(weights.cols, 0.0);
    for (std::size_t i = 0; i < units(); ++i) {
        const double phi = std::exp(-beta(i) * squared_distance(x, centers.row(i)));
        if (phi == 0.0) continue;
        auto w = weights.row(i);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += w[k] * phi;
    }
    return y;
}

Matrix RbfNetwork::predict(const Matrix& inputs) const {
    Matrix out(inputs.rows, weights.cols);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
        auto y = predict(inputs.row(i));
        std::copy(y.begin(), y.end(), out.row(i).begin());
    }
    return out;
}

std::vector<std::span<double>> RbfNetwork::parameter_blocks() {
    return {centers.data, width_roots, weights.data};
}

std::pair<double, RbfGradient> rbf_cost_and_gradients(const RbfNetwork& net, const Matrix& inputs,
                                                      const Matrix& targets,
                                                      std::span<const std::size_t> indices) {
    if (inputs.cols != net.centers.cols || targets.cols != net.weights.cols ||
        inputs.rows != targets.rows) {
        throw ShapeError("rbf_cost_and_gradients: data does not match the network");
    }
    const std::size_t r = net.units();
    const std::size_t d = inputs.cols;
    const std::size_t channels = targets.cols;
    RbfGradient g{std::vector<double>(net.centers.data.size(), 0.0), std::vector<double>(r, 0.0),
                  std::vector<double>(net.weights.data.size(), 0.0)};
    std::vector<double> phi(r), dist(r), d_out(channels);
    double total = 0.0;
    for (std::size_t idx : indices) {
        auto x = inputs.row(idx);
        std::vector<double> y(channels, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            dist[i] = squared_distance(x, net.centers.row(i));
            phi[i] = std::exp(-net.beta(i) * dist[i]);
            auto w = net.weights.row(i);
            for (std::size_t k = 0; k < channels; ++k) y[k] += w[k] * phi[i];
        }
        for (std::size_t k = 0; k < channels; ++k) {
            const double e = targets(idx, k) - y[k];
            total += e * e;
            d_out[k] = -2.0 * e;
        }
        for (std::size_t i = 0; i < r; ++i) {
            if (phi[i] == 0.0) continue;
            auto w = net.weights.row(i);
            double d_phi = 0.0;
            for (std::size_t k = 0; k < channels; ++k) {
                g.d_weights[i * channels + k] += d_out[k] * phi[i];
                d_phi += d_out[k] * w[k];
            }
            const double s = net.width_roots[i];
            // phi = exp(-s^2 |x - c|^2)
            g.d_width_roots[i] += d_phi * phi[i] * (-2.0 * s * dist[i]);
            const double coef = d_phi * phi[i] * (-2.0 * s * s);
            auto c = net.centers.row(i);
            for (std::size_t j = 0; j < d; ++j) g.d_centers[i * d + j] += coef * (c[j] - x[j]);
        }
    }
    return {total, std::move(g)};
}

RbfNetwork init_rbf_network(const Matrix& inputs, std::size_t channels, std::size_t units,
                            std::uint64_t seed) {
    auto rng = make_stream(seed, 0, kInitStream);
    RbfNetwork net;
    net.centers = kmeans(inputs, units, rng()).centers;
    net.width_roots.assign(units, 1.0);
    net.weights = Matrix(units, channels);
    std::normal_distribution<double> normal(0.0, kOutputInitStd);
    for (double& w : net.weights.data) w = normal(rng);
    return net;
}

RbfFit fit_rbf_network(const TrajectoryDataset& train_set, const TrajectoryDataset& validation_set,
                       const TrainConfig& cfg) {
    cfg.validate();
    if (validation_set.size() == 0) throw ConfigError("validation set is empty");
    const Matrix x_train = train_set.inputs();
    const Matrix x_val = validation_set.inputs();
    const auto variance = Standardizer::fit(train_set, false).target_variance;

    RbfFit fit;
    fit.network = init_rbf_network(x_train, train_set.channels, cfg.rank, cfg.seed);
    fit.history = run_minibatch_adam(
        fit.network, train_set.size(), cfg, make_stream(cfg.seed, 0, kShuffleStream),
        [&](const RbfNetwork& net, std::span<const std::size_t> batch) {
            return rbf_cost_and_gradients(net, x_train, train_set.torques, batch);
        },
        [&](const RbfNetwork& net) {
            const auto scores = nmse(net.predict(x_val), validation_set.torques, variance);
            return std::accumulate(scores.begin(), scores.end(), 0.0) /
                   static_cast<double>(scores.size());
        });
    return fit;
}

}  // namespace functensor

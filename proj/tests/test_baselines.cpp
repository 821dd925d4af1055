#include "functensor/baselines.hpp"
#include "functensor/errors.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

namespace functensor {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    Matrix m(r, c);
    for (double& v : m.data) v = n(rng);
    return m;
}

TEST(LinearTest, ExactRecovery) {
    const auto x = random_matrix(50, 4, 1);
    const Matrix w_true = random_matrix(2, 4, 2);
    const std::vector<double> b_true{0.7, -3.0};
    Matrix y(50, 2);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            y(i, k) = b_true[k];
            for (std::size_t j = 0; j < 4; ++j) y(i, k) += w_true(k, j) * x(i, j);
        }
    const auto model = fit_linear(x, y, 0.0);
    for (std::size_t i = 0; i < w_true.data.size(); ++i)
        EXPECT_NEAR(model.weights.data[i], w_true.data[i], 1e-10);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(model.bias[k], b_true[k], 1e-10);
    const auto pred = model.predict(x);
    for (std::size_t i = 0; i < y.data.size(); ++i) EXPECT_NEAR(pred.data[i], y.data[i], 1e-10);
}

TEST(LinearTest, ZeroInputsGiveMeanBias) {
    const Matrix x(10, 3);
    Matrix y(10, 1);
    for (std::size_t i = 0; i < 10; ++i) y(i, 0) = static_cast<double>(i);
    const auto model = fit_linear(x, y, 1e-8);
    for (double w : model.weights.data) EXPECT_NEAR(w, 0.0, 1e-12);
    EXPECT_NEAR(model.bias[0], 4.5, 1e-10);
}

TEST(LinearTest, RankDeficientWithoutRidgeThrows) {
    const Matrix x(10, 3);
    const Matrix y(10, 1, 1.0);
    EXPECT_THROW((void)fit_linear(x, y, 0.0), NumericalError);
    EXPECT_THROW((void)fit_linear(x, Matrix(9, 1), 0.0), ShapeError);
}

TEST(LinearTest, ResidualsOrthogonalToInputs) {
    const auto x = random_matrix(80, 5, 3);
    const auto y = random_matrix(80, 2, 4);
    const auto model = fit_linear(x, y, 0.0);
    const auto pred = model.predict(x);
    for (std::size_t k = 0; k < 2; ++k) {
        double sum_res = 0.0;
        for (std::size_t i = 0; i < 80; ++i) sum_res += y(i, k) - pred(i, k);
        EXPECT_NEAR(sum_res, 0.0, 1e-9);
        for (std::size_t j = 0; j < 5; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 80; ++i) dot += x(i, j) * (y(i, k) - pred(i, k));
            EXPECT_NEAR(dot, 0.0, 1e-9);
        }
    }
}

TEST(LinearTest, RidgeShrinksWeights) {
    const auto x = random_matrix(40, 3, 5);
    const auto y = random_matrix(40, 1, 6);
    const auto plain = fit_linear(x, y, 0.0);
    const auto ridged = fit_linear(x, y, 100.0);
    double a = 0.0, b = 0.0;
    for (double w : plain.weights.data) a += w * w;
    for (double w : ridged.weights.data) b += w * w;
    EXPECT_LT(b, a);
}

RbfNetwork random_network(std::size_t units, std::size_t d, std::size_t c, std::uint64_t seed) {
    RbfNetwork net;
    net.centers = random_matrix(units, d, seed);
    net.weights = random_matrix(units, c, seed + 1);
    std::mt19937_64 rng(seed + 2);
    std::uniform_real_distribution<double> u(0.5, 1.2);
    for (std::size_t i = 0; i < units; ++i) net.width_roots.push_back(u(rng));
    return net;
}

TEST(RbfNetworkTest, PredictMatchesDefinition) {
    const auto net = random_network(3, 2, 2, 7);
    const double x[] = {0.3, -0.1};
    const auto y = net.predict(x);
    for (std::size_t k = 0; k < 2; ++k) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double d2 = std::pow(x[0] - net.centers(i, 0), 2) + std::pow(x[1] - net.centers(i, 1), 2);
            expected += net.weights(i, k) * std::exp(-net.beta(i) * d2);
        }
        EXPECT_NEAR(y[k], expected, 1e-14);
    }
}

TEST(RbfNetworkTest, GradientMatchesFiniteDifference) {
    auto net = random_network(4, 3, 2, 11);
    const auto x = random_matrix(9, 3, 12);
    const auto y = random_matrix(9, 2, 13);
    std::vector<std::size_t> idx(9);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto [c, grad] = rbf_cost_and_gradients(net, x, y, idx);
    auto params = net.parameter_blocks();
    const auto analytic = grad.blocks();
    auto f = [&] { return rbf_cost_and_gradients(net, x, y, idx).first; };
    EXPECT_NEAR(c, f(), 1e-12);
    for (std::size_t b = 0; b < params.size(); ++b)
        for (std::size_t i = 0; i < params[b].size(); ++i) {
            const double numeric = oracle::central_difference(f, &params[b][i], 1e-6);
            EXPECT_LE(oracle::relative_error(analytic[b][i], numeric), 1e-5)
                << "block " << b << " entry " << i;
        }
}

TEST(RbfNetworkTest, LocalityFarFromCenters) {
    const auto net = random_network(3, 2, 1, 20);
    const double far[] = {50.0, 50.0};
    EXPECT_NEAR(net.predict(far)[0], 0.0, 1e-12);
}

TEST(RbfNetworkTest, RecoversOwnFunction) {
    const auto teacher = random_network(5, 3, 1, 31);
    auto label = [&](std::span<const double> q, std::span<const double> qd,
                     std::span<const double> qdd, std::size_t) {
        const double x[] = {q[0], qd[0], qdd[0]};
        return teacher.predict(x)[0];
    };
    const auto train_ds = fixtures::make_dataset(600, 1, 1, 32, label);
    const auto val_ds = fixtures::make_dataset(150, 1, 1, 33, label);
    TrainConfig cfg;
    cfg.rank = 5;
    cfg.learning_rate = 0.02;
    cfg.batch_size = 32;
    cfg.max_epochs = 400;
    cfg.patience = 40;
    const auto fit = fit_rbf_network(train_ds, val_ds, cfg);
    EXPECT_LE(fit.history.best_val_nmse(), 0.05);
}

TEST(RbfNetworkTest, InitUsesUnitBetaAndDeterministicSeed) {
    const auto x = random_matrix(40, 2, 40);
    const auto a = init_rbf_network(x, 2, 4, 3);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.beta(i), 1.0);
    EXPECT_EQ(a, init_rbf_network(x, 2, 4, 3));
    EXPECT_THROW((void)init_rbf_network(x, 2, 41, 3), ConfigError);
}

}  // namespace
}  // namespace functensor

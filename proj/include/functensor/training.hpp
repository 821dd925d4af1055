#pragma once

#include "functensor/adam.hpp"
#include "functensor/basis.hpp"
#include "functensor/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace functensor {

struct TrainConfig {
    std::size_t rank = 10;
    double learning_rate = 1e-3;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 2000;
    std::size_t patience = 50;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Free symmetric precision matrices instead of the L L^T factorization.
    Precision precision = Precision::Factored;
    /// Ridge penalty for the linear baseline.
    double ridge = 1e-8;
    /// Worker threads for per-channel training.
    std::size_t threads = 1;

    void validate() const;
    [[nodiscard]] AdamConfig adam() const {
        return {learning_rate, adam_beta1, adam_beta2, adam_eps};
    }
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_cost = 0.0;  // sum of squared errors accumulated over the epoch's batches
    double val_nmse = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;

    [[nodiscard]] double best_val_nmse() const { return epochs.at(best_epoch).val_nmse; }
};

/// Independent RNG stream for (seed, channel, purpose).
[[nodiscard]] std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t channel,
                                          std::uint64_t purpose);

inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;

/// Writes the history as tab-separated text (epoch, train_cost, val_nmse, seconds).
[[nodiscard]] std::string history_to_tsv(const TrainHistory& history);

/// Mini-batch Adam with early stopping on a monitored validation score.
///
/// `batch_gradient(const Model&, std::span<const std::size_t>)` returns a
/// {cost, gradient} pair; the gradient's `blocks()` must line up with
/// `model.parameter_blocks()` and hold the gradient of the summed cost. Updates
/// use the batch mean. `monitor(const Model&)` scores the model after each epoch
/// (lower is better). Returns with `model` set to the best-scoring snapshot.
template <class Model, class BatchGradient, class Monitor>
TrainHistory run_minibatch_adam(Model& model, std::size_t n_train, const TrainConfig& cfg,
                                std::mt19937_64 shuffle_rng, BatchGradient&& batch_gradient,
                                Monitor&& monitor) {
    cfg.validate();
    if (n_train == 0) throw ConfigError("training set is empty");
    if (cfg.batch_size > n_train) {
        throw ConfigError("batch_size " + std::to_string(cfg.batch_size) +
                          " exceeds training set size " + std::to_string(n_train));
    }
    const AdamConfig adam_cfg = cfg.adam();
    auto blocks = model.parameter_blocks();
    AdamState state = AdamState::for_blocks(blocks);

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<std::vector<double>> scaled(blocks.size());
    std::vector<std::span<const double>> grad_views(blocks.size());

    TrainHistory history;
    Model best = model;
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    const auto start = std::chrono::steady_clock::now();

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_cost = 0.0;
        for (std::size_t begin = 0; begin < n_train; begin += cfg.batch_size) {
            const std::size_t end = std::min(n_train, begin + cfg.batch_size);
            std::span<const std::size_t> batch(order.data() + begin, end - begin);
            auto [cost, grad] = batch_gradient(std::as_const(model), batch);
            if (!std::isfinite(cost)) {
                throw NumericalError("training diverged: non-finite cost at epoch " +
                                     std::to_string(epoch));
            }
            epoch_cost += cost;
            const double inv = 1.0 / static_cast<double>(batch.size());
            auto gb = grad.blocks();
            for (std::size_t b = 0; b < gb.size(); ++b) {
                scaled[b].resize(gb[b].size());
                for (std::size_t i = 0; i < gb[b].size(); ++i) scaled[b][i] = gb[b][i] * inv;
                grad_views[b] = scaled[b];
            }
            blocks = model.parameter_blocks();
            adam_step(blocks, grad_views, state, adam_cfg);
        }

        const double score = monitor(std::as_const(model));
        if (!std::isfinite(score)) {
            throw NumericalError("training diverged: non-finite validation score at epoch " +
                                 std::to_string(epoch));
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        history.epochs.push_back({epoch, epoch_cost, score, seconds});

        if (score < best_score) {
            best_score = score;
            best = model;
            history.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best > cfg.patience) {
            break;
        }
    }
    model = std::move(best);
    return history;
}

}  // namespace functensor

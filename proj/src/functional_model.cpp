#include "functensor/functional_model.hpp"

#include "functensor/errors.hpp"
#include "functensor/kmeans.hpp"
#include "functensor/parallel.hpp"

#include <numeric>
#include <random>
#include <string>

namespace functensor {

namespace {

constexpr double kCoreInitStd = 0.05;

/// Scratch buffers for one sample's forward/backward pass.
struct Workspace {
    std::array<FactorRow, 3> rows;
    std::vector<double> mode1;   // r x r: core contracted with row 1
    std::vector<double> mode12;  // r: then with row 2
    std::vector<double> outer23; // r x r: row2 (x) row3
    std::array<std::vector<double>, 3> d_rows;

    explicit Workspace(std::size_t r)
        : mode1(r * r), mode12(r), outer23(r * r),
          d_rows{std::vector<double>(r), std::vector<double>(r), std::vector<double>(r)} {}
};

void evaluate_rows(const FunctionalModel& model, const std::array<Matrix, 3>& inputs,
                   std::size_t i, Workspace& ws) {
    for (std::size_t m = 0; m < 3; ++m) ws.rows[m] = basis_row(inputs[m].row(i), model.bases[m]);
}

/// Phi from precomputed rows; fills mode1/mode12 for the Tucker backward pass.
double fused_forward(const FunctionalModel& model, Workspace& ws) {
    const std::size_t r = model.rank;
    const auto& a1 = ws.rows[0];
    const auto& a2 = ws.rows[1];
    const auto& a3 = ws.rows[2];
    if (model.kind == ModelKind::Parafac) {
        double phi = 0.0;
        for (std::size_t k = 0; k < r; ++k) phi += model.weights[k] * a1[k] * a2[k] * a3[k];
        return phi;
    }
    // Contract mode 1, then 2, then 3.
    const std::size_t rr = r * r;
    auto g = model.core.values();
    std::fill(ws.mode1.begin(), ws.mode1.end(), 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        const double w = a1[i];
        const double* slice = g.data() + i * rr;
        for (std::size_t jk = 0; jk < rr; ++jk) ws.mode1[jk] += w * slice[jk];
    }
    std::fill(ws.mode12.begin(), ws.mode12.end(), 0.0);
    for (std::size_t j = 0; j < r; ++j) {
        const double w = a2[j];
        const double* row = ws.mode1.data() + j * r;
        for (std::size_t k = 0; k < r; ++k) ws.mode12[k] += w * row[k];
    }
    double phi = 0.0;
    for (std::size_t k = 0; k < r; ++k) phi += a3[k] * ws.mode12[k];
    return phi;
}

/// Adds `scale * dPhi/dtheta` to the core gradient and fills d_rows with dPhi/da_m.
void fused_backward(const FunctionalModel& model, Workspace& ws, double scale,
                    std::vector<double>& d_core) {
    const std::size_t r = model.rank;
    const auto& a1 = ws.rows[0];
    const auto& a2 = ws.rows[1];
    const auto& a3 = ws.rows[2];
    if (model.kind == ModelKind::Parafac) {
        for (std::size_t k = 0; k < r; ++k) {
            const double w = model.weights[k];
            d_core[k] += scale * a1[k] * a2[k] * a3[k];
            ws.d_rows[0][k] = w * a2[k] * a3[k];
            ws.d_rows[1][k] = w * a1[k] * a3[k];
            ws.d_rows[2][k] = w * a1[k] * a2[k];
        }
        return;
    }
    const std::size_t rr = r * r;
    auto g = model.core.values();
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t k = 0; k < r; ++k) ws.outer23[j * r + k] = a2[j] * a3[k];
    }
    for (std::size_t i = 0; i < r; ++i) {
        const double* slice = g.data() + i * rr;
        double* d_slice = d_core.data() + i * rr;
        const double w = scale * a1[i];
        double dot = 0.0;
        for (std::size_t jk = 0; jk < rr; ++jk) {
            dot += slice[jk] * ws.outer23[jk];
            d_slice[jk] += w * ws.outer23[jk];
        }
        ws.d_rows[0][i] = dot;
    }
    for (std::size_t j = 0; j < r; ++j) {
        const double* row = ws.mode1.data() + j * r;
        double dot = 0.0;
        for (std::size_t k = 0; k < r; ++k) dot += row[k] * a3[k];
        ws.d_rows[1][j] = dot;
    }
    std::copy(ws.mode12.begin(), ws.mode12.end(), ws.d_rows[2].begin());
}

void check_samples(const FunctionalModel& model, const ChannelSamples& samples) {
    for (const auto& block : samples.inputs) {
        if (block.rows != samples.size()) {
            throw ShapeError("input blocks and targets differ in sample count");
        }
        if (block.cols != model.dim) {
            throw ShapeError("input dimension " + std::to_string(block.cols) +
                             " does not match model dimension " + std::to_string(model.dim));
        }
    }
}

double variance(const std::vector<double>& y) {
    if (y.empty()) throw ConfigError("empty target vector");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    return var / static_cast<double>(y.size());
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::Tucker ? "tucker" : "parafac";
}

std::vector<std::span<double>> FunctionalModel::parameter_blocks() {
    std::vector<std::span<double>> blocks;
    if (kind == ModelKind::Tucker) {
        blocks.emplace_back(core.values());
    } else {
        blocks.emplace_back(weights);
    }
    for (auto& b : bases) {
        blocks.emplace_back(b.centers);
        blocks.emplace_back(b.shape);
    }
    return blocks;
}

std::size_t FunctionalModel::parameter_count() const {
    std::size_t n = kind == ModelKind::Tucker ? core.size() : weights.size();
    for (const auto& b : bases) n += b.centers.size() + b.shape.size();
    return n;
}

void FunctionalModel::validate() const {
    if (rank == 0 || dim == 0) throw ShapeError("model rank and dim must be >= 1");
    if (kind == ModelKind::Tucker) {
        if (core.dims() != std::vector<std::size_t>{rank, rank, rank}) {
            throw ShapeError("Tucker core must be rank x rank x rank");
        }
    } else if (weights.size() != rank) {
        throw ShapeError("PARAFAC weights must have length rank");
    }
    for (const auto& b : bases) {
        b.validate();
        if (b.rank != rank || b.dim != dim) {
            throw ShapeError("basis rank/dim does not match the model");
        }
    }
}

ChannelSamples channel_samples(const TrajectoryDataset& ds, std::size_t channel) {
    return {{ds.positions, ds.velocities, ds.accelerations}, ds.torque_channel(channel)};
}

FunctionalGradient FunctionalGradient::zeros_like(const FunctionalModel& model) {
    FunctionalGradient g;
    g.d_core.assign(model.kind == ModelKind::Tucker ? model.core.size() : model.weights.size(),
                    0.0);
    for (std::size_t m = 0; m < 3; ++m) g.bases[m] = BasisGradient::zeros_like(model.bases[m]);
    return g;
}

std::vector<std::span<const double>> FunctionalGradient::blocks() const {
    std::vector<std::span<const double>> out;
    out.emplace_back(d_core);
    for (const auto& b : bases) {
        out.emplace_back(b.d_centers);
        out.emplace_back(b.d_shape);
    }
    return out;
}

FunctionalModel init_model(const std::array<Matrix, 3>& train_inputs, const TrainConfig& cfg,
                           ModelKind kind, std::size_t dof_index) {
    cfg.validate();
    const std::size_t dim = train_inputs[0].cols;
    const std::size_t n = train_inputs[0].rows;
    for (const auto& block : train_inputs) {
        if (block.cols != dim || block.rows != n) {
            throw ShapeError("init_model: input blocks differ in shape");
        }
    }

    auto rng = make_stream(cfg.seed, dof_index, kInitStream);
    FunctionalModel model;
    model.kind = kind;
    model.rank = cfg.rank;
    model.dim = dim;
    model.dof_index = dof_index;
    for (std::size_t m = 0; m < 3; ++m) {
        auto clusters = kmeans(train_inputs[m], cfg.rank, rng());
        model.bases[m] = GaussianBasis::identity(cfg.rank, dim, cfg.precision);
        model.bases[m].centers = std::move(clusters.centers.data);
    }

    std::normal_distribution<double> normal(0.0, kCoreInitStd);
    if (kind == ModelKind::Tucker) {
        model.core = DenseTensor({cfg.rank, cfg.rank, cfg.rank});
        for (double& v : model.core.values()) v = normal(rng);
    } else {
        model.weights.resize(cfg.rank);
        for (double& v : model.weights) v = normal(rng);
    }
    return model;
}

double forward(const FunctionalModel& model, std::span<const double> x1,
               std::span<const double> x2, std::span<const double> x3) {
    const std::array<FactorRow, 3> rows{basis_row(x1, model.bases[0]),
                                        basis_row(x2, model.bases[1]),
                                        basis_row(x3, model.bases[2])};
    if (model.kind == ModelKind::Tucker) return tucker_eval(model.core, rows);
    return parafac_eval(model.weights, rows);
}

std::vector<double> predict(const FunctionalModel& model, const std::array<Matrix, 3>& inputs) {
    for (const auto& block : inputs) {
        if (block.cols != model.dim || block.rows != inputs[0].rows) {
            throw ShapeError("predict: input blocks do not match the model");
        }
    }
    Workspace ws(model.rank);
    std::vector<double> out(inputs[0].rows);
    for (std::size_t i = 0; i < out.size(); ++i) {
        evaluate_rows(model, inputs, i, ws);
        out[i] = fused_forward(model, ws);
    }
    return out;
}

double cost(const FunctionalModel& model, const ChannelSamples& samples,
            std::span<const std::size_t> indices) {
    check_samples(model, samples);
    if (indices.empty()) throw ConfigError("cost: empty batch");
    Workspace ws(model.rank);
    double total = 0.0;
    for (std::size_t i : indices) {
        evaluate_rows(model, samples.inputs, i, ws);
        const double residual = samples.targets[i] - fused_forward(model, ws);
        total += residual * residual;
    }
    return total;
}

double cost(const FunctionalModel& model, const ChannelSamples& samples) {
    std::vector<std::size_t> all(samples.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return cost(model, samples, all);
}

std::pair<double, FunctionalGradient> cost_and_gradients(const FunctionalModel& model,
                                                         const ChannelSamples& samples,
                                                         std::span<const std::size_t> indices) {
    check_samples(model, samples);
    if (indices.empty()) throw ConfigError("gradients: empty batch");
    Workspace ws(model.rank);
    auto grad = FunctionalGradient::zeros_like(model);
    double total = 0.0;
    for (std::size_t i : indices) {
        evaluate_rows(model, samples.inputs, i, ws);
        const double residual = samples.targets[i] - fused_forward(model, ws);
        total += residual * residual;
        if (residual == 0.0) continue;
        const double d_phi = -2.0 * residual;
        fused_backward(model, ws, d_phi, grad.d_core);
        for (std::size_t m = 0; m < 3; ++m) {
            basis_backward_into(samples.inputs[m].row(i), model.bases[m], ws.d_rows[m], d_phi,
                                grad.bases[m]);
        }
    }
    return {total, std::move(grad)};
}

FunctionalGradient gradients(const FunctionalModel& model, const ChannelSamples& samples) {
    std::vector<std::size_t> all(samples.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return cost_and_gradients(model, samples, all).second;
}

double channel_nmse(const FunctionalModel& model, const ChannelSamples& samples,
                    double train_variance) {
    if (!(train_variance > 0.0)) throw DomainError("training variance must be > 0");
    check_samples(model, samples);
    const auto pred = predict(model, samples.inputs);
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - samples.targets[i];
        sse += d * d;
    }
    return sse / static_cast<double>(pred.size()) / train_variance;
}

TrainHistory train(FunctionalModel& model, const ChannelSamples& train_set,
                   const ChannelSamples& validation_set, const TrainConfig& cfg) {
    model.validate();
    check_samples(model, train_set);
    check_samples(model, validation_set);
    if (validation_set.size() == 0) throw ConfigError("validation set is empty");
    const double var = variance(train_set.targets);
    if (!(var > 0.0)) throw ConfigError("training targets have zero variance");

    return run_minibatch_adam(
        model, train_set.size(), cfg, make_stream(cfg.seed, model.dof_index, kShuffleStream),
        [&](const FunctionalModel& m, std::span<const std::size_t> batch) {
            return cost_and_gradients(m, train_set, batch);
        },
        [&](const FunctionalModel& m) { return channel_nmse(m, validation_set, var); });
}

std::vector<TrainedChannel> train_all_dofs(const TrajectoryDataset& train_set,
                                           const TrajectoryDataset& validation_set,
                                           const TrainConfig& cfg, ModelKind kind) {
    if (train_set.channels == 0) throw ConfigError("dataset has no torque channels");
    if (validation_set.channels != train_set.channels || validation_set.dof != train_set.dof) {
        throw ShapeError("train and validation sets differ in layout");
    }
    std::vector<TrainedChannel> out(train_set.channels);
    const std::array<Matrix, 3> inputs{train_set.positions, train_set.velocities,
                                       train_set.accelerations};
    parallel_for(train_set.channels, cfg.threads, [&](std::size_t k) {
        auto model = init_model(inputs, cfg, kind, k);
        auto tr = channel_samples(train_set, k);
        auto va = channel_samples(validation_set, k);
        auto history = train(model, tr, va, cfg);
        out[k] = {std::move(model), std::move(history)};
    });
    return out;
}

}  // namespace functensor

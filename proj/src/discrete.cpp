#include "functensor/discrete.hpp"

#include "functensor/errors.hpp"
#include "functensor/tensor.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace functensor {

namespace {

constexpr double kEmbeddingInitStd = 0.05;

struct DiscreteGradient {
    std::vector<std::vector<double>> d_embeddings;
    std::vector<double> d_weights;

    [[nodiscard]] std::vector<std::span<const double>> blocks() const {
        std::vector<std::span<const double>> out;
        out.emplace_back(d_weights);
        for (const auto& e : d_embeddings) out.emplace_back(e);
        return out;
    }
};

std::pair<double, DiscreteGradient> discrete_gradient(const DiscreteModel& model,
                                                      std::span<const DiscreteSample> samples,
                                                      std::span<const std::size_t> batch) {
    const std::size_t r = model.rank();
    const std::size_t s = model.embeddings.size();
    DiscreteGradient grad;
    grad.d_weights.assign(r, 0.0);
    for (const auto& e : model.embeddings) grad.d_embeddings.emplace_back(e.data.size(), 0.0);

    double total = 0.0;
    std::vector<double> prod(r);
    for (std::size_t idx : batch) {
        const auto& sample = samples[idx];
        const double residual = sample.target - model.evaluate(sample.values);
        total += residual * residual;
        const double d_phi = -2.0 * residual;
        for (std::size_t k = 0; k < r; ++k) {
            double p = 1.0;
            for (std::size_t v = 0; v < s; ++v) p *= model.embeddings[v](sample.values[v], k);
            grad.d_weights[k] += d_phi * p;
        }
        for (std::size_t v = 0; v < s; ++v) {
            double* row = grad.d_embeddings[v].data() + sample.values[v] * r;
            for (std::size_t k = 0; k < r; ++k) {
                double p = model.weights[k];
                for (std::size_t u = 0; u < s; ++u) {
                    if (u != v) p *= model.embeddings[u](sample.values[u], k);
                }
                row[k] += d_phi * p;
            }
        }
    }
    return {total, std::move(grad)};
}

}  // namespace

std::size_t Vocabulary::lookup(std::size_t variable, const std::string& label) const {
    if (variable >= index.size()) {
        throw ShapeError("variable " + std::to_string(variable) + " out of range");
    }
    auto it = index[variable].find(label);
    if (it == index[variable].end()) {
        throw ConfigError("unknown category '" + label + "' for variable " +
                          std::to_string(variable));
    }
    return it->second;
}

Vocabulary build_vocab(std::span<const LabeledSample> samples) {
    if (samples.empty()) throw ConfigError("build_vocab: no samples");
    const std::size_t s = samples.front().labels.size();
    if (s == 0) throw ConfigError("build_vocab: samples have no variables");
    Vocabulary vocab;
    vocab.index.resize(s);
    vocab.labels.resize(s);
    for (const auto& sample : samples) {
        if (sample.labels.size() != s) {
            throw ConfigError("build_vocab: samples differ in number of variables");
        }
        for (std::size_t v = 0; v < s; ++v) {
            auto [it, inserted] = vocab.index[v].try_emplace(sample.labels[v], vocab.labels[v].size());
            if (inserted) vocab.labels[v].push_back(sample.labels[v]);
        }
    }
    return vocab;
}

std::vector<DiscreteSample> encode(const Vocabulary& vocab, std::span<const LabeledSample> samples) {
    std::vector<DiscreteSample> out;
    out.reserve(samples.size());
    for (const auto& sample : samples) {
        if (sample.labels.size() != vocab.variables()) {
            throw ShapeError("sample arity does not match vocabulary");
        }
        DiscreteSample d;
        d.target = sample.target;
        for (std::size_t v = 0; v < sample.labels.size(); ++v) {
            d.values.push_back(vocab.lookup(v, sample.labels[v]));
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<std::span<double>> DiscreteModel::parameter_blocks() {
    std::vector<std::span<double>> out;
    out.emplace_back(weights);
    for (auto& e : embeddings) out.emplace_back(e.data);
    return out;
}

double DiscreteModel::evaluate(std::span<const std::size_t> values) const {
    if (values.size() != embeddings.size()) {
        throw ShapeError("expected " + std::to_string(embeddings.size()) + " indices, got " +
                         std::to_string(values.size()));
    }
    std::vector<FactorRow> rows;
    rows.reserve(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] >= embeddings[v].rows) {
            throw ConfigError("index " + std::to_string(values[v]) + " out of range for variable " +
                              std::to_string(v));
        }
        auto row = embeddings[v].row(values[v]);
        rows.emplace_back(row.begin(), row.end());
    }
    return parafac_eval(weights, rows);
}

double discrete_cost(const DiscreteModel& model, std::span<const DiscreteSample> samples) {
    double total = 0.0;
    for (const auto& s : samples) {
        const double r = s.target - model.evaluate(s.values);
        total += r * r;
    }
    return total;
}

DiscreteFit fit_discrete(std::span<const LabeledSample> samples, const TrainConfig& cfg) {
    cfg.validate();
    DiscreteFit fit;
    auto& model = fit.model;
    model.vocab = build_vocab(samples);
    const auto encoded = encode(model.vocab, samples);

    auto rng = make_stream(cfg.seed, 0, kInitStream);
    std::normal_distribution<double> normal(0.0, kEmbeddingInitStd);
    model.weights.resize(cfg.rank);
    for (double& w : model.weights) w = normal(rng);
    for (std::size_t v = 0; v < model.vocab.variables(); ++v) {
        Matrix e(model.vocab.cardinality(v), cfg.rank);
        for (double& x : e.data) x = normal(rng);
        model.embeddings.push_back(std::move(e));
    }

    double mean = 0.0;
    for (const auto& s : encoded) mean += s.target;
    mean /= static_cast<double>(encoded.size());
    double var = 0.0;
    for (const auto& s : encoded) var += (s.target - mean) * (s.target - mean);
    var /= static_cast<double>(encoded.size());
    // Constant targets have no variance to normalize by; monitor the mean squared error.
    const double scale = var > 0.0 ? var : 1.0;

    fit.history = run_minibatch_adam(
        model, encoded.size(), cfg, make_stream(cfg.seed, 0, kShuffleStream),
        [&](const DiscreteModel& m, std::span<const std::size_t> batch) {
            return discrete_gradient(m, encoded, batch);
        },
        [&](const DiscreteModel& m) {
            return discrete_cost(m, encoded) / static_cast<double>(encoded.size()) / scale;
        });
    return fit;
}

double predict_discrete(const DiscreteModel& model, std::span<const std::string> labels) {
    if (labels.size() != model.vocab.variables()) {
        throw ShapeError("expected " + std::to_string(model.vocab.variables()) + " labels, got " +
                         std::to_string(labels.size()));
    }
    std::vector<std::size_t> values(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v) values[v] = model.vocab.lookup(v, labels[v]);
    return model.evaluate(values);
}

std::vector<LabeledSample> parse_labeled_samples(const std::string& text,
                                                 const std::string& origin) {
    std::vector<LabeledSample> out;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        for (char& ch : line) {
            if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
        }
        std::istringstream cells(line);
        std::vector<std::string> fields;
        for (std::string f; cells >> f;) fields.push_back(f);
        if (fields.empty() || fields.front().front() == '#') continue;
        if (fields.size() < 2) {
            throw DataError(origin + ": row " + std::to_string(line_no) +
                            " needs at least one label and a target");
        }
        if (arity == 0) arity = fields.size();
        if (fields.size() != arity) {
            throw DataError(origin + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(arity));
        }
        LabeledSample s;
        const std::string& t = fields.back();
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s.target);
        if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(s.target)) {
            throw DataError(origin + ": row " + std::to_string(line_no) + ": target '" + t +
                            "' is not a finite number");
        }
        fields.pop_back();
        s.labels = std::move(fields);
        out.push_back(std::move(s));
    }
    if (out.empty()) throw DataError(origin + ": no samples");
    return out;
}

}  // namespace functensor

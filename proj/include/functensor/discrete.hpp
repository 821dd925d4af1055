#pragma once

#include "functensor/matrix.hpp"
#include "functensor/training.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace functensor {

/// Raw training tuple: one label per discrete variable plus a real target.
struct LabeledSample {
    std::vector<std::string> labels;
    double target = 0.0;
};

/// Label -> index map per variable, indices in first-occurrence order.
struct Vocabulary {
    std::vector<std::unordered_map<std::string, std::size_t>> index;
    std::vector<std::vector<std::string>> labels;

    [[nodiscard]] std::size_t variables() const { return index.size(); }
    [[nodiscard]] std::size_t cardinality(std::size_t variable) const {
        return labels.at(variable).size();
    }
    /// Throws ConfigError naming the variable on an unseen label.
    [[nodiscard]] std::size_t lookup(std::size_t variable, const std::string& label) const;
};

/// Sample with labels already mapped to indices.
struct DiscreteSample {
    std::vector<std::size_t> values;
    double target = 0.0;
};

/// Throws ConfigError on empty input or tuples of differing arity.
[[nodiscard]] Vocabulary build_vocab(std::span<const LabeledSample> samples);

[[nodiscard]] std::vector<DiscreteSample> encode(const Vocabulary& vocab,
                                                 std::span<const LabeledSample> samples);

/// PARAFAC over an F1 x ... x FS tensor of which only observed cells are known.
struct DiscreteModel {
    std::vector<Matrix> embeddings;  // F_i x rank
    std::vector<double> weights;     // rank
    Vocabulary vocab;

    [[nodiscard]] std::size_t rank() const { return weights.size(); }
    [[nodiscard]] std::vector<std::span<double>> parameter_blocks();

    /// Prediction for already-encoded indices.
    [[nodiscard]] double evaluate(std::span<const std::size_t> values) const;
};

/// Summed squared error over exactly the given observed cells.
[[nodiscard]] double discrete_cost(const DiscreteModel& model,
                                   std::span<const DiscreteSample> samples);

struct DiscreteFit {
    DiscreteModel model;
    TrainHistory history;  // val_nmse column holds the training nMSE
};

/// Fits embeddings and weights by mini-batch Adam on the observed entries.
/// Parameters start from N(0, 0.05^2). Early stopping monitors training nMSE.
[[nodiscard]] DiscreteFit fit_discrete(std::span<const LabeledSample> samples,
                                       const TrainConfig& cfg);

/// Throws ConfigError naming the variable if a label was never seen in training.
[[nodiscard]] double predict_discrete(const DiscreteModel& model,
                                      std::span<const std::string> labels);

/// Parses delimiter-separated rows: S label columns followed by a numeric target.
[[nodiscard]] std::vector<LabeledSample> parse_labeled_samples(const std::string& text,
                                                               const std::string& origin);

}  // namespace functensor

#include "functensor/experiment.hpp"

#include "functensor/baselines.hpp"
#include "functensor/config.hpp"
#include "functensor/errors.hpp"
#include "functensor/functional_model.hpp"

#include <algorithm>

namespace functensor {

Method parse_method(std::string_view name) {
    if (name == "tucker") return Method::Tucker;
    if (name == "parafac") return Method::Parafac;
    if (name == "linear") return Method::Linear;
    if (name == "rbf-net") return Method::RbfNet;
    throw ConfigError("unknown method '" + std::string(name) +
                      "' (expected tucker, parafac, linear or rbf-net)");
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Tucker: return "tucker";
        case Method::Parafac: return "parafac";
        case Method::Linear: return "linear";
        case Method::RbfNet: return "rbf-net";
    }
    return "unknown";
}

PreparedSplit prepare_split(const TrajectoryDataset& raw, std::uint64_t seed,
                            bool standardize_inputs) {
    PreparedSplit p;
    p.split = split(raw, seed);
    p.dataset_size = raw.size();
    const auto train_raw = raw.subset(p.split.train);
    p.standardizer = Standardizer::fit(train_raw, standardize_inputs);
    p.train = p.standardizer.apply(train_raw);
    p.validation = p.standardizer.apply(raw.subset(p.split.validation));
    p.test = p.standardizer.apply(raw.subset(p.split.test));
    return p;
}

TrainedMethod train_method(const PreparedSplit& data, Method method, const TrainConfig& cfg,
                           const std::string& manifest) {
    cfg.validate();
    TrainedMethod out;
    auto make_file = [&](AnyModel model, std::vector<std::size_t> channels) {
        ModelFile f;
        f.manifest = manifest;
        f.split_seed = data.split.seed;
        f.dof = data.train.dof;
        f.dataset_size = data.dataset_size;
        f.channels = std::move(channels);
        f.standardizer = data.standardizer;
        f.model = std::move(model);
        return f;
    };
    std::vector<std::size_t> all(data.train.channels);
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;

    switch (method) {
        case Method::Tucker:
        case Method::Parafac: {
            const auto kind = method == Method::Tucker ? ModelKind::Tucker : ModelKind::Parafac;
            for (auto& trained : train_all_dofs(data.train, data.validation, cfg, kind)) {
                const std::size_t k = trained.model.dof_index;
                out.files.push_back(make_file(std::move(trained.model), {k}));
                out.histories.push_back(std::move(trained.history));
            }
            break;
        }
        case Method::Linear: {
            out.files.push_back(make_file(fit_linear(data.train.inputs(), data.train.torques, cfg.ridge), all));
            break;
        }
        case Method::RbfNet: {
            auto fit = fit_rbf_network(data.train, data.validation, cfg);
            out.files.push_back(make_file(std::move(fit.network), all));
            out.histories.push_back(std::move(fit.history));
            break;
        }
    }
    return out;
}

std::vector<double> evaluate_models(std::span<const ModelFile> models, const TrajectoryDataset& raw,
                                    std::uint64_t seed, Subset subset, EvaluationAudit* audit) {
    if (models.empty()) throw ConfigError("no model files given");
    const ModelFile& first = models.front();
    for (const auto& m : models) {
        if (m.standardizer.digest() != first.standardizer.digest()) {
            throw ConfigError("model files were trained with different standardizers");
        }
        if (m.split_seed != seed) {
            throw ConfigError("model was trained on split seed " + std::to_string(m.split_seed) +
                              ", evaluation requested seed " + std::to_string(seed));
        }
        if (m.dof != raw.dof || m.standardizer.target_variance.size() != raw.channels) {
            throw ConfigError("model expects " + std::to_string(m.dof) + " joints / " +
                              std::to_string(m.standardizer.target_variance.size()) +
                              " torques, data has " + std::to_string(raw.dof) + " / " +
                              std::to_string(raw.channels));
        }
        if (m.dataset_size != raw.size()) {
            throw ConfigError("model was trained on a " + std::to_string(m.dataset_size) +
                              "-row dataset, data has " + std::to_string(raw.size()) + " rows");
        }
    }

    const SplitSpec s = split(raw, seed);
    const auto& rows = subset == Subset::Train        ? s.train
                       : subset == Subset::Validation ? s.validation
                                                      : s.test;
    if (audit) {
        audit->rows_read = rows;
        std::vector<std::size_t> overlap;
        std::set_intersection(rows.begin(), rows.end(), s.train.begin(), s.train.end(),
                              std::back_inserter(overlap));
        audit->disjoint_from_train = overlap.empty();
    }
    const auto data = first.standardizer.apply(raw.subset(rows));

    Matrix predictions(data.size(), raw.channels);
    std::vector<int> covered(raw.channels, 0);
    for (const auto& m : models) {
        const Matrix y = m.predict(data);
        for (std::size_t j = 0; j < m.channels.size(); ++j) {
            const std::size_t ch = m.channels[j];
            ++covered[ch];
            for (std::size_t i = 0; i < data.size(); ++i) predictions(i, ch) = y(i, j);
        }
    }
    for (std::size_t k = 0; k < covered.size(); ++k) {
        if (covered[k] != 1) {
            throw ConfigError("torque channel " + std::to_string(k) + " is covered by " +
                              std::to_string(covered[k]) + " model files, expected exactly 1");
        }
    }
    return nmse(predictions, data.torques, first.standardizer.target_variance);
}

std::vector<ExperimentReport> run_sweep(const TrajectoryDataset& raw, Method method,
                                        std::span<const std::size_t> ranks,
                                        std::span<const std::uint64_t> seeds,
                                        const TrainConfig& cfg, bool standardize_inputs) {
    if (ranks.empty() || seeds.empty()) throw ConfigError("sweep needs ranks and seeds");
    std::vector<ExperimentReport> reports;
    for (std::size_t rank : ranks) {
        TrainConfig rc = cfg;
        rc.rank = rank;
        ExperimentReport report;
        report.method = std::string(to_string(method));
        report.rank = rank;
        report.config_digest = digest_hex(train_config_to_text(rc));
        for (std::uint64_t seed : seeds) {
            const auto data = prepare_split(raw, seed, standardize_inputs);
            const auto trained = train_method(data, method, rc, {});
            report.add_split(seed, evaluate_models(trained.files, raw, seed));
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

RankSweepResult to_sweep_result(Method method, std::span<const ExperimentReport> reports) {
    RankSweepResult out;
    out.method = std::string(to_string(method));
    for (const auto& r : reports) out.points.push_back({r.rank, 100.0 * r.mean(), 100.0 * r.std_dev()});
    out.validate();
    return out;
}

std::string make_manifest(std::string_view command, Method method, const TrainConfig& cfg,
                          std::span<const std::uint64_t> seeds) {
    std::string m = "functensor cmd=" + std::string(command) + " method=" +
                    std::string(to_string(method)) + " config=" +
                    digest_hex(train_config_to_text(cfg)) + " seeds=";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) m += ',';
        m += std::to_string(seeds[i]);
    }
    return m;
}

}  // namespace functensor

// functensor: generate data, train, evaluate and sweep functional tensor
// regressors for inverse dynamics.

#include "functensor/config.hpp"
#include "functensor/dataset.hpp"
#include "functensor/errors.hpp"
#include "functensor/experiment.hpp"
#include "functensor/model_io.hpp"
#include "functensor/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace functensor;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

struct TrainingFlags {
    std::string config_path;
    std::optional<std::size_t> rank;
    std::optional<std::size_t> threads;
    bool free_precision = false;
    bool no_standardize = false;
    bool verbose = false;

    void attach(CLI::App* cmd, bool with_rank) {
        cmd->add_option("--config", config_path, "key=value file with training settings");
        if (with_rank) cmd->add_option("--rank", rank, "decomposition rank / RBF units");
        cmd->add_option("--threads", threads, "worker threads for per-channel training");
        cmd->add_flag("--free-precision", free_precision,
                      "optimize precision matrices directly instead of L L^T");
        cmd->add_flag("--no-standardize", no_standardize, "train on raw inputs");
        cmd->add_flag("--verbose", verbose, "progress and audit output");
    }

    [[nodiscard]] TrainConfig resolve() const {
        TrainConfig cfg;
        if (!config_path.empty()) cfg = load_train_config(config_path);
        if (rank) cfg.rank = *rank;
        if (threads) cfg.threads = *threads;
        if (free_precision) cfg.precision = Precision::Free;
        cfg.validate();
        return cfg;
    }
};

std::string percent_list(const std::vector<double>& values) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    for (std::size_t k = 0; k < values.size(); ++k) out << (k ? " " : "") << 100.0 * values[k];
    return out.str();
}

std::vector<ReportRow> load_reference(const std::string& path) {
    if (path.empty()) return {};
    return parse_reference_rows(read_text_file(path), path);
}

int cmd_gen(std::size_t n, std::uint64_t seed, double noise_std, bool no_friction,
            const std::string& out) {
    const auto ds = gen_synthetic_arm(n, seed, noise_std, {.friction = !no_friction});
    std::ostringstream text;
    text << "# manifest: functensor cmd=gen n=" << n << " seed=" << seed
         << " noise_std=" << noise_std << " friction=" << (no_friction ? "off" : "on") << '\n';
    text << "# columns: q1 q2 qd1 qd2 qdd1 qdd2 tau1 tau2 tau1_clean tau2_clean\n";
    text << dataset_to_text(ds);
    write_file_atomic(out, text.str());
    std::cout << "wrote " << ds.size() << " samples to " << out << '\n';
    return kOk;
}

int cmd_train(const std::string& data_path, const std::string& method_name, std::uint64_t seed,
              const TrainingFlags& flags, const std::string& out_dir) {
    const Method method = parse_method(method_name);
    const TrainConfig cfg = flags.resolve();
    const auto raw = load_dataset(data_path);
    const auto data = prepare_split(raw, seed, !flags.no_standardize);
    const std::vector<std::uint64_t> seeds{seed};
    const std::string manifest = make_manifest("train", method, cfg, seeds);
    if (flags.verbose) {
        std::cerr << "train=" << data.train.size() << " validation=" << data.validation.size()
                  << " test=" << data.test.size() << " rank=" << cfg.rank << '\n';
    }

    const auto trained = train_method(data, method, cfg, manifest);

    fs::create_directories(out_dir);
    const std::string tag(to_string(method));
    for (std::size_t i = 0; i < trained.files.size(); ++i) {
        const auto& file = trained.files[i];
        const std::string stem = trained.files.size() == 1 && file.channels.size() != 1
                                     ? tag
                                     : tag + "_dof" + std::to_string(file.channels.front());
        save_model(file, fs::path(out_dir) / (stem + ".model"));
        if (i < trained.histories.size()) {
            const auto& h = trained.histories[i];
            write_file_atomic(fs::path(out_dir) / (stem + ".history.tsv"),
                              "# manifest: " + manifest + '\n' + history_to_tsv(h));
            std::cout << stem << ": epochs=" << h.epochs.size() << " best_epoch=" << h.best_epoch
                      << " val_nmse_pct=" << std::fixed << std::setprecision(4)
                      << 100.0 * h.best_val_nmse() << '\n';
        } else {
            std::cout << stem << ": closed-form fit\n";
        }
    }
    return kOk;
}

int cmd_evaluate(const std::vector<std::string>& model_paths, const std::string& data_path,
                 std::uint64_t seed, const std::string& subset_name, const std::string& out,
                 const std::string& reference, bool verbose) {
    Subset subset = Subset::Test;
    if (subset_name == "train") subset = Subset::Train;
    else if (subset_name == "validation") subset = Subset::Validation;
    else if (subset_name != "test") throw ConfigError("--subset must be train, validation or test");

    std::vector<ModelFile> models;
    for (const auto& p : model_paths) models.push_back(load_model(p));
    const auto raw = load_dataset(data_path);

    EvaluationAudit audit;
    const auto scores = evaluate_models(models, raw, seed, subset, &audit);
    if (verbose) {
        std::cerr << "audit: read " << audit.rows_read.size() << " rows of the " << subset_name
                  << " split; disjoint from training rows: "
                  << (audit.disjoint_from_train ? "yes" : "no") << '\n';
    }
    if (subset == Subset::Test && !audit.disjoint_from_train) {
        throw NumericalError("test isolation violated: evaluation touched training rows");
    }

    ExperimentReport report;
    report.method = models.front().kind_tag();
    if (const auto* f = std::get_if<FunctionalModel>(&models.front().model)) report.rank = f->rank;
    if (const auto* n = std::get_if<RbfNetwork>(&models.front().model)) report.rank = n->units();
    report.add_split(seed, scores);

    std::vector<ReportRow> rows{to_row(report)};
    for (auto& r : load_reference(reference)) rows.push_back(std::move(r));
    const std::string manifest = "# manifest: functensor cmd=evaluate subset=" + subset_name +
                                 " seeds=" + std::to_string(seed) + '\n';
    std::cout << format_table(rows);
    if (!out.empty()) write_file_atomic(out, manifest + rows_to_tsv(rows));
    if (verbose) std::cerr << "per-DoF nMSE %: " << percent_list(scores) << '\n';
    return kOk;
}

int cmd_sweep(const std::string& data_path, const std::string& method_name,
              std::vector<std::size_t> ranks, const std::vector<std::uint64_t>& seeds,
              const TrainingFlags& flags, const std::string& out, const std::string& reference) {
    const Method method = parse_method(method_name);
    const TrainConfig cfg = flags.resolve();
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    const auto raw = load_dataset(data_path);

    const auto reports = run_sweep(raw, method, ranks, seeds, cfg, !flags.no_standardize);
    const auto sweep = to_sweep_result(method, reports);

    std::vector<ReportRow> rows;
    for (const auto& r : reports) rows.push_back(to_row(r));
    for (auto& r : load_reference(reference)) rows.push_back(std::move(r));

    const std::string manifest = "# manifest: " + make_manifest("sweep", method, cfg, seeds) + '\n';
    std::cout << format_table(rows) << '\n' << sweep_to_tsv(sweep);
    if (!out.empty()) {
        write_file_atomic(out, manifest + sweep_to_tsv(sweep));
        write_file_atomic(out + ".report.txt", manifest + format_table(rows));
        write_file_atomic(out + ".report.tsv", manifest + rows_to_tsv(rows));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional tensor decompositions for inverse-dynamics regression"};
    app.require_subcommand(1);

    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    double gen_noise = 0.01;
    bool gen_no_friction = false;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic two-link arm dataset");
    gen->add_option("--n", gen_n, "number of samples")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--noise-std", gen_noise, "torque observation noise std");
    gen->add_flag("--no-friction", gen_no_friction, "omit viscous and Coulomb friction");
    gen->add_option("--out", gen_out, "output file")->required();

    std::string train_data, train_method_name, train_out;
    std::uint64_t train_seed = 0;
    TrainingFlags train_flags;
    auto* train = app.add_subcommand("train", "train one model per torque channel");
    train->add_option("--data", train_data, "28- or 10-column dataset")->required();
    train->add_option("--method", train_method_name, "tucker|parafac|linear|rbf-net")->required();
    train->add_option("--seed", train_seed, "split seed");
    train->add_option("--out", train_out, "output directory")->required();
    train_flags.attach(train, true);

    std::vector<std::string> eval_models;
    std::string eval_data, eval_subset = "test", eval_out, eval_reference;
    std::uint64_t eval_seed = 0;
    bool eval_verbose = false;
    auto* evaluate = app.add_subcommand("evaluate", "per-DoF nMSE of trained models");
    evaluate->add_option("models", eval_models, "model files")->required();
    evaluate->add_option("--data", eval_data, "dataset the models were trained on")->required();
    evaluate->add_option("--seed", eval_seed, "split seed");
    evaluate->add_option("--subset", eval_subset, "train|validation|test");
    evaluate->add_option("--out", eval_out, "write the report row as TSV");
    evaluate->add_option("--reference", eval_reference, "externally reported rows to append");
    evaluate->add_flag("--verbose", eval_verbose, "print the row audit");

    std::string sweep_data, sweep_method_name, sweep_out, sweep_reference;
    std::vector<std::size_t> sweep_ranks;
    std::vector<std::uint64_t> sweep_seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    TrainingFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "nMSE as a function of rank over seeded splits");
    sweep->add_option("--data", sweep_data, "dataset")->required();
    sweep->add_option("--method", sweep_method_name, "tucker|parafac|linear|rbf-net")->required();
    sweep->add_option("--ranks", sweep_ranks, "ranks to evaluate")->required()->delimiter(',');
    sweep->add_option("--seeds", sweep_seeds, "split seeds")->delimiter(',');
    sweep->add_option("--out", sweep_out, "sweep TSV (reports written alongside)");
    sweep->add_option("--reference", sweep_reference, "externally reported rows to append");
    sweep_flags.attach(sweep, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(gen_n, gen_seed, gen_noise, gen_no_friction, gen_out);
        if (*train) return cmd_train(train_data, train_method_name, train_seed, train_flags, train_out);
        if (*evaluate) {
            return cmd_evaluate(eval_models, eval_data, eval_seed, eval_subset, eval_out,
                                eval_reference, eval_verbose);
        }
        if (*sweep) {
            if (sweep_seeds.empty()) throw ConfigError("--seeds must not be empty");
            return cmd_sweep(sweep_data, sweep_method_name, sweep_ranks, sweep_seeds, sweep_flags,
                             sweep_out, sweep_reference);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const ShapeError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const DomainError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

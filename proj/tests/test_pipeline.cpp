#include "functensor/config.hpp"
#include "functensor/errors.hpp"
#include "functensor/experiment.hpp"
#include "functensor/model_io.hpp"
#include "functensor/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

namespace functensor {
namespace {

ModelFile mean_predictor(const PreparedSplit& data) {
    LinearModel lin;
    lin.weights = Matrix(data.train.channels, 3 * data.train.dof);
    for (std::size_t k = 0; k < data.train.channels; ++k) {
        const auto t = data.train.torque_channel(k);
        double mean = 0.0;
        for (double v : t) mean += v;
        lin.bias.push_back(mean / static_cast<double>(t.size()));
    }
    ModelFile f;
    f.split_seed = data.split.seed;
    f.dof = data.train.dof;
    f.dataset_size = data.dataset_size;
    f.channels = {0, 1};
    f.standardizer = data.standardizer;
    f.model = lin;
    return f;
}

TEST(ConfigTest, ParsesKnownKeys) {
    const auto cfg = parse_train_config(
        "# comment\nrank = 7   # trailing\nlearning_rate=0.01\n batch_size = 64 \nfree_precision = true\nseed=3\n");
    EXPECT_EQ(cfg.rank, 7u);
    EXPECT_EQ(cfg.learning_rate, 0.01);
    EXPECT_EQ(cfg.batch_size, 64u);
    EXPECT_EQ(cfg.seed, 3u);
    EXPECT_EQ(cfg.precision, Precision::Free);
    EXPECT_EQ(cfg.max_epochs, TrainConfig{}.max_epochs);
}

TEST(ConfigTest, Errors) {
    EXPECT_THROW((void)parse_train_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW((void)parse_train_config("rank = abc\n"), ConfigError);
    EXPECT_THROW((void)parse_train_config("rank\n"), ConfigError);
    EXPECT_THROW((void)parse_train_config("rank = 0\n"), ConfigError);
    EXPECT_THROW((void)parse_train_config("learning_rate = -1\n"), ConfigError);
    EXPECT_THROW((void)load_train_config("/nonexistent/functensor.cfg"), ConfigError);
}

TEST(ConfigTest, TextRoundTripAndDigest) {
    TrainConfig cfg;
    cfg.rank = 13;
    cfg.learning_rate = 0.0123456789;
    cfg.precision = Precision::Free;
    const auto text = train_config_to_text(cfg);
    const auto back = parse_train_config(text);
    EXPECT_EQ(train_config_to_text(back), text);
    EXPECT_EQ(digest_hex(text).size(), 16u);
    EXPECT_NE(digest_hex(text), digest_hex(train_config_to_text(TrainConfig{})));
    // Published FNV-1a 64 test vectors.
    EXPECT_EQ(digest_hex(""), "cbf29ce484222325");
    EXPECT_EQ(digest_hex("a"), "af63dc4c8601ec8c");
}

TEST(ModelIoTest, RoundTripEveryKind) {
    const auto raw = gen_synthetic_arm(300, 1, 0.01);
    const auto data = prepare_split(raw, 2);
    TrainConfig cfg;
    cfg.rank = 3;
    cfg.max_epochs = 2;
    cfg.batch_size = 32;
    for (auto method : {Method::Tucker, Method::Parafac, Method::Linear, Method::RbfNet}) {
        cfg.precision = method == Method::Parafac ? Precision::Free : Precision::Factored;
        const auto trained = train_method(data, method, cfg, "manifest line");
        for (const auto& file : trained.files) {
            const auto text = serialize_model(file);
            const auto back = parse_model(text, "mem");
            EXPECT_EQ(serialize_model(back), text);
            EXPECT_EQ(back.kind_tag(), std::string(to_string(method)));
            EXPECT_EQ(back.standardizer, file.standardizer);
            EXPECT_EQ(back.predict(data.test), file.predict(data.test));
            EXPECT_EQ(back.model, file.model);
        }
    }
}

TEST(ModelIoTest, FileRoundTripAndErrors) {
    const auto raw = gen_synthetic_arm(200, 1, 0.01);
    const auto data = prepare_split(raw, 0);
    const auto file = mean_predictor(data);
    const auto path = std::filesystem::temp_directory_path() / "functensor_io_test.model";
    save_model(file, path);
    EXPECT_EQ(serialize_model(load_model(path)), serialize_model(file));
    std::filesystem::remove(path);
    EXPECT_THROW((void)load_model(path), DataError);

    const auto text = serialize_model(file);
    EXPECT_THROW((void)parse_model("", "mem"), DataError);
    EXPECT_THROW((void)parse_model("functensor-model 99\n", "mem"), DataError);
    auto truncated = text.substr(0, text.find("linear.bias"));
    EXPECT_THROW((void)parse_model(truncated, "mem"), DataError);
}

TEST(ReportTest, StatisticsAcrossSplits) {
    ExperimentReport r;
    r.method = "tucker";
    r.rank = 5;
    r.add_split(0, {0.01, 0.03});
    r.add_split(1, {0.02, 0.04});
    r.add_split(2, {0.03, 0.05});
    EXPECT_NEAR(r.per_dof_mean()[0], 0.02, 1e-15);
    EXPECT_NEAR(r.mean(), 0.03, 1e-15);
    // Split means 0.02, 0.03, 0.04: sample std 0.01.
    EXPECT_NEAR(r.std_dev(), 0.01, 1e-15);
    EXPECT_THROW(r.add_split(3, {0.1}), ShapeError);

    const auto row = to_row(r);
    EXPECT_NEAR(row.mean_pct, 3.0, 1e-12);
    EXPECT_NEAR(row.std_pct, 1.0, 1e-12);
    const auto table = format_table({row});
    EXPECT_NE(table.find("3.00"), std::string::npos) << table;
    EXPECT_NE(table.find("1.00"), std::string::npos) << table;
    EXPECT_NE(rows_to_tsv({row}).find('\t'), std::string::npos);
}

TEST(ReportTest, ReferenceRowsAreLabelled) {
    const auto rows = parse_reference_rows("# label dofs mean std\nSVR 1 2 3 2.00 0.50\n", "mem");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].label, "SVR (published)");
    EXPECT_EQ(rows[0].per_dof_pct.size(), 3u);
    EXPECT_EQ(rows[0].std_pct, 0.5);
    EXPECT_THROW((void)parse_reference_rows("SVR x 1\n", "mem"), DataError);
}

TEST(ReportTest, SweepValidation) {
    RankSweepResult s{"tucker", {{1, 2.0, 0.1}, {2, 1.0, 0.1}}};
    EXPECT_NO_THROW(s.validate());
    const auto tsv = sweep_to_tsv(s);
    EXPECT_NE(tsv.find("tucker\t1\t2.00"), std::string::npos) << tsv;
    EXPECT_LT(tsv.find("tucker\t1\t"), tsv.find("tucker\t2\t"));
    s.points.push_back({2, 0.5, 0.0});
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ExperimentTest, MeanPredictorOnTrainingSubsetIsOne) {
    const auto raw = gen_synthetic_arm(500, 3, 0.01);
    const auto data = prepare_split(raw, 4);
    const std::vector<ModelFile> files{mean_predictor(data)};
    const auto train_nmse = evaluate_models(files, raw, 4, Subset::Train);
    for (double v : train_nmse) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(ExperimentTest, TestEvaluationNeverReadsTrainingRows) {
    const auto raw = gen_synthetic_arm(500, 3, 0.01);
    const auto data = prepare_split(raw, 4);
    const std::vector<ModelFile> files{mean_predictor(data)};
    EvaluationAudit audit;
    (void)evaluate_models(files, raw, 4, Subset::Test, &audit);
    EXPECT_TRUE(audit.disjoint_from_train);
    EXPECT_EQ(audit.rows_read, data.split.test);
    (void)evaluate_models(files, raw, 4, Subset::Train, &audit);
    EXPECT_FALSE(audit.disjoint_from_train);
}

TEST(ExperimentTest, IncompatibleModelsRejected) {
    const auto raw = gen_synthetic_arm(500, 3, 0.01);
    const auto data = prepare_split(raw, 4);
    const auto good = mean_predictor(data);
    EXPECT_THROW((void)evaluate_models(std::vector<ModelFile>{good}, raw, 5), ConfigError);
    EXPECT_THROW((void)evaluate_models(std::vector<ModelFile>{good, good}, raw, 4), ConfigError);
    EXPECT_THROW((void)evaluate_models(std::vector<ModelFile>{good}, gen_synthetic_arm(400, 3, 0.0), 4),
                 ConfigError);
    auto other = good;
    other.standardizer.input_mean[0] += 1.0;
    other.channels = {};
    EXPECT_THROW((void)evaluate_models(std::vector<ModelFile>{good, other}, raw, 4), ConfigError);
    EXPECT_THROW((void)evaluate_models(std::vector<ModelFile>{}, raw, 4), ConfigError);
}

TEST(ExperimentTest, LinearFitsOnlyTrainingRows) {
    const auto raw = gen_synthetic_arm(400, 6, 0.01);
    auto data = prepare_split(raw, 1);
    TrainConfig cfg;
    const auto a = train_method(data, Method::Linear, cfg, "m");
    for (double& v : data.test.torques.data) v = 1e6;
    for (double& v : data.validation.torques.data) v = -1e6;
    const auto b = train_method(data, Method::Linear, cfg, "m");
    EXPECT_EQ(serialize_model(a.files[0]), serialize_model(b.files[0]));
}

TEST(ExperimentTest, SweepProducesAscendingRanks) {
    const auto raw = gen_synthetic_arm(300, 0, 0.01);
    TrainConfig cfg;
    cfg.max_epochs = 2;
    cfg.batch_size = 32;
    const std::vector<std::size_t> ranks{1, 2};
    const std::vector<std::uint64_t> seeds{0, 1};
    const auto reports = run_sweep(raw, Method::Parafac, ranks, seeds, cfg);
    const auto sweep = to_sweep_result(Method::Parafac, reports);
    ASSERT_EQ(sweep.points.size(), 2u);
    EXPECT_EQ(sweep.points[0].rank, 1u);
    EXPECT_EQ(sweep.points[1].rank, 2u);
    EXPECT_EQ(reports[0].seeds, seeds);
    EXPECT_THROW((void)parse_method("svr"), ConfigError);
    EXPECT_EQ(parse_method("rbf-net"), Method::RbfNet);
}

}  // namespace
}  // namespace functensor

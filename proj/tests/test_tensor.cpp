#include "functensor/errors.hpp"
#include "functensor/tensor.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace functensor {
namespace {

TEST(DenseTensorTest, RejectsMismatchedValues) {
    EXPECT_THROW(DenseTensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
    EXPECT_THROW(DenseTensor(std::vector<std::size_t>{}), ShapeError);
    EXPECT_THROW(DenseTensor({2, 0}), ShapeError);
}

TEST(DenseTensorTest, RowMajorIndexing) {
    DenseTensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    const std::size_t idx[] = {1, 2};
    EXPECT_EQ(t.at(idx), 6.0);
    const std::size_t bad[] = {2, 0};
    EXPECT_THROW((void)t.at(bad), ShapeError);
}

TEST(TuckerEvalTest, RankOneProduct) {
    DenseTensor core({1, 1, 1}, {1.0});
    const std::vector<FactorRow> rows{{2.0}, {3.0}, {4.0}};
    EXPECT_EQ(tucker_eval(core, rows), 24.0);
}

TEST(TuckerEvalTest, DiagonalCoreReducesToParafac) {
    const std::vector<double> g{1.0, 1.0};
    const auto core = embed_parafac_as_tucker(g, 3);
    const std::vector<FactorRow> rows{{1, 2}, {1, 1}, {1, 0.5}};
    EXPECT_DOUBLE_EQ(tucker_eval(core, rows), 2.0);
}

TEST(TuckerEvalTest, FrozenTwoByTwoByTwo) {
    // Value from an independent nested-loop evaluation of these literals.
    DenseTensor core({2, 2, 2}, {0.3, -0.7, 1.1, 0.25, -0.5, 0.9, 0.05, -1.3});
    const std::vector<FactorRow> rows{{0.4, -1.2}, {0.8, 0.35}, {-0.6, 1.5}};
    EXPECT_NEAR(tucker_eval(core, rows), -1.1859, 1e-12);
}

TEST(TuckerEvalTest, MatchesNestedLoopsOnSeededCore) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> values(8);
    for (double& v : values) v = u(rng);
    std::vector<FactorRow> rows(3, FactorRow(2));
    for (auto& row : rows)
        for (double& v : row) v = u(rng);
    const DenseTensor core({2, 2, 2}, values);
    EXPECT_NEAR(tucker_eval(core, rows), oracle::naive_tucker({2, 2, 2}, values, rows), 1e-12);
}

TEST(TuckerEvalTest, ShapeErrors) {
    DenseTensor core({2, 2, 2});
    EXPECT_THROW((void)tucker_eval(core, std::vector<FactorRow>{{1, 2}, {1, 2}}), ShapeError);
    EXPECT_THROW((void)tucker_eval(core, std::vector<FactorRow>{{1, 2}, {1, 2}, {1}}), ShapeError);
}

TEST(TuckerEvalTest, MultilinearInEachRow) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor core({3, 3, 3});
    for (double& v : core.values()) v = u(rng);
    std::vector<FactorRow> rows(3, FactorRow(3));
    for (auto& row : rows)
        for (double& v : row) v = u(rng);
    const double base = tucker_eval(core, rows);
    for (std::size_t m = 0; m < 3; ++m) {
        auto scaled = rows;
        for (double& v : scaled[m]) v *= 2.5;
        EXPECT_NEAR(tucker_eval(core, scaled), 2.5 * base, 1e-12);
    }
}

TEST(ParafacEvalTest, Basics) {
    const std::vector<double> g{1.0};
    EXPECT_EQ(parafac_eval(g, std::vector<FactorRow>{{2}, {3}, {4}}), 24.0);
    const std::vector<double> zeros(4, 0.0);
    EXPECT_EQ(parafac_eval(zeros, std::vector<FactorRow>{{1, 2, 3, 4}, {5, 6, 7, 8}}), 0.0);
    EXPECT_THROW((void)parafac_eval(g, std::vector<FactorRow>{{1, 2}}), ShapeError);
}

TEST(ParafacEvalTest, EqualsTuckerOnSuperdiagonalEmbedding) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> g(4);
        for (double& v : g) v = u(rng);
        std::vector<FactorRow> rows(3, FactorRow(4));
        for (auto& row : rows)
            for (double& v : row) v = u(rng);
        EXPECT_NEAR(parafac_eval(g, rows), tucker_eval(embed_parafac_as_tucker(g, 3), rows), 1e-12);
    }
}

TEST(EmbedParafacTest, Layout) {
    const std::vector<double> five{5.0};
    const auto t1 = embed_parafac_as_tucker(five, 3);
    EXPECT_EQ(t1.dims(), (std::vector<std::size_t>{1, 1, 1}));
    EXPECT_EQ(t1.values()[0], 5.0);

    const std::vector<double> g{1.0, 2.0};
    const auto t2 = embed_parafac_as_tucker(g, 3);
    const std::size_t i000[] = {0, 0, 0};
    const std::size_t i111[] = {1, 1, 1};
    EXPECT_EQ(t2.at(i000), 1.0);
    EXPECT_EQ(t2.at(i111), 2.0);
    double total = 0.0;
    for (double v : t2.values()) total += v;
    EXPECT_EQ(total, 3.0);

    const std::vector<double> g3{0.3, -1.2, 0.7};
    const auto t3 = embed_parafac_as_tucker(g3, 4);
    std::size_t nonzeros = 0;
    for (double v : t3.values()) nonzeros += v != 0.0;
    EXPECT_EQ(nonzeros, 3u);
    for (std::size_t r = 0; r < 3; ++r) {
        const std::size_t idx[] = {r, r, r, r};
        EXPECT_EQ(t3.at(idx), g3[r]);
    }

    EXPECT_THROW((void)embed_parafac_as_tucker(std::vector<double>{}, 3), ConfigError);
    EXPECT_THROW((void)embed_parafac_as_tucker(g, 1), ConfigError);
}

TEST(ModeContractTest, IdentityAndOnes) {
    DenseTensor eye({2, 2}, {1, 0, 0, 1});
    const std::vector<double> ones{1, 1};
    const auto r = mode_contract(eye, ones, 0);
    EXPECT_EQ(r.dims(), (std::vector<std::size_t>{2}));
    EXPECT_EQ(r.values()[0], 1.0);
    EXPECT_EQ(r.values()[1], 1.0);

    DenseTensor all({2, 3, 2}, std::vector<double>(12, 1.0));
    const std::vector<double> v{1, 2, 3};
    const auto s = mode_contract(all, v, 1);
    EXPECT_EQ(s.dims(), (std::vector<std::size_t>{2, 2}));
    for (double x : s.values()) EXPECT_EQ(x, 6.0);
}

TEST(ModeContractTest, Errors) {
    DenseTensor t({2, 3});
    EXPECT_THROW((void)mode_contract(t, std::vector<double>{1, 2}, 2), ShapeError);
    EXPECT_THROW((void)mode_contract(t, std::vector<double>{1, 2}, 1), ShapeError);
}

TEST(ModeContractTest, MatchesDirectSumEveryMode) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor t({3, 3, 3});
    for (double& v : t.values()) v = u(rng);
    std::vector<double> v(3);
    for (double& x : v) x = u(rng);
    for (std::size_t mode = 0; mode < 3; ++mode) {
        const auto out = mode_contract(t, v, mode);
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) {
                double direct = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    std::size_t idx[3];
                    std::size_t free[2] = {a, b};
                    for (std::size_t m = 0, f = 0; m < 3; ++m) idx[m] = m == mode ? k : free[f++];
                    direct += t.at(idx) * v[k];
                }
                const std::size_t oi[] = {a, b};
                EXPECT_NEAR(out.at(oi), direct, 1e-12);
            }
        }
    }
}

TEST(ModeContractTest, BasisVectorExtractsSlice) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor t({2, 3, 4});
    for (double& v : t.values()) v = u(rng);
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> e(3, 0.0);
        e[k] = 1.0;
        const auto slice = mode_contract(t, e, 1);
        for (std::size_t a = 0; a < 2; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t si[] = {a, b};
                const std::size_t ti[] = {a, k, b};
                EXPECT_EQ(slice.at(si), t.at(ti));
            }
        }
    }
}

TEST(ModeContractTest, OrderOneGivesScalar) {
    DenseTensor t({3}, {1, 2, 3});
    const auto s = mode_contract(t, std::vector<double>{1, 1, 1}, 0);
    EXPECT_EQ(s.order(), 0u);
    EXPECT_EQ(s.values()[0], 6.0);
}

}  // namespace
}  // namespace functensor

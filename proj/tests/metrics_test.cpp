#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lobtensor/metrics.hpp"

using namespace lobtensor;

TEST(Confusion, PerfectAndConstantPredictions) {
    const std::vector<Label> y{0, 1, 2, 1, 0};
    const ConfusionMatrix perfect = confusion(y, y, 3);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t p = 0; p < 3; ++p)
            if (t != p) {
                EXPECT_EQ(perfect.at(t, p), 0u);
            }
    const ConfusionMatrix first = confusion(y, std::vector<Label>(5, 0), 3);
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_EQ(first.at(t, 1), 0u);
        EXPECT_EQ(first.at(t, 2), 0u);
    }
    EXPECT_EQ(first.total(), 5u);
}

TEST(Confusion, Fixture) {
    // classes 1,2,3 of the fixture are indices 0,1,2
    const ConfusionMatrix cm = confusion(std::vector<Label>{0, 0, 1, 2}, std::vector<Label>{0, 1, 1, 2}, 3);
    EXPECT_EQ(cm.at(0, 0), 1u);
    EXPECT_EQ(cm.at(0, 1), 1u);
    EXPECT_EQ(cm.at(1, 1), 1u);
    EXPECT_EQ(cm.at(2, 2), 1u);
    EXPECT_EQ(cm.total(), 4u);
    EXPECT_THROW(confusion(std::vector<Label>{0}, std::vector<Label>{0, 1}, 3), DimensionError);
    EXPECT_THROW(confusion(std::vector<Label>{3}, std::vector<Label>{0}, 3), InputError);
}

TEST(Report, FixtureValues) {
    const MetricsReport r = evaluate(std::vector<Label>{0, 0, 1, 2}, std::vector<Label>{0, 1, 1, 2}, 3);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
    EXPECT_DOUBLE_EQ(r.precision[0], 1.0);
    EXPECT_DOUBLE_EQ(r.precision[1], 0.5);
    EXPECT_DOUBLE_EQ(r.precision[2], 1.0);
    EXPECT_DOUBLE_EQ(r.recall[0], 0.5);
    EXPECT_DOUBLE_EQ(r.recall[1], 1.0);
    EXPECT_DOUBLE_EQ(r.recall[2], 1.0);
    EXPECT_DOUBLE_EQ(r.f1[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.f1[1], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.f1[2], 1.0);
    EXPECT_DOUBLE_EQ(r.macro_f1, 7.0 / 9.0);
    EXPECT_EQ(r.samples, 4u);
}

TEST(Report, PerfectIsAllOnes) {
    const std::vector<Label> y{0, 1, 2, 2};
    const MetricsReport r = evaluate(y, y, 3);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.macro_precision, 1.0);
    EXPECT_EQ(r.macro_recall, 1.0);
    EXPECT_EQ(r.macro_f1, 1.0);
}

TEST(Report, AbsentClassScoresZero) {
    const MetricsReport r = evaluate(std::vector<Label>{0, 1}, std::vector<Label>{0, 1}, 3);
    EXPECT_EQ(r.precision[2], 0.0);
    EXPECT_EQ(r.recall[2], 0.0);
    EXPECT_EQ(r.f1[2], 0.0);
    EXPECT_THROW(report(ConfusionMatrix(3)), InputError);
}

TEST(Report, Properties) {
    std::mt19937_64 rng(70);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Label> y(30), p(30);
        for (std::size_t i = 0; i < 30; ++i) {
            y[i] = static_cast<Label>(rng() % 3);
            p[i] = static_cast<Label>(rng() % 3);
        }
        const MetricsReport r = evaluate(y, p, 3);
        const auto [lo, hi] = std::minmax_element(r.f1.begin(), r.f1.end());
        EXPECT_GE(r.macro_f1, *lo - 1e-15);
        EXPECT_LE(r.macro_f1, *hi + 1e-15);
        for (double v : r.f1) EXPECT_TRUE(v >= 0 && v <= 1);

        // micro precision == micro recall == accuracy
        const ConfusionMatrix cm = confusion(y, p, 3);
        std::size_t tp = 0;
        for (std::size_t c = 0; c < 3; ++c) tp += cm.at(c, c);
        EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(tp) / 30.0);

        // relabel classes with a permutation
        const std::vector<Label> perm{2, 0, 1};
        std::vector<Label> y2(30), p2(30);
        for (std::size_t i = 0; i < 30; ++i) {
            y2[i] = perm[static_cast<std::size_t>(y[i])];
            p2[i] = perm[static_cast<std::size_t>(p[i])];
        }
        const MetricsReport r2 = evaluate(y2, p2, 3);
        EXPECT_DOUBLE_EQ(r2.accuracy, r.accuracy);
        EXPECT_NEAR(r2.macro_f1, r.macro_f1, 1e-15);
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(r2.f1[static_cast<std::size_t>(perm[c])], r.f1[c]);
    }
}

TEST(MeanStd, SampleStd) {
    const std::vector<double> v{1, 2, 3, 4};
    const MeanStd m = mean_std(v);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.std, 1.2909944487358056, 1e-15);
    EXPECT_EQ(mean_std(std::vector<double>{5}).std, 0.0);
}

#include <gtest/gtest.h>

#include <random>

#include "lobtensor/eigensolve.hpp"
#include "lobtensor/mda.hpp"
#include "test_util.hpp"

using namespace lobtensor;
using lobtensor::testing::as_tensors;
using lobtensor::testing::gaussian_classes;
using lobtensor::testing::random_matrix;
using lobtensor::testing::random_tensor;

namespace {

struct Distances {
    double between = 0;
    double within = 0;
};

// Interclass / intraclass distances by projecting every tensor in all modes
// and summing squared Frobenius norms, with means taken by naive summation.
Distances direct_distances(const std::vector<Tensor>& xs, const std::vector<Label>& labels,
                           const std::vector<Matrix>& ws, std::size_t num_classes) {
    std::vector<Tensor> means(num_classes, Tensor(xs[0].dims()));
    std::vector<double> counts(num_classes, 0);
    Tensor global(xs[0].dims());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t e = 0; e < xs[i].size(); ++e) {
            means[labels[i]].data()[e] += xs[i].data()[e];
            global.data()[e] += xs[i].data()[e];
        }
        counts[labels[i]] += 1;
    }
    for (std::size_t c = 0; c < num_classes; ++c)
        for (double& v : means[c].data()) v /= counts[c];
    for (double& v : global.data()) v /= static_cast<double>(xs.size());

    auto proj = [&](const Tensor& t) {
        Tensor out = t;
        for (std::size_t k = 1; k <= t.order(); ++k) out = mode_k_product(out, ws[k - 1].transpose(), k);
        return out;
    };
    Distances d;
    const Tensor pg = proj(global);
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double n = frobenius_norm(proj(means[c]) - pg);
        d.between += counts[c] * n * n;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double n = frobenius_norm(proj(xs[i]) - proj(means[labels[i]]));
        d.within += n * n;
    }
    return d;
}

std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n, int classes) {
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % static_cast<std::size_t>(classes));
    std::shuffle(labels.begin(), labels.end(), rng);
    return labels;
}

}  // namespace

TEST(ClassMeans, SingletonClassesEqualSamples) {
    std::mt19937_64 rng(20);
    const std::vector<Tensor> xs{random_tensor(rng, {3, 2}), random_tensor(rng, {3, 2}), random_tensor(rng, {3, 2})};
    const std::vector<Label> labels{2, 0, 1};
    const ClassMeans m = class_means(xs, labels);
    EXPECT_EQ(m.means[2], xs[0]);
    EXPECT_EQ(m.means[0], xs[1]);
    EXPECT_EQ(m.means[1], xs[2]);
}

TEST(ClassMeans, DuplicateSamples) {
    std::mt19937_64 rng(21);
    const Tensor a = random_tensor(rng, {2, 2});
    const std::vector<Tensor> xs{a, a, random_tensor(rng, {2, 2})};
    const ClassMeans m = class_means(xs, std::vector<Label>{0, 0, 1});
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(m.means[0].data()[i], a.data()[i], 1e-15);
}

TEST(ClassMeans, GlobalIsWeightedClassMean) {
    std::mt19937_64 rng(22);
    std::vector<Tensor> xs;
    for (int i = 0; i < 31; ++i) xs.push_back(random_tensor(rng, {4, 3}));
    const auto labels = random_labels(rng, xs.size(), 3);
    const ClassMeans m = class_means(xs, labels);
    Tensor weighted({4, 3});
    for (std::size_t c = 0; c < 3; ++c) weighted += m.means[c] * static_cast<double>(m.counts[c]);
    weighted *= 1.0 / 31.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) EXPECT_NEAR(weighted.data()[i], m.global.data()[i], 1e-12);

    // naive summation oracle for class 1
    Tensor sum({4, 3});
    double n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (labels[i] == 1) {
            sum += xs[i];
            n += 1;
        }
    for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(sum.data()[i] / n, m.means[1].data()[i], 1e-12);
}

TEST(ClassMeans, EmptyClassRejected) {
    const std::vector<Tensor> xs{Tensor({2}), Tensor({2})};
    EXPECT_THROW(class_means(xs, std::vector<Label>{0, 2}), InputError);
}

TEST(Scatter, ZeroWhenNoSpread) {
    std::mt19937_64 rng(23);
    const Tensor a = random_tensor(rng, {4, 3});
    const Tensor b = random_tensor(rng, {4, 3});
    const std::vector<Tensor> xs{a, a, b, b};
    const std::vector<Label> labels{0, 0, 1, 1};
    const std::vector<Matrix> ws{orthonormalize(random_matrix(rng, 4, 2)), orthonormalize(random_matrix(rng, 3, 2))};
    for (std::size_t k = 1; k <= 2; ++k) {
        const Scatter s = scatter_matrices(xs, labels, ws, k);
        EXPECT_LE(s.within.cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_GT(s.between.cwiseAbs().maxCoeff(), 0);
    }
    // equal class means -> no between-class scatter
    const std::vector<Tensor> same{a, b, a, b};
    const Scatter s = scatter_matrices(same, labels, ws, 1);
    EXPECT_LE(s.between.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Scatter, TraceFormsMatchDirectDistances) {
    std::mt19937_64 rng(24);
    for (int rep = 0; rep < 25; ++rep) {
        const std::vector<std::size_t> dims{4, 3};
        std::vector<Tensor> xs;
        for (int i = 0; i < 24; ++i) xs.push_back(random_tensor(rng, dims));
        const auto labels = random_labels(rng, xs.size(), 3);
        const std::vector<Matrix> ws{orthonormalize(random_matrix(rng, 4, 2)), orthonormalize(random_matrix(rng, 3, 2))};
        const Distances d = direct_distances(xs, labels, ws, 3);
        for (std::size_t k = 1; k <= 2; ++k) {
            const Scatter s = scatter_matrices(xs, labels, ws, k);
            const Matrix& w = ws[k - 1];
            const double db = (w.transpose() * s.between * w).trace();
            const double dw = (w.transpose() * s.within * w).trace();
            EXPECT_NEAR(db, d.between, 1e-8 * d.between);
            EXPECT_NEAR(dw, d.within, 1e-8 * d.within);
            EXPECT_NEAR(db / dw, d.between / d.within, 1e-8 * d.between / d.within);
            EXPECT_EQ(s.between, s.between.transpose());
            EXPECT_GE(sym_eig(s.within).values.minCoeff(), -1e-10);
        }
    }
}

TEST(Scatter, DimensionMismatch) {
    std::mt19937_64 rng(25);
    const std::vector<Tensor> xs{random_tensor(rng, {4, 3}), random_tensor(rng, {4, 3})};
    const std::vector<Label> labels{0, 1};
    const std::vector<Matrix> bad{Matrix::Identity(4, 2), Matrix::Identity(5, 2)};
    EXPECT_THROW(scatter_matrices(xs, labels, bad, 1), DimensionError);
    EXPECT_NO_THROW(scatter_matrices(xs, labels, bad, 2));  // mode-2 projection is unused for k = 2
}

namespace {

// Two classes separated along one direction of a 6 x 4 space.
lobtensor::testing::MatrixSet separated_pair(std::mt19937_64& rng, std::size_t per_class) {
    Matrix dir = random_matrix(rng, 6, 4);
    dir /= dir.norm();
    return gaussian_classes(rng, {Matrix::Zero(6, 4), 20.0 * dir}, {per_class, per_class}, 1.0);
}

MdaConfig small_config(std::uint64_t seed) {
    MdaConfig cfg;
    cfg.subspace_dims = {2, 2};
    cfg.lambda = 0.1;
    cfg.rng_seed = seed;
    return cfg;
}

}  // namespace

TEST(MdaFit, SeparatedClassesPerfectTraining) {
    std::mt19937_64 rng(26);
    const auto data = separated_pair(rng, 60);
    const auto xs = as_tensors(data.samples);
    const MdaModel model = mda::fit(xs, data.labels, small_config(1));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) correct += mda::predict(model, xs[i]) == data.labels[i];
    EXPECT_EQ(correct, xs.size());
    for (const Matrix& w : model.projections) {
        EXPECT_LE((w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff(), 1e-8);
    }
    for (double e : model.orthonormality_trace) EXPECT_LE(e, 1e-8);
}

TEST(MdaFit, HeldOutAccuracy) {
    std::mt19937_64 rng(27);
    Matrix d1 = random_matrix(rng, 6, 4), d2 = random_matrix(rng, 6, 4);
    const std::vector<Matrix> means{Matrix::Zero(6, 4), 3.0 * d1 / d1.norm() * 4, 3.0 * d2 / d2.norm() * 4};
    const auto train = gaussian_classes(rng, means, {80, 80, 80}, 1.0);
    const auto test = gaussian_classes(rng, means, {100, 100, 100}, 1.0);
    const MdaModel model = mda::fit(as_tensors(train.samples), train.labels, small_config(2));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.samples.size(); ++i)
        correct += mda::predict(model, Tensor::from_matrix(test.samples[i])) == test.labels[i];
    EXPECT_GE(static_cast<double>(correct) / test.samples.size(), 0.95);
}

TEST(MdaFit, DeterministicForSeed) {
    std::mt19937_64 rng(28);
    const auto data = separated_pair(rng, 30);
    const auto xs = as_tensors(data.samples);
    const MdaModel a = mda::fit(xs, data.labels, small_config(5));
    const MdaModel b = mda::fit(xs, data.labels, small_config(5));
    ASSERT_EQ(a.projections.size(), b.projections.size());
    for (std::size_t k = 0; k < a.projections.size(); ++k) EXPECT_EQ(a.projections[k], b.projections[k]);
    EXPECT_EQ(a.delta_trace, b.delta_trace);
}

TEST(MdaFit, IdenticalClassesDegenerate) {
    std::mt19937_64 rng(29);
    std::vector<Tensor> xs;
    std::vector<Label> labels;
    for (int i = 0; i < 10; ++i) {
        const Tensor t = random_tensor(rng, {5, 3});
        for (Label c = 0; c < 3; ++c) {
            xs.push_back(t);
            labels.push_back(c);
        }
    }
    MdaConfig cfg = small_config(3);
    cfg.max_iters = 5;
    const MdaModel model = mda::fit(xs, labels, cfg);
    EXPECT_EQ(model.num_classes(), 3u);
    // all projected means coincide -> every prediction is the tie winner
    for (const Tensor& x : xs) EXPECT_EQ(mda::predict(model, x), 0);
}

TEST(MdaFit, TranslationInvariantPredictions) {
    std::mt19937_64 rng(30);
    const auto data = separated_pair(rng, 40);
    const auto xs = as_tensors(data.samples);
    const Tensor shift = random_tensor(rng, {6, 4}) * 5.0;
    std::vector<Tensor> shifted;
    for (const Tensor& x : xs) shifted.push_back(x + shift);
    const MdaModel a = mda::fit(xs, data.labels, small_config(9));
    const MdaModel b = mda::fit(shifted, data.labels, small_config(9));
    const auto probe = gaussian_classes(rng, {Matrix::Zero(6, 4)}, {50}, 3.0);
    for (const Matrix& p : probe.samples) {
        const Tensor t = Tensor::from_matrix(p);
        EXPECT_EQ(mda::predict(a, t), mda::predict(b, t + shift));
    }
}

TEST(MdaPredict, ClassMeanAndTieRule) {
    std::mt19937_64 rng(31);
    const auto data = separated_pair(rng, 20);
    const auto xs = as_tensors(data.samples);
    const MdaModel model = mda::fit(xs, data.labels, small_config(4));
    const ClassMeans means = class_means(xs, data.labels);
    EXPECT_EQ(mda::predict(model, means.means[0]), 0);
    EXPECT_EQ(mda::predict(model, means.means[1]), 1);

    // midpoint of the two means is equidistant in the subspace
    MdaModel sym = model;
    sym.class_means[1] = sym.class_means[0] * -1.0;
    EXPECT_EQ(mda::predict(sym, Tensor(model.input_dims)), 0);
}

TEST(MdaErrors, Validation) {
    std::mt19937_64 rng(32);
    const auto data = separated_pair(rng, 5);
    const auto xs = as_tensors(data.samples);
    MdaConfig cfg = small_config(0);
    cfg.subspace_dims = {7, 2};
    EXPECT_THROW(mda::fit(xs, data.labels, cfg), ConfigError);
    cfg.subspace_dims = {2};
    EXPECT_THROW(mda::fit(xs, data.labels, cfg), ConfigError);
    std::vector<Label> one(xs.size(), 0);
    EXPECT_THROW(mda::fit(xs, one, small_config(0)), InputError);
    const MdaModel m = mda::fit(xs, data.labels, small_config(0));
    EXPECT_THROW(mda::predict(m, Tensor({4, 6})), DimensionError);
}

TEST(MdaFit, FullScaleShape) {
    // 144 x 10 inputs, 10k samples, largest default subspace dims.
    std::mt19937_64 rng(33);
    std::normal_distribution<double> n;
    std::vector<Tensor> xs;
    std::vector<Label> labels;
    xs.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
        Tensor t({144, 10});
        for (double& v : t.data()) v = n(rng);
        const Label c = static_cast<Label>(i % 3);
        t.data()[static_cast<std::size_t>(c)] += 2.0;
        xs.push_back(std::move(t));
        labels.push_back(c);
    }
    MdaConfig cfg;
    cfg.subspace_dims = {60, 8};
    cfg.lambda = 1.0;
    cfg.max_iters = 2;
    const MdaModel model = mda::fit(xs, labels, cfg);
    EXPECT_EQ(model.projections[0].rows(), 144);
    EXPECT_EQ(model.projections[0].cols(), 60);
    EXPECT_EQ(model.projections[1].cols(), 8);
    EXPECT_LE(model.orthonormality_trace.back(), 1e-8);
}

#pragma once

// Vector-input baselines: regularized LDA and ridge regression on a single
// feature vector per sample.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lobtensor/eigensolve.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"
#include "lobtensor/tensor.hpp"

namespace lobtensor {

struct LdaModel {
    double lambda = 1.0;
    Matrix projection;                 ///< D x (C-1), orthonormal columns
    std::vector<Vector> class_means;   ///< projected class means

    std::size_t num_classes() const noexcept { return class_means.size(); }
};

struct RrModel {
    double lambda = 1.0;
    Matrix weights;  ///< D x C
    std::size_t num_classes = 0;
};

namespace baselines {

namespace detail {

inline Eigen::Index check_vectors(std::span<const Vector> vectors, std::span<const Label> labels) {
    if (vectors.empty()) throw InputError("no samples");
    if (vectors.size() != labels.size()) throw DimensionError("vectors and labels differ in length");
    for (const Vector& v : vectors) {
        if (v.size() != vectors.front().size()) throw DimensionError("vectors differ in length");
    }
    return vectors.front().size();
}

}  // namespace detail

/// Keeps C-1 discriminant directions.
inline LdaModel lda_fit(std::span<const Vector> vectors, std::span<const Label> labels, double lambda) {
    const Eigen::Index d = detail::check_vectors(vectors, labels);
    const auto counts = class_counts(labels);
    const auto c = static_cast<Eigen::Index>(counts.size());
    if (c < 2) throw InputError("LDA needs at least two classes");
    if (c - 1 > d) throw InputError("LDA needs at least C-1 feature dimensions");

    std::vector<Vector> means(counts.size(), Vector::Zero(d));
    Vector global = Vector::Zero(d);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        means[static_cast<std::size_t>(labels[i])] += vectors[i];
        global += vectors[i];
    }
    for (std::size_t k = 0; k < means.size(); ++k) means[k] /= static_cast<double>(counts[k]);
    global /= static_cast<double>(vectors.size());

    Matrix sb = Matrix::Zero(d, d);
    Matrix sw = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < means.size(); ++k) {
        const Vector diff = means[k] - global;
        sb.selfadjointView<Eigen::Lower>().rankUpdate(diff, static_cast<double>(counts[k]));
    }
    Matrix centered(d, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        centered.col(static_cast<Eigen::Index>(i)) = vectors[i] - means[static_cast<std::size_t>(labels[i])];
    }
    sw.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    sb.triangularView<Eigen::StrictlyUpper>() = sb.transpose();
    sw.triangularView<Eigen::StrictlyUpper>() = sw.transpose();

    LdaModel model;
    model.lambda = lambda;
    model.projection = regularized_ratio_eig(sb, sw, lambda, c - 1);
    for (const Vector& m : means) model.class_means.push_back(model.projection.transpose() * m);
    return model;
}

inline RrModel rr_fit(std::span<const Vector> vectors, std::span<const Label> labels, double lambda) {
    const Eigen::Index d = detail::check_vectors(vectors, labels);
    const auto counts = class_counts(labels);
    const auto n = static_cast<Eigen::Index>(vectors.size());
    Matrix x(n, d);
    Matrix y = Matrix::Constant(n, static_cast<Eigen::Index>(counts.size()), -1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        x.row(i) = vectors[static_cast<std::size_t>(i)].transpose();
        y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    }
    return RrModel{lambda, ridge_solve(x, y, lambda), counts.size()};
}

/// Nearest projected class mean; ties go to the lowest class index.
inline Label predict(const LdaModel& model, const Vector& v) {
    if (v.size() != model.projection.rows()) throw DimensionError("vector length does not match the LDA model");
    const Vector y = model.projection.transpose() * v;
    std::vector<double> dist;
    for (const Vector& m : model.class_means) dist.push_back((y - m).squaredNorm());
    return argmin(dist);
}

/// Largest ridge score; ties go to the lowest class index.
inline Label predict(const RrModel& model, const Vector& v) {
    if (v.size() != model.weights.rows()) throw DimensionError("vector length does not match the RR model");
    return argmax(Vector(model.weights.transpose() * v));
}

}  // namespace baselines
}  // namespace lobtensor

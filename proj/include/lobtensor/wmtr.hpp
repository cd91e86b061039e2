#pragma once

// Weighted Multichannel Time-series Regression.
//
// Fits the bilinear map f(X) = W1^T X w2 (X is D x T, W1 is D x C, w2 has
// length T) to +-1 one-vs-rest targets by minimizing
//
//     sum_i s_i ||W1^T X_i w2 - y_i||^2 + lambda1 ||W1||_F^2 + lambda2 ||w2||^2
//
// with s_i = n_{c_i}^{-1/r}. W1 and w2 are updated alternately, each by an
// exact weighted ridge solve, starting from w2 = (0, ..., 0, 1) so the first
// update is plain regression on the newest column. An infinite r gives unit
// weights (MTR).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lobtensor/eigensolve.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"
#include "lobtensor/metrics.hpp"
#include "lobtensor/tensor.hpp"

namespace lobtensor {

/// Weight exponent meaning "all sample weights equal one".
inline constexpr double kUnweighted = std::numeric_limits<double>::infinity();

struct WmtrConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double r = 2.0;  ///< kUnweighted selects MTR
    int max_iters = 50;
    double tol = 1e-6;
    bool select_by_train_f1 = true;
};

struct WmtrModel {
    WmtrConfig config;
    Matrix w1;  ///< D x C
    Vector w2;  ///< T
    std::size_t num_classes = 0;
    int iterations = 0;
    bool converged = false;
    int selected_iteration = 0;       ///< 1-based index into f1_trace
    std::vector<double> f1_trace;     ///< training macro-F1 after each full iteration
    std::vector<double> loss_trace;   ///< objective at start, then after every half-step

    Eigen::Index dim() const noexcept { return w1.rows(); }
    Eigen::Index steps() const noexcept { return w2.size(); }
};

inline void validate(const WmtrConfig& cfg) {
    if (!(cfg.lambda1 > 0) || !(cfg.lambda2 > 0)) throw ConfigError("WMTR lambdas must be > 0");
    if (!(cfg.r > 0)) throw ConfigError("WMTR weight exponent r must be > 0");
    if (cfg.max_iters < 1) throw ConfigError("WMTR max_iters must be >= 1");
    if (!(cfg.tol >= 0)) throw ConfigError("WMTR tol must be >= 0");
}

namespace wmtr {

/// s_i = n_{c_i}^{-1/r}; all ones when r is infinite.
inline Vector sample_weights(std::span<const Label> labels, double r) {
    if (!(r > 0)) throw InputError("weight exponent r must be > 0");
    const auto counts = class_counts(labels);
    Vector s(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        s[static_cast<Eigen::Index>(i)] =
            std::isinf(r) ? 1.0 : std::pow(static_cast<double>(counts[static_cast<std::size_t>(labels[i])]), -1.0 / r);
    }
    return s;
}

/// Target matrix C x N: column i is -1 everywhere except +1 at labels[i].
inline Matrix targets(std::span<const Label> labels, std::size_t num_classes) {
    Matrix y = Matrix::Constant(static_cast<Eigen::Index>(num_classes), static_cast<Eigen::Index>(labels.size()), -1.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
            throw InputError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(num_classes) + ")");
        }
        y(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    return y;
}

namespace detail {

inline void check_samples(std::span<const Matrix> samples, const Matrix& y, const Vector& s) {
    if (samples.empty()) throw InputError("no samples");
    for (const Matrix& x : samples) {
        if (x.rows() != samples.front().rows() || x.cols() != samples.front().cols()) {
            throw DimensionError("samples differ in shape");
        }
    }
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (y.cols() != n || s.size() != n) throw DimensionError("targets/weights do not match the sample count");
}

}  // namespace detail

/// Closed-form W1 for fixed w2:
/// (X2 S2 S2^T X2^T + lambda1 I)^{-1} X2 S2 S2^T Y2^T, X2 = [X_1 w2, ..., X_N w2].
inline Matrix update_w1(std::span<const Matrix> samples, const Matrix& y, const Vector& s, const Vector& w2,
                        double lambda1) {
    detail::check_samples(samples, y, s);
    const Eigen::Index d = samples.front().rows();
    if (w2.size() != samples.front().cols()) throw DimensionError("w2 length does not match sample columns");
    const auto n = static_cast<Eigen::Index>(samples.size());
    // Row i of a is sqrt(s_i) (X_i w2)^T; row i of b is sqrt(s_i) y_i^T.
    Matrix a(n, d);
    Matrix b(n, y.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::sqrt(s[i]);
        a.row(i) = w * (samples[static_cast<std::size_t>(i)] * w2).transpose();
        b.row(i) = w * y.col(i).transpose();
    }
    return ridge_solve(a, b, lambda1);
}

/// Closed-form w2 for fixed W1:
/// (X1^T S1^T S1 X1 + lambda2 I)^{-1} X1^T S1^T S1 Y1, with X1 stacking the
/// C x T blocks W1^T X_i (sample-major, class-minor) into CN x T.
inline Vector update_w2(std::span<const Matrix> samples, const Matrix& y, const Vector& s, const Matrix& w1,
                        double lambda2) {
    detail::check_samples(samples, y, s);
    if (w1.rows() != samples.front().rows() || w1.cols() != y.rows()) {
        throw DimensionError("W1 shape does not match samples/targets");
    }
    const Eigen::Index c = y.rows();
    const Eigen::Index t = samples.front().cols();
    const auto n = static_cast<Eigen::Index>(samples.size());
    Matrix a(c * n, t);
    Matrix b(c * n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::sqrt(s[i]);
        a.middleRows(i * c, c) = w * (w1.transpose() * samples[static_cast<std::size_t>(i)]);
        b.middleRows(i * c, c) = w * y.col(i);
    }
    return ridge_solve(a, b, lambda2).col(0);
}

/// The weighted, regularized least-squares objective.
inline double loss(std::span<const Matrix> samples, const Matrix& y, const Vector& s, const Matrix& w1,
                   const Vector& w2, double lambda1, double lambda2) {
    detail::check_samples(samples, y, s);
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        total += s[col] * (w1.transpose() * samples[i] * w2 - y.col(col)).squaredNorm();
    }
    return total + lambda1 * w1.squaredNorm() + lambda2 * w2.squaredNorm();
}

/// f(X) = W1^T X w2.
inline Vector scores(const Matrix& w1, const Vector& w2, const Matrix& sample) {
    if (sample.rows() != w1.rows() || sample.cols() != w2.size()) {
        throw DimensionError("sample is " + std::to_string(sample.rows()) + "x" + std::to_string(sample.cols()) +
                             ", model expects " + std::to_string(w1.rows()) + "x" + std::to_string(w2.size()));
    }
    return w1.transpose() * sample * w2;
}

inline Vector scores(const WmtrModel& model, const Matrix& sample) { return scores(model.w1, model.w2, sample); }

/// Largest score wins; ties go to the lowest class index.
inline Label predict(const WmtrModel& model, const Matrix& sample) { return argmax(scores(model, sample)); }

inline WmtrModel fit(std::span<const Matrix> samples, std::span<const Label> labels, const WmtrConfig& cfg) {
    validate(cfg);
    if (samples.size() != labels.size()) throw DimensionError("samples and labels differ in length");
    const auto counts = class_counts(labels);
    if (counts.size() < 2) throw InputError("WMTR needs at least two classes");
    const std::size_t num_classes = counts.size();
    const Vector s = sample_weights(labels, cfg.r);
    const Matrix y = targets(labels, num_classes);
    detail::check_samples(samples, y, s);
    const Eigen::Index d = samples.front().rows();
    const Eigen::Index t = samples.front().cols();

    WmtrModel model;
    model.config = cfg;
    model.num_classes = num_classes;

    Matrix w1 = Matrix::Zero(d, static_cast<Eigen::Index>(num_classes));
    Vector w2 = Vector::Zero(t);
    w2[t - 1] = 1.0;
    model.loss_trace.push_back(loss(samples, y, s, w1, w2, cfg.lambda1, cfg.lambda2));

    std::vector<Matrix> w1_states;
    std::vector<Vector> w2_states;
    std::vector<Label> predicted(samples.size());
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        Matrix w1_next = update_w1(samples, y, s, w2, cfg.lambda1);
        model.loss_trace.push_back(loss(samples, y, s, w1_next, w2, cfg.lambda1, cfg.lambda2));
        Vector w2_next = update_w2(samples, y, s, w1_next, cfg.lambda2);
        model.loss_trace.push_back(loss(samples, y, s, w1_next, w2_next, cfg.lambda1, cfg.lambda2));

        for (std::size_t i = 0; i < samples.size(); ++i) predicted[i] = argmax(scores(w1_next, w2_next, samples[i]));
        model.f1_trace.push_back(evaluate(labels, predicted, num_classes).macro_f1);

        const double delta = std::max((w1_next - w1).norm(), (w2_next - w2).norm());
        w1 = std::move(w1_next);
        w2 = std::move(w2_next);
        w1_states.push_back(w1);
        w2_states.push_back(w2);
        model.iterations = iter;
        if (delta <= cfg.tol) {
            model.converged = true;
            break;
        }
    }

    std::size_t pick = w1_states.size() - 1;
    if (cfg.select_by_train_f1) pick = static_cast<std::size_t>(argmax(model.f1_trace));
    model.selected_iteration = static_cast<int>(pick) + 1;
    model.w1 = std::move(w1_states[pick]);
    model.w2 = std::move(w2_states[pick]);
    return model;
}

}  // namespace wmtr
}  // namespace lobtensor

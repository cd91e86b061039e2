#pragma once

// Constrained Multilinear Discriminant Analysis (CMDA).
//
// Learns one orthonormal projection W_k (I_k x I'_k) per mode by sweeping the
// modes in order 1..K and replacing W_k with the leading eigenvectors of
// (S_w^k + lambda*I)^{-1} S_b^k, where the mode-k scatter matrices are built
// from samples projected in every other mode. Classification picks the class
// whose projected mean is nearest (Frobenius distance) to the projected sample.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lobtensor/eigensolve.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/labels.hpp"
#include "lobtensor/tensor.hpp"

namespace lobtensor {

namespace detail {

inline void check_same_dims(std::span<const Tensor> samples) {
    if (samples.empty()) throw InputError("no samples");
    for (const Tensor& s : samples) {
        if (s.dims() != samples.front().dims()) throw DimensionError("samples differ in shape");
    }
}

/// Flip columns of `fresh` that point away from the matching column of `prev`.
inline void align_signs(Matrix& fresh, const Matrix& prev) {
    for (Eigen::Index j = 0; j < fresh.cols(); ++j) {
        if (fresh.col(j).dot(prev.col(j)) < 0) fresh.col(j) *= -1.0;
    }
}

inline double orthonormality_error(const Matrix& w) {
    return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
}

}  // namespace detail

struct ClassMeans {
    std::vector<Tensor> means;         ///< per-class mean tensors
    Tensor global;                     ///< mean over all samples
    std::vector<std::size_t> counts;   ///< samples per class
};

inline ClassMeans class_means(std::span<const Tensor> samples, std::span<const Label> labels) {
    detail::check_same_dims(samples);
    if (samples.size() != labels.size()) throw DimensionError("samples and labels differ in length");
    ClassMeans out;
    out.counts = class_counts(labels);
    const auto& dims = samples.front().dims();
    out.means.assign(out.counts.size(), Tensor(dims));
    out.global = Tensor(dims);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.means[static_cast<std::size_t>(labels[i])] += samples[i];
        out.global += samples[i];
    }
    for (std::size_t c = 0; c < out.means.size(); ++c) out.means[c] *= 1.0 / static_cast<double>(out.counts[c]);
    out.global *= 1.0 / static_cast<double>(samples.size());
    return out;
}

struct Scatter {
    Matrix between;  ///< S_b^k
    Matrix within;   ///< S_w^k
};

/// Mode-k interclass and intraclass scatter matrices. Every mode except k is
/// projected with projections[p-1]^T; projections[k-1] is not used (only its
/// presence is required so the list covers all modes).
inline Scatter scatter_matrices(std::span<const Tensor> samples, std::span<const Label> labels,
                                std::span<const Matrix> projections, std::size_t k,
                                const ClassMeans& stats) {
    detail::check_same_dims(samples);
    const Tensor& first = samples.front();
    first.check_mode(k);
    if (projections.size() != first.order()) throw DimensionError("need one projection per mode");
    for (std::size_t p = 1; p <= first.order(); ++p) {
        if (p != k && static_cast<std::size_t>(projections[p - 1].rows()) != first.dim(p)) {
            throw DimensionError("projection for mode " + std::to_string(p) + " has " +
                                 std::to_string(projections[p - 1].rows()) + " rows, mode extent is " +
                                 std::to_string(first.dim(p)));
        }
    }
    const auto ik = static_cast<Eigen::Index>(first.dim(k));
    Scatter out{Matrix::Zero(ik, ik), Matrix::Zero(ik, ik)};

    auto projected_unfolding = [&](const Tensor& t) { return unfold(project(t, projections, k), k); };

    for (std::size_t c = 0; c < stats.means.size(); ++c) {
        const Matrix z = projected_unfolding(stats.means[c] - stats.global);
        out.between.selfadjointView<Eigen::Lower>().rankUpdate(z, static_cast<double>(stats.counts[c]));
    }

    // Centered, projected unfoldings are packed side by side and folded into
    // S_w with one rank update per block.
    const Eigen::Index per_sample = projected_unfolding(samples.front()).cols();
    const Eigen::Index block_samples = std::max<Eigen::Index>(1, 4096 / std::max<Eigen::Index>(1, per_sample));
    Matrix block(ik, per_sample * block_samples);
    Eigen::Index filled = 0;
    auto flush = [&] {
        if (filled == 0) return;
        out.within.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(filled * per_sample));
        filled = 0;
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
        block.middleCols(filled * per_sample, per_sample) =
            projected_unfolding(samples[i] - stats.means[static_cast<std::size_t>(labels[i])]);
        if (++filled == block_samples) flush();
    }
    flush();

    out.between.triangularView<Eigen::StrictlyUpper>() = out.between.transpose();
    out.within.triangularView<Eigen::StrictlyUpper>() = out.within.transpose();
    return out;
}

inline Scatter scatter_matrices(std::span<const Tensor> samples, std::span<const Label> labels,
                                std::span<const Matrix> projections, std::size_t k) {
    return scatter_matrices(samples, labels, projections, k, class_means(samples, labels));
}

struct MdaConfig {
    std::vector<std::size_t> subspace_dims;  ///< I'_k per mode
    double lambda = 1.0;
    int max_iters = 50;
    double tol = 1e-6;
    std::uint64_t rng_seed = 0;
};

struct MdaModel {
    MdaConfig config;
    std::vector<std::size_t> input_dims;
    std::vector<Matrix> projections;     ///< W_k, I_k x I'_k, orthonormal columns
    std::vector<Tensor> class_means;     ///< class means projected into the subspace
    int iterations = 0;
    bool converged = false;
    std::vector<double> delta_trace;          ///< max_k ||W_k new - W_k old||_F per sweep
    std::vector<double> orthonormality_trace; ///< max_k ||W_k^T W_k - I||_inf per sweep

    std::size_t num_classes() const noexcept { return class_means.size(); }
};

inline void validate(const MdaConfig& cfg, const std::vector<std::size_t>& input_dims) {
    if (cfg.subspace_dims.size() != input_dims.size()) {
        throw ConfigError("MDA needs " + std::to_string(input_dims.size()) + " subspace dims, got " +
                          std::to_string(cfg.subspace_dims.size()));
    }
    for (std::size_t k = 0; k < input_dims.size(); ++k) {
        if (cfg.subspace_dims[k] < 1 || cfg.subspace_dims[k] > input_dims[k]) {
            throw ConfigError("MDA subspace dim " + std::to_string(cfg.subspace_dims[k]) + " for mode " +
                              std::to_string(k + 1) + " must lie in [1, " + std::to_string(input_dims[k]) + "]");
        }
    }
    if (cfg.max_iters < 1) throw ConfigError("MDA max_iters must be >= 1");
    if (!(cfg.lambda >= 0)) throw ConfigError("MDA lambda must be >= 0");
    if (!(cfg.tol > 0)) throw ConfigError("MDA tol must be > 0");
}

namespace mda {

inline MdaModel fit(std::span<const Tensor> samples, std::span<const Label> labels, const MdaConfig& cfg) {
    detail::check_same_dims(samples);
    const auto& dims = samples.front().dims();
    validate(cfg, dims);
    const ClassMeans stats = class_means(samples, labels);
    if (stats.counts.size() < 2) throw InputError("MDA needs at least two classes");

    MdaModel model;
    model.config = cfg;
    model.input_dims = dims;

    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        Matrix init(static_cast<Eigen::Index>(dims[k]), static_cast<Eigen::Index>(cfg.subspace_dims[k]));
        for (Eigen::Index j = 0; j < init.cols(); ++j)
            for (Eigen::Index i = 0; i < init.rows(); ++i) init(i, j) = normal(rng);
        model.projections.push_back(orthonormalize(init));
    }

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        double delta = 0.0;
        double ortho = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
            const Scatter s = scatter_matrices(samples, labels, model.projections, k, stats);
            Matrix w = regularized_ratio_eig(s.between, s.within, cfg.lambda,
                                             static_cast<Eigen::Index>(cfg.subspace_dims[k - 1]));
            Matrix& prev = model.projections[k - 1];
            detail::align_signs(w, prev);
            delta = std::max(delta, (w - prev).norm());
            prev = std::move(w);
        }
        for (const Matrix& w : model.projections) ortho = std::max(ortho, detail::orthonormality_error(w));
        model.iterations = iter;
        model.delta_trace.push_back(delta);
        model.orthonormality_trace.push_back(ortho);
        if (delta <= cfg.tol) {
            model.converged = true;
            break;
        }
    }

    for (const Tensor& m : stats.means) model.class_means.push_back(project(m, model.projections));
    return model;
}

/// Squared Frobenius distances from the projected sample to each projected class mean.
inline std::vector<double> distances(const MdaModel& model, const Tensor& sample) {
    if (sample.dims() != model.input_dims) throw DimensionError("sample shape does not match the MDA model");
    const Tensor y = project(sample, model.projections);
    std::vector<double> out;
    out.reserve(model.class_means.size());
    for (const Tensor& m : model.class_means) {
        double d = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double e = y.data()[i] - m.data()[i];
            d += e * e;
        }
        out.push_back(d);
    }
    return out;
}

/// Nearest projected class mean; ties go to the lowest class index.
inline Label predict(const MdaModel& model, const Tensor& sample) {
    return argmin(distances(model, sample));
}

}  // namespace mda
}  // namespace lobtensor

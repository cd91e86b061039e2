#pragma once

// JSON encoding of matrices, tensors, models and metric reports.
//
// Matrix:  {"rows": r, "cols": c, "data": [row-major values]}
// Tensor:  {"dims": [I_1, ...], "data": [values, mode-1 fastest]}
// Vector:  plain array
//
// MDA model fields:  config, input_dims, projections (matrices), class_means
//                    (tensors), iterations, converged, delta_trace,
//                    orthonormality_trace
// WMTR model fields: config, w1, w2, num_classes, iterations, converged,
//                    selected_iteration, f1_trace, loss_trace
// LDA model fields:  lambda, projection, class_means (vectors)
// RR model fields:   lambda, weights, num_classes
//
// Doubles are written by nlohmann::json with round-trip precision, and an
// infinite WMTR exponent r is written as the string "inf".

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "lobtensor/baselines.hpp"
#include "lobtensor/data.hpp"
#include "lobtensor/errors.hpp"
#include "lobtensor/mda.hpp"
#include "lobtensor/metrics.hpp"
#include "lobtensor/tensor.hpp"
#include "lobtensor/wmtr.hpp"

namespace lobtensor {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("document is missing field '") + key + "'");
    return *it;
}

}  // namespace detail

inline Json matrix_to_json(const Matrix& m) {
    Json data = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json& j) {
    const auto rows = detail::field(j, "rows").get<Eigen::Index>();
    const auto cols = detail::field(j, "cols").get<Eigen::Index>();
    const auto& data = detail::field(j, "data");
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw ParseError("matrix data length does not match rows*cols");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
    return m;
}

inline Json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_json(const Json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Json tensor_to_json(const Tensor& t) {
    return Json{{"dims", t.dims()}, {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

inline Tensor tensor_from_json(const Json& j) {
    return Tensor(detail::field(j, "dims").get<std::vector<std::size_t>>(),
                  detail::field(j, "data").get<std::vector<double>>());
}

inline Json to_json(const MdaConfig& c) {
    return Json{{"subspace_dims", c.subspace_dims},
                {"lambda", c.lambda},
                {"max_iters", c.max_iters},
                {"tol", c.tol},
                {"rng_seed", c.rng_seed}};
}

inline MdaConfig mda_config_from_json(const Json& j) {
    MdaConfig c;
    c.subspace_dims = detail::field(j, "subspace_dims").get<std::vector<std::size_t>>();
    c.lambda = detail::field(j, "lambda").get<double>();
    c.max_iters = detail::field(j, "max_iters").get<int>();
    c.tol = detail::field(j, "tol").get<double>();
    c.rng_seed = detail::field(j, "rng_seed").get<std::uint64_t>();
    return c;
}

inline Json weight_exponent_to_json(double r) { return std::isinf(r) ? Json("inf") : Json(r); }

inline double weight_exponent_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kUnweighted;
        throw ParseError("weight exponent must be a number or \"inf\"");
    }
    return j.get<double>();
}

inline Json to_json(const WmtrConfig& c) {
    return Json{{"lambda1", c.lambda1},     {"lambda2", c.lambda2}, {"r", weight_exponent_to_json(c.r)},
                {"max_iters", c.max_iters}, {"tol", c.tol},         {"select_by_train_f1", c.select_by_train_f1}};
}

inline WmtrConfig wmtr_config_from_json(const Json& j) {
    WmtrConfig c;
    c.lambda1 = detail::field(j, "lambda1").get<double>();
    c.lambda2 = detail::field(j, "lambda2").get<double>();
    c.r = weight_exponent_from_json(detail::field(j, "r"));
    c.max_iters = detail::field(j, "max_iters").get<int>();
    c.tol = detail::field(j, "tol").get<double>();
    c.select_by_train_f1 = detail::field(j, "select_by_train_f1").get<bool>();
    return c;
}

inline Json to_json(const MdaModel& m) {
    Json projections = Json::array(), means = Json::array();
    for (const Matrix& w : m.projections) projections.push_back(matrix_to_json(w));
    for (const Tensor& t : m.class_means) means.push_back(tensor_to_json(t));
    return Json{{"config", to_json(m.config)},
                {"input_dims", m.input_dims},
                {"projections", std::move(projections)},
                {"class_means", std::move(means)},
                {"iterations", m.iterations},
                {"converged", m.converged},
                {"delta_trace", m.delta_trace},
                {"orthonormality_trace", m.orthonormality_trace}};
}

inline MdaModel mda_model_from_json(const Json& j) {
    MdaModel m;
    m.config = mda_config_from_json(detail::field(j, "config"));
    m.input_dims = detail::field(j, "input_dims").get<std::vector<std::size_t>>();
    for (const Json& w : detail::field(j, "projections")) m.projections.push_back(matrix_from_json(w));
    for (const Json& t : detail::field(j, "class_means")) m.class_means.push_back(tensor_from_json(t));
    m.iterations = detail::field(j, "iterations").get<int>();
    m.converged = detail::field(j, "converged").get<bool>();
    m.delta_trace = detail::field(j, "delta_trace").get<std::vector<double>>();
    m.orthonormality_trace = detail::field(j, "orthonormality_trace").get<std::vector<double>>();
    if (m.projections.size() != m.input_dims.size()) throw ParseError("MDA model needs one projection per mode");
    return m;
}

inline Json to_json(const WmtrModel& m) {
    return Json{{"config", to_json(m.config)},
                {"w1", matrix_to_json(m.w1)},
                {"w2", vector_to_json(m.w2)},
                {"num_classes", m.num_classes},
                {"iterations", m.iterations},
                {"converged", m.converged},
                {"selected_iteration", m.selected_iteration},
                {"f1_trace", m.f1_trace},
                {"loss_trace", m.loss_trace}};
}

inline WmtrModel wmtr_model_from_json(const Json& j) {
    WmtrModel m;
    m.config = wmtr_config_from_json(detail::field(j, "config"));
    m.w1 = matrix_from_json(detail::field(j, "w1"));
    m.w2 = vector_from_json(detail::field(j, "w2"));
    m.num_classes = detail::field(j, "num_classes").get<std::size_t>();
    m.iterations = detail::field(j, "iterations").get<int>();
    m.converged = detail::field(j, "converged").get<bool>();
    m.selected_iteration = detail::field(j, "selected_iteration").get<int>();
    m.f1_trace = detail::field(j, "f1_trace").get<std::vector<double>>();
    m.loss_trace = detail::field(j, "loss_trace").get<std::vector<double>>();
    if (static_cast<std::size_t>(m.w1.cols()) != m.num_classes) throw ParseError("WMTR w1 column count != num_classes");
    return m;
}

inline Json to_json(const LdaModel& m) {
    Json means = Json::array();
    for (const Vector& v : m.class_means) means.push_back(vector_to_json(v));
    return Json{{"lambda", m.lambda}, {"projection", matrix_to_json(m.projection)}, {"class_means", std::move(means)}};
}

inline LdaModel lda_model_from_json(const Json& j) {
    LdaModel m;
    m.lambda = detail::field(j, "lambda").get<double>();
    m.projection = matrix_from_json(detail::field(j, "projection"));
    for (const Json& v : detail::field(j, "class_means")) m.class_means.push_back(vector_from_json(v));
    return m;
}

inline Json to_json(const RrModel& m) {
    return Json{{"lambda", m.lambda}, {"weights", matrix_to_json(m.weights)}, {"num_classes", m.num_classes}};
}

inline RrModel rr_model_from_json(const Json& j) {
    RrModel m;
    m.lambda = detail::field(j, "lambda").get<double>();
    m.weights = matrix_from_json(detail::field(j, "weights"));
    m.num_classes = detail::field(j, "num_classes").get<std::size_t>();
    return m;
}

inline Json to_json(const NormStats& s) {
    return Json{{"mean", vector_to_json(s.mean)}, {"std", vector_to_json(s.std)}};
}

inline NormStats norm_stats_from_json(const Json& j) {
    return NormStats{vector_from_json(detail::field(j, "mean")), vector_from_json(detail::field(j, "std"))};
}

inline Json to_json(const ConfusionMatrix& cm) {
    Json rows = Json::array();
    for (std::size_t t = 0; t < cm.num_classes(); ++t) {
        Json row = Json::array();
        for (std::size_t p = 0; p < cm.num_classes(); ++p) row.push_back(cm.at(t, p));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const MetricsReport& r) {
    return Json{{"samples", r.samples},
                {"accuracy", r.accuracy},
                {"precision", r.precision},
                {"recall", r.recall},
                {"f1", r.f1},
                {"macro_precision", r.macro_precision},
                {"macro_recall", r.macro_recall},
                {"macro_f1", r.macro_f1}};
}

inline MetricsReport metrics_report_from_json(const Json& j) {
    MetricsReport r;
    r.samples = detail::field(j, "samples").get<std::size_t>();
    r.accuracy = detail::field(j, "accuracy").get<double>();
    r.precision = detail::field(j, "precision").get<std::vector<double>>();
    r.recall = detail::field(j, "recall").get<std::vector<double>>();
    r.f1 = detail::field(j, "f1").get<std::vector<double>>();
    r.macro_precision = detail::field(j, "macro_precision").get<double>();
    r.macro_recall = detail::field(j, "macro_recall").get<double>();
    r.macro_f1 = detail::field(j, "macro_f1").get<double>();
    return r;
}

}  // namespace lobtensor

#pragma once

// Dense K-mode tensors and the mode-k algebra (fibers, unfolding, mode products).
//
// Layout: data is stored mode-1-fastest. The element (i_1, ..., i_K), with
// 0-based indices, lives at offset
//     i_1 + I_1 * (i_2 + I_2 * (i_3 + ...)).
// A 2-mode tensor is therefore a column-major matrix, which is what Eigen uses,
// so D x T samples map onto Eigen::MatrixXd without reshuffling.
//
// Unfolding: column c of X_(k) is the mode-k fiber whose remaining indices
// (i_1, ..., i_{k-1}, i_{k+1}, ..., i_K) have mode-1-fastest linear index c.
// For a 2-mode tensor, X_(1) is the matrix itself and X_(2) its transpose.
//
// Modes are 1-based in every public function. Element indices are 0-based.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lobtensor/errors.hpp"

namespace lobtensor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        check_dims(dims_);
        data_.assign(product(dims_), 0.0);
    }

    Tensor(std::vector<std::size_t> dims, std::vector<double> data)
        : dims_(std::move(dims)), data_(std::move(data)) {
        check_dims(dims_);
        if (product(dims_) != data_.size()) {
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match product of dims " +
                                 std::to_string(product(dims_)));
        }
    }

    /// Wraps a matrix as a 2-mode tensor (rows = mode 1, cols = mode 2).
    static Tensor from_matrix(const Matrix& m) {
        return Tensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                      std::vector<double>(m.data(), m.data() + m.size()));
    }

    /// Inverse of from_matrix; a 1-mode tensor becomes a column vector.
    Matrix to_matrix() const {
        if (order() > 2) throw DimensionError("to_matrix needs a tensor with at most 2 modes");
        const auto rows = static_cast<Eigen::Index>(dims_[0]);
        const auto cols = static_cast<Eigen::Index>(order() == 2 ? dims_[1] : 1);
        return Eigen::Map<const Matrix>(data_.data(), rows, cols);
    }

    std::size_t order() const noexcept { return dims_.size(); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return data_.size(); }

    /// Extent of mode k (1-based).
    std::size_t dim(std::size_t k) const {
        check_mode(k);
        return dims_[k - 1];
    }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double& at(std::span<const std::size_t> index) { return data_[offset(index)]; }
    double at(std::span<const std::size_t> index) const { return data_[offset(index)]; }
    double& at(std::initializer_list<std::size_t> index) {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }
    double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    /// Flat offset of a 0-based multi-index.
    std::size_t offset(std::span<const std::size_t> index) const {
        if (index.size() != order()) {
            throw BoundsError("index has " + std::to_string(index.size()) + " entries, tensor has " +
                              std::to_string(order()) + " modes");
        }
        std::size_t off = 0;
        for (std::size_t m = order(); m-- > 0;) {
            if (index[m] >= dims_[m]) {
                throw BoundsError("index " + std::to_string(index[m]) + " out of range for mode " +
                                  std::to_string(m + 1) + " of extent " + std::to_string(dims_[m]));
            }
            off = off * dims_[m] + index[m];
        }
        return off;
    }

    void check_mode(std::size_t k) const {
        if (k < 1 || k > order()) {
            throw BoundsError("mode " + std::to_string(k) + " out of range for a " +
                              std::to_string(order()) + "-mode tensor");
        }
    }

    Tensor& operator+=(const Tensor& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Tensor& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(Tensor a, double s) { return a *= s; }
    friend Tensor operator*(double s, Tensor a) { return a *= s; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.dims_ == b.dims_ && a.data_ == b.data_;
    }

    static std::size_t product(const std::vector<std::size_t>& dims) {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    }

private:
    static void check_dims(const std::vector<std::size_t>& dims) {
        if (dims.empty()) throw DimensionError("tensor needs at least one mode");
        for (std::size_t d : dims) {
            if (d == 0) throw DimensionError("tensor dims must be positive");
        }
    }

    void check_same_shape(const Tensor& o) const {
        if (dims_ != o.dims_) throw DimensionError("tensor shapes differ");
    }

    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

namespace detail {

/// Sizes of the block before mode k, mode k itself, and after it.
struct ModeSplit {
    std::size_t left;
    std::size_t mid;
    std::size_t right;
};

inline ModeSplit split_at(const std::vector<std::size_t>& dims, std::size_t k) {
    ModeSplit s{1, dims[k - 1], 1};
    for (std::size_t i = 0; i + 1 < k; ++i) s.left *= dims[i];
    for (std::size_t i = k; i < dims.size(); ++i) s.right *= dims[i];
    return s;
}

}  // namespace detail

/// Mode-k fiber: vary index k, hold the others at `fixed` (K-1 entries, in mode
/// order with mode k omitted).
inline Vector mode_k_fiber(const Tensor& t, std::size_t k, std::span<const std::size_t> fixed) {
    t.check_mode(k);
    if (fixed.size() + 1 != t.order()) {
        throw BoundsError("fiber needs " + std::to_string(t.order() - 1) + " fixed indices, got " +
                          std::to_string(fixed.size()));
    }
    std::vector<std::size_t> index(t.order());
    for (std::size_t m = 0, f = 0; m < t.order(); ++m) {
        index[m] = (m + 1 == k) ? 0 : fixed[f++];
    }
    const std::size_t base = t.offset(index);
    const auto s = detail::split_at(t.dims(), k);
    Vector fiber(static_cast<Eigen::Index>(s.mid));
    for (std::size_t j = 0; j < s.mid; ++j) fiber[static_cast<Eigen::Index>(j)] = t.data()[base + j * s.left];
    return fiber;
}

inline Vector mode_k_fiber(const Tensor& t, std::size_t k, std::initializer_list<std::size_t> fixed) {
    return mode_k_fiber(t, k, std::span<const std::size_t>(fixed.begin(), fixed.size()));
}

/// Mode-k unfolding X_(k), shape I_k x prod_{i != k} I_i.
inline Matrix unfold(const Tensor& t, std::size_t k) {
    t.check_mode(k);
    const auto s = detail::split_at(t.dims(), k);
    Matrix out(static_cast<Eigen::Index>(s.mid), static_cast<Eigen::Index>(s.left * s.right));
    const auto data = t.data();
    for (std::size_t b = 0; b < s.right; ++b) {
        for (std::size_t i = 0; i < s.mid; ++i) {
            const double* src = data.data() + s.left * (i + s.mid * b);
            for (std::size_t a = 0; a < s.left; ++a) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a + s.left * b)) = src[a];
            }
        }
    }
    return out;
}

/// Inverse of unfold: rebuilds a tensor of shape `dims` from its mode-k unfolding.
inline Tensor fold(const Matrix& m, std::size_t k, const std::vector<std::size_t>& dims) {
    Tensor t(dims);
    t.check_mode(k);
    const auto s = detail::split_at(dims, k);
    if (static_cast<std::size_t>(m.rows()) != s.mid ||
        static_cast<std::size_t>(m.cols()) != s.left * s.right) {
        throw DimensionError("fold: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " + std::to_string(s.mid) + "x" +
                             std::to_string(s.left * s.right));
    }
    auto data = t.data();
    for (std::size_t b = 0; b < s.right; ++b) {
        for (std::size_t i = 0; i < s.mid; ++i) {
            double* dst = data.data() + s.left * (i + s.mid * b);
            for (std::size_t a = 0; a < s.left; ++a) {
                dst[a] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a + s.left * b));
            }
        }
    }
    return t;
}

/// Mode-k product t x_k w, with w of shape J x I_k. Mode k of the result has extent J.
inline Tensor mode_k_product(const Tensor& t, const Matrix& w, std::size_t k) {
    t.check_mode(k);
    const auto s = detail::split_at(t.dims(), k);
    if (static_cast<std::size_t>(w.cols()) != s.mid) {
        throw DimensionError("mode-" + std::to_string(k) + " product: matrix has " +
                             std::to_string(w.cols()) + " columns, mode extent is " +
                             std::to_string(s.mid));
    }
    auto dims = t.dims();
    dims[k - 1] = static_cast<std::size_t>(w.rows());
    Tensor out(dims);
    const auto left = static_cast<Eigen::Index>(s.left);
    const auto in_block = static_cast<Eigen::Index>(s.left * s.mid);
    const auto out_block = left * w.rows();
    const double* src = t.data().data();
    double* dst = out.data().data();
    // Each trailing block is a (left x I_k) column-major slab; the product maps it
    // to (left x J) as slab * w^T.
    for (std::size_t b = 0; b < s.right; ++b) {
        Eigen::Map<const Matrix> slab(src + in_block * static_cast<Eigen::Index>(b), left,
                                      static_cast<Eigen::Index>(s.mid));
        Eigen::Map<Matrix> res(dst + out_block * static_cast<Eigen::Index>(b), left, w.rows());
        res.noalias() = slab * w.transpose();
    }
    return out;
}

/// Projects t onto W_p^T in every mode p except `skip` (1-based; 0 projects all
/// modes). `projections[p-1]` has shape I_p x I'_p.
inline Tensor project(const Tensor& t, std::span<const Matrix> projections, std::size_t skip = 0) {
    if (projections.size() != t.order()) {
        throw DimensionError("need one projection per mode: got " + std::to_string(projections.size()) +
                             " for a " + std::to_string(t.order()) + "-mode tensor");
    }
    Tensor out = t;
    for (std::size_t p = 1; p <= t.order(); ++p) {
        if (p == skip) continue;
        out = mode_k_product(out, projections[p - 1].transpose(), p);
    }
    return out;
}

inline double frobenius_norm(const Tensor& t) {
    double sum = 0.0;
    for (double v : t.data()) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace lobtensor

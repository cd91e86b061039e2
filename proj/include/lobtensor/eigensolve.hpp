#pragma once

// Dense symmetric eigen-solvers, the regularized ratio eigen-problem used by
// the discriminant methods, ridge solves, and thin-QR orthonormalization.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "lobtensor/errors.hpp"
#include "lobtensor/tensor.hpp"

namespace lobtensor {

namespace tolerance {
/// Largest |a(i,j) - a(j,i)| accepted as "symmetric".
inline constexpr double kSymmetry = 1e-10;
/// Relative diagonal of R below which a QR input is declared rank deficient.
inline constexpr double kRank = 1e-12;
}  // namespace tolerance

/// Eigenvalues sorted descending; column i of `vectors` pairs with values[i].
struct EigenPairs {
    Vector values;
    Matrix vectors;
};

namespace detail {

inline void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw InputError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
    }
}

inline void require_symmetric(const Matrix& a, const char* what) {
    require_square(a, what);
    const double asym = a.size() ? (a - a.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > tolerance::kSymmetry) {
        throw InputError(std::string(what) + ": matrix is not symmetric (max asymmetry " +
                         std::to_string(asym) + ")");
    }
}

}  // namespace detail

inline EigenPairs sym_eig(const Matrix& a) {
    detail::require_symmetric(a, "sym_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) throw NumericError("sym_eig: eigen-solver did not converge");
    // Eigen returns ascending order.
    EigenPairs out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
    return out;
}

/// Orthonormal basis of span(m) via thin Householder QR, with the sign of each
/// column fixed so that R has a positive diagonal.
inline Matrix orthonormalize(const Matrix& m) {
    if (m.rows() < m.cols()) {
        throw InputError("orthonormalize: need rows >= cols, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    const Matrix& r = qr.matrixQR();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (std::abs(r(j, j)) <= tolerance::kRank * scale) {
            throw NumericError("orthonormalize: input is rank deficient at column " + std::to_string(j));
        }
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

/// Orthonormal basis for the span of the top `n_components` eigenvectors of
/// (sw + lambda*I)^{-1} sb. Solved by whitening with the Cholesky factor
/// sw + lambda*I = L L^T: the symmetric problem L^{-1} sb L^{-T} u = mu u is
/// diagonalized, mapped back through L^{-T}, and orthonormalized in eigenvalue
/// order. The first column is therefore the normalized leading generalized
/// eigenvector.
inline Matrix regularized_ratio_eig(const Matrix& sb, const Matrix& sw, double lambda,
                                    Eigen::Index n_components) {
    detail::require_symmetric(sb, "regularized_ratio_eig (sb)");
    detail::require_symmetric(sw, "regularized_ratio_eig (sw)");
    if (sb.rows() != sw.rows()) throw DimensionError("regularized_ratio_eig: sb and sw differ in size");
    if (lambda < 0) throw InputError("regularized_ratio_eig: lambda must be >= 0");
    if (n_components < 1 || n_components > sb.rows()) {
        throw InputError("regularized_ratio_eig: n_components " + std::to_string(n_components) +
                         " outside [1, " + std::to_string(sb.rows()) + "]");
    }
    Matrix reg = sw;
    reg.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(reg);
    if (llt.info() != Eigen::Success) {
        throw NumericError("regularized_ratio_eig: S_w + lambda*I is not positive definite; "
                           "increase lambda");
    }
    const auto l = llt.matrixL();
    // c = L^{-1} sb L^{-T}
    Matrix c = l.solve(sb);
    c = l.solve(c.transpose().eval());
    c = 0.5 * (c + c.transpose()).eval();
    const EigenPairs eig = sym_eig(c);
    Matrix v = llt.matrixU().solve(eig.vectors.leftCols(n_components));
    return orthonormalize(v);
}

/// Solves (a^T a + lambda*I) x = a^T b.
inline Matrix ridge_solve(const Matrix& a, const Matrix& b, double lambda) {
    if (a.rows() != b.rows()) {
        throw DimensionError("ridge_solve: a has " + std::to_string(a.rows()) + " rows, b has " +
                             std::to_string(b.rows()));
    }
    if (!(lambda > 0)) throw InputError("ridge_solve: lambda must be > 0");
    Matrix gram = Matrix::Zero(a.cols(), a.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    gram.diagonal().array() += lambda;
    const Matrix rhs = a.transpose() * b;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericError("ridge_solve: normal equations not positive definite");
    return llt.solve(rhs);
}

}  // namespace lobtensor

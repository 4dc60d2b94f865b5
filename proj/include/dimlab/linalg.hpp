#pragma once

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "dimlab/error.hpp"

namespace dimlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column-major storage: each column of a data matrix is one sample.
inline std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_finite(const Matrix& m, const std::string& name) {
    require(m.allFinite(), ErrorCode::InvalidArgument, name + " contains NaN or Inf");
}

inline void require_cols(const Matrix& a, const Matrix& b, const std::string& what) {
    require(a.cols() == b.cols(), ErrorCode::DimensionMismatch,
            what + ": column counts differ (" + shape(a) + " vs " + shape(b) + ")");
}

/// Vertical concatenation; blocks with zero rows are skipped.
inline Matrix vstack(std::initializer_list<const Matrix*> blocks) {
    Eigen::Index rows = 0;
    Eigen::Index cols = -1;
    for (const Matrix* b : blocks) {
        if (b->rows() == 0) continue;
        if (cols < 0) cols = b->cols();
        require(b->cols() == cols, ErrorCode::DimensionMismatch, "vstack: column counts differ");
        rows += b->rows();
    }
    if (cols < 0) cols = blocks.size() ? (*blocks.begin())->cols() : 0;
    Matrix out(rows, cols);
    Eigen::Index at = 0;
    for (const Matrix* b : blocks) {
        if (b->rows() == 0) continue;
        out.middleRows(at, b->rows()) = *b;
        at += b->rows();
    }
    return out;
}

/// Factorization of a symmetric positive (semi)definite Gram matrix through
/// its eigendecomposition. The spectrum gives an exact condition number and
/// the solve never forms an explicit inverse.
class GramFactor {
public:
    explicit GramFactor(const Matrix& gram) : eig_(gram, Eigen::ComputeEigenvectors) {
        require(eig_.info() == Eigen::Success, ErrorCode::SingularGram, "eigendecomposition failed");
        const Vector& ev = eig_.eigenvalues();
        const double hi = ev.maxCoeff();
        const double lo = ev.minCoeff();
        if (lo <= 0.0 || hi <= 0.0)
            condition_ = std::numeric_limits<double>::infinity();
        else
            condition_ = std::max(1.0, hi / lo);
    }

    double condition() const { return condition_; }

    /// Returns G^{-1} rhs.
    Matrix solve(const Matrix& rhs) const {
        const Matrix& v = eig_.eigenvectors();
        Matrix tmp = v.transpose() * rhs;
        tmp = eig_.eigenvalues().cwiseInverse().asDiagonal() * tmp;
        return v * tmp;
    }

private:
    Eigen::SelfAdjointEigenSolver<Matrix> eig_;
    double condition_ = 1.0;
};

/// Index of the largest entry; ties go to the lowest index.
inline Eigen::Index argmax(const Eigen::Ref<const Vector>& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

} // namespace dimlab

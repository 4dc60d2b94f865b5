#pragma once

#include <random>

#include <Eigen/Dense>

namespace testing_support {

// Test-side randomness, kept apart from the library's seeded streams.
inline Eigen::MatrixXd randn(Eigen::Index rows, Eigen::Index cols, std::mt19937& g, double sigma = 1.0) {
    std::normal_distribution<double> dist(0.0, sigma);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(g);
    return m;
}

inline Eigen::VectorXd randn_vec(Eigen::Index n, std::mt19937& g) { return randn(n, 1, g).col(0); }

// Min-norm oracle: Y pinv(X) via complete orthogonal decomposition.
inline Eigen::MatrixXd pinv_oracle(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x.transpose());
    return y * cod.pseudoInverse().transpose();
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace testing_support

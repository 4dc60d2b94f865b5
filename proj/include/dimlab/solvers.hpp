#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "dimlab/linalg.hpp"
#include "dimlab/rng.hpp"

/// Closed-form linear solutions for inputs carrying unnecessary dimensions.
///
/// Data matrices hold one sample per column: X is p x n (minimal
/// dimensions), N is d_unrelated x n, T maps the p minimal dimensions to the
/// d_related redundant ones, and Y is o x n. Every solver returns a weight
/// matrix W with W * input = prediction.
namespace dimlab::solvers {

enum class Method { MinNorm, WithUnrelated, Frame, Combined, Tikhonov, MoorePenrose };

constexpr std::string_view to_string(Method m) {
    switch (m) {
    case Method::MinNorm: return "min_norm";
    case Method::WithUnrelated: return "with_unrelated";
    case Method::Frame: return "frame";
    case Method::Combined: return "combined";
    case Method::Tikhonov: return "tikhonov";
    case Method::MoorePenrose: return "moore_penrose";
    }
    return "unknown";
}

struct LinearSolution {
    Matrix weights;
    Method method = Method::MinNorm;
    double lambda = 0.0;       // only nonzero for Tikhonov
    double conditioning = 1.0; // condition number of the inverted Gram matrix

    Eigen::Index input_dim() const { return weights.cols(); }
    Eigen::Index output_dim() const { return weights.rows(); }
};

/// Solves whose Gram condition number exceeds the cap raise SingularGram.
inline constexpr double kDefaultConditionCap = 1e12;

struct SolverOptions {
    double condition_cap = kDefaultConditionCap;
};

/// Linear map F = [I_p; T] that appends task-related dimensions.
class FrameSpec {
public:
    struct Identity {};
    struct RepeatK {
        int k = 1;
    };
    struct GaussianCombination {
        Eigen::Index d = 0;
        std::uint64_t seed = 0;
    };
    struct Custom {
        Matrix T;
    };
    using Kind = std::variant<Identity, RepeatK, GaussianCombination, Custom>;

    static FrameSpec identity(Eigen::Index p) { return FrameSpec(Identity{}, p); }

    static FrameSpec repeat(Eigen::Index p, int k) {
        require(k >= 1, ErrorCode::InvalidRepeatCount, "RepeatK needs k >= 1, got " + std::to_string(k));
        return FrameSpec(RepeatK{k}, p);
    }

    static FrameSpec gaussian(Eigen::Index p, Eigen::Index d, std::uint64_t seed) {
        require(d >= 0, ErrorCode::InvalidDim, "GaussianCombination needs d >= 0");
        return FrameSpec(GaussianCombination{d, seed}, p);
    }

    static FrameSpec custom(Matrix T) {
        require_finite(T, "frame T");
        const Eigen::Index p = T.cols();
        return FrameSpec(Custom{std::move(T)}, p);
    }

    const Kind& kind() const { return kind_; }
    Eigen::Index p() const { return p_; }

    Eigen::Index related_dim() const {
        return std::visit(
            [this](const auto& k) -> Eigen::Index {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Identity>) return 0;
                else if constexpr (std::is_same_v<K, RepeatK>) return k.k * p_;
                else if constexpr (std::is_same_v<K, GaussianCombination>) return k.d;
                else return k.T.rows();
            },
            kind_);
    }

    /// The related block T (related_dim x p).
    Matrix related_block() const {
        return std::visit(
            [this](const auto& k) -> Matrix {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Identity>) {
                    return Matrix(0, p_);
                } else if constexpr (std::is_same_v<K, RepeatK>) {
                    Matrix t(k.k * p_, p_);
                    for (int r = 0; r < k.k; ++r) t.middleRows(r * p_, p_).setIdentity();
                    return t;
                } else if constexpr (std::is_same_v<K, GaussianCombination>) {
                    // Drawn row by row: row i holds the weights of related dimension i.
                    Engine eng = make_stream(k.seed, "frame");
                    Matrix t = gaussian_matrix(p_, k.d, 1.0, eng);
                    return t.transpose();
                } else {
                    return k.T;
                }
            },
            kind_);
    }

    /// F = [I_p; T], of size (p + related_dim) x p.
    Matrix materialize() const {
        const Matrix t = related_block();
        Matrix f(p_ + t.rows(), p_);
        f.topRows(p_).setIdentity();
        if (t.rows() > 0) f.bottomRows(t.rows()) = t;
        return f;
    }

    /// The scaling factor a with F^T F = a I, if F is a tight frame.
    std::optional<double> tight_factor(double rel_tol = 1e-12) const {
        const Matrix f = materialize();
        const Matrix g = f.transpose() * f;
        const double a = g.diagonal().mean();
        const Matrix diff = g - a * Matrix::Identity(p_, p_);
        if (diff.cwiseAbs().maxCoeff() <= rel_tol * a) return a;
        return std::nullopt;
    }

private:
    FrameSpec(Kind kind, Eigen::Index p) : kind_(std::move(kind)), p_(p) {
        require(p >= 1, ErrorCode::InvalidDim, "frame needs p >= 1");
    }

    Kind kind_;
    Eigen::Index p_ = 1;
};

namespace detail {

inline void check_pair(const Matrix& x, const Matrix& y, const char* op) {
    require(x.rows() >= 1 && x.cols() >= 1, ErrorCode::InvalidDim, std::string(op) + ": X must be non-empty");
    require(y.rows() >= 1, ErrorCode::InvalidDim, std::string(op) + ": Y must have at least one output row");
    require_cols(x, y, op);
    require_finite(x, "X");
    require_finite(y, "Y");
}

inline void check_condition(double cond, const SolverOptions& opts, const char* op) {
    require(cond <= opts.condition_cap, ErrorCode::SingularGram,
            std::string(op) + ": Gram condition estimate " + std::to_string(cond) + " exceeds cap " +
                std::to_string(opts.condition_cap));
}

/// W = Y G^{-1} S^T computed as (S (G^{-1} Y^T))^T, G symmetric.
inline Matrix gram_weights(const GramFactor& g, const Matrix& y, const Matrix& stacked) {
    const Matrix c = g.solve(y.transpose());
    return (stacked * c).transpose();
}

} // namespace detail

/// W+ = Y (X^T X)^{-1} X^T, the minimum-Frobenius-norm interpolant in the
/// overparameterized regime p > n. Computed from a thin SVD of X.
inline LinearSolution min_norm_pseudo_inverse(const Matrix& x, const Matrix& y, const SolverOptions& opts = {}) {
    detail::check_pair(x, y, "min_norm_pseudo_inverse");
    require(x.rows() > x.cols(), ErrorCode::RegimeViolation,
            "min_norm_pseudo_inverse needs p > n, got " + shape(x));
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double hi = s[0];
    const double lo = s[s.size() - 1];
    const double cond = lo > 0.0 ? std::max(1.0, (hi / lo) * (hi / lo)) : std::numeric_limits<double>::infinity();
    detail::check_condition(cond, opts, "min_norm_pseudo_inverse");
    Matrix w = (y * svd.matrixV()) * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    return {std::move(w), Method::MinNorm, 0.0, cond};
}

/// Moore-Penrose solution Y pinv(X) for any shape of X. Singular values below
/// max(p, n) * eps * s_max are treated as zero, so rank-deficient inputs
/// (redundant frames with n > p) are handled.
inline LinearSolution moore_penrose_solution(const Matrix& x, const Matrix& y) {
    detail::check_pair(x, y, "moore_penrose_solution");
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double tol = static_cast<double>(std::max(x.rows(), x.cols())) * std::numeric_limits<double>::epsilon() *
                       (s.size() ? s[0] : 0.0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > tol) ++rank;
    if (rank == 0) return {Matrix::Zero(y.rows(), x.rows()), Method::MoorePenrose, 0.0, 1.0};
    const double ratio = s[0] / s[rank - 1];
    Matrix w = (y * svd.matrixV().leftCols(rank)) * s.head(rank).cwiseInverse().asDiagonal() *
               svd.matrixU().leftCols(rank).transpose();
    return {std::move(w), Method::MoorePenrose, 0.0, std::max(1.0, ratio * ratio)};
}

/// W+ = Y (X^T X + N^T N)^{-1} [X^T N^T] for minimal dimensions X and
/// task-unrelated dimensions N. An empty N (d = 0) is treated as absent.
inline LinearSolution with_unrelated_solution(const Matrix& x, const Matrix& n, const Matrix& y,
                                              const SolverOptions& opts = {}) {
    detail::check_pair(x, y, "with_unrelated_solution");
    if (n.rows() > 0) {
        require_cols(x, n, "with_unrelated_solution");
        require_finite(n, "N");
    }
    require(x.rows() + n.rows() > x.cols(), ErrorCode::RegimeViolation,
            "with_unrelated_solution needs p + d > n");
    Matrix gram = x.transpose() * x;
    if (n.rows() > 0) gram.noalias() += n.transpose() * n;
    const GramFactor g(gram);
    detail::check_condition(g.condition(), opts, "with_unrelated_solution");
    const Matrix stacked = n.rows() > 0 ? vstack({&x, &n}) : x;
    return {detail::gram_weights(g, y, stacked), Method::WithUnrelated, 0.0, g.condition()};
}

/// W+ = Y (X^T F^T F X)^{-1} X^T F^T for inputs F x with F = [I_p; T].
inline LinearSolution frame_solution(const Matrix& x, const Matrix& y, const FrameSpec& frame,
                                     const SolverOptions& opts = {}) {
    detail::check_pair(x, y, "frame_solution");
    const Matrix f = frame.materialize();
    require(f.cols() == x.rows(), ErrorCode::DimensionMismatch,
            "frame_solution: frame has p = " + std::to_string(f.cols()) + " but X has " +
                std::to_string(x.rows()) + " rows");
    const Matrix ftf = f.transpose() * f;
    const Matrix gram = x.transpose() * ftf * x;
    const GramFactor g(gram);
    detail::check_condition(g.condition(), opts, "frame_solution");
    return {detail::gram_weights(g, y, f * x), Method::Frame, 0.0, g.condition()};
}

/// Combined task-related/unrelated solution
///   W+ = Y (X^T (I + T^T T) X + N^T N)^{-1} [X^T  N^T  X^T T^T]
/// with columns ordered [minimal | unrelated | related]. N has d(1 - nu)
/// rows and T has d nu rows; either may be empty.
inline LinearSolution combined_solution(const Matrix& x, const Matrix& n, const Matrix& t, const Matrix& y,
                                        const SolverOptions& opts = {}) {
    detail::check_pair(x, y, "combined_solution");
    if (n.rows() > 0) {
        require_cols(x, n, "combined_solution");
        require_finite(n, "N");
    }
    if (t.rows() > 0) {
        require(t.cols() == x.rows(), ErrorCode::DimensionMismatch,
                "combined_solution: T has " + std::to_string(t.cols()) + " columns, X has " +
                    std::to_string(x.rows()) + " rows");
        require_finite(t, "T");
    }
    const Eigen::Index p = x.rows();
    Matrix ftf_minimal = Matrix::Identity(p, p);
    if (t.rows() > 0) ftf_minimal.noalias() += t.transpose() * t;
    Matrix gram = x.transpose() * ftf_minimal * x;
    if (n.rows() > 0) gram.noalias() += n.transpose() * n;
    const GramFactor g(gram);
    detail::check_condition(g.condition(), opts, "combined_solution");
    const Matrix tx = t.rows() > 0 ? Matrix(t * x) : Matrix(0, x.cols());
    const Matrix stacked = vstack({&x, &n, &tx});
    return {detail::gram_weights(g, y, stacked), Method::Combined, 0.0, g.condition()};
}

/// Ridge solution W = Y (X^T X + lambda I_n)^{-1} X^T.
inline LinearSolution tikhonov_solution(const Matrix& x, const Matrix& y, double lambda) {
    detail::check_pair(x, y, "tikhonov_solution");
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
            "tikhonov_solution needs lambda > 0, got " + std::to_string(lambda));
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    const GramFactor g(gram);
    return {detail::gram_weights(g, y, x), Method::Tikhonov, lambda, g.condition()};
}

inline Vector predict(const LinearSolution& w, const Vector& x) {
    require(x.size() == w.weights.cols(), ErrorCode::DimensionMismatch,
            "predict: input has " + std::to_string(x.size()) + " entries, weights expect " +
                std::to_string(w.weights.cols()));
    return w.weights * x;
}

/// Batch prediction over the columns of `inputs`.
inline Matrix predict(const LinearSolution& w, const Matrix& inputs) {
    require(inputs.rows() == w.weights.cols(), ErrorCode::DimensionMismatch,
            "predict: inputs have " + std::to_string(inputs.rows()) + " rows, weights expect " +
                std::to_string(w.weights.cols()));
    return w.weights * inputs;
}

/// lambda = d sigma^2.
inline double unrelated_lambda(Eigen::Index d, double sigma) {
    return static_cast<double>(d) * sigma * sigma;
}

/// lambda = p d (1 - nu) sigma^2 / (d nu + p).
inline double combined_lambda(Eigen::Index p, Eigen::Index d, double nu, double sigma) {
    const double pd = static_cast<double>(p);
    const double dd = static_cast<double>(d);
    return pd * dd * (1.0 - nu) * sigma * sigma / (dd * nu + pd);
}

/// Large-d prediction with d i.i.d. N(0, sigma^2) unrelated dimensions:
/// Y (X^T X + d sigma^2 I)^{-1} X^T x_ts.
inline Vector approx_prediction_unrelated(const Matrix& x, const Matrix& y, double sigma, Eigen::Index d,
                                          const Vector& x_ts) {
    require(d >= 1, ErrorCode::InvalidArgument, "approx_prediction_unrelated needs d >= 1");
    require(sigma > 0.0, ErrorCode::InvalidArgument, "approx_prediction_unrelated needs sigma > 0");
    require(x_ts.size() == x.rows(), ErrorCode::DimensionMismatch, "approx_prediction_unrelated: x_ts size");
    return predict(tikhonov_solution(x, y, unrelated_lambda(d, sigma)), x_ts);
}

/// Large-d prediction when a fraction nu of the d unnecessary dimensions are
/// k = d nu / p repeats of the minimal ones and the rest are N(0, sigma^2).
inline Vector approx_prediction_combined(const Matrix& x, const Matrix& y, double sigma, Eigen::Index d, double nu,
                                         const Vector& x_ts) {
    require(nu >= 0.0 && nu <= 1.0, ErrorCode::InvalidArgument, "approx_prediction_combined needs nu in [0, 1]");
    require(sigma > 0.0, ErrorCode::InvalidArgument, "approx_prediction_combined needs sigma > 0");
    require(d >= 0, ErrorCode::InvalidArgument, "approx_prediction_combined needs d >= 0");
    require(x_ts.size() == x.rows(), ErrorCode::DimensionMismatch, "approx_prediction_combined: x_ts size");
    const double k = static_cast<double>(d) * nu / static_cast<double>(x.rows());
    require(std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, k), ErrorCode::InvalidRepeatCount,
            "d * nu / p = " + std::to_string(k) + " is not an integer");
    const double lambda = combined_lambda(x.rows(), d, nu, sigma);
    if (lambda == 0.0) return predict(min_norm_pseudo_inverse(x, y), x_ts);
    return predict(tikhonov_solution(x, y, lambda), x_ts);
}

} // namespace dimlab::solvers

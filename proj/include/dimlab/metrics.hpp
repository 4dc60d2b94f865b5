#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dimlab/datagen.hpp"
#include "dimlab/solvers.hpp"

namespace dimlab::metrics {

using datagen::Dataset;

enum class Scale { Linear, Log10 };

constexpr std::string_view to_string(Scale s) { return s == Scale::Linear ? "linear" : "log10"; }

/// Test accuracy as a function of the number of training examples.
struct AccuracyCurve {
    struct Point {
        long n_tr = 0;
        double accuracy = 0.0;
    };
    std::vector<Point> points;
    Scale scale = Scale::Linear;

    void validate() const {
        require(points.size() >= 2, ErrorCode::InvalidArgument, "an accuracy curve needs at least 2 points");
        for (std::size_t i = 0; i < points.size(); ++i) {
            require(points[i].n_tr >= 1, ErrorCode::InvalidArgument, "n_tr must be >= 1");
            require(points[i].accuracy >= 0.0 && points[i].accuracy <= 1.0, ErrorCode::InvalidArgument,
                    "accuracy must lie in [0, 1]");
            if (i > 0)
                require(points[i].n_tr > points[i - 1].n_tr, ErrorCode::InvalidArgument,
                        "n_tr must be strictly increasing");
        }
    }
};

struct AutcValue {
    double value = 0.0;
    Scale scale = Scale::Linear;
    std::size_t n_points = 0;
};

/// Normalized area under the test curve: the trapezoidal integral of
/// accuracy over h(n_tr), divided by max h - min h. h is the identity for
/// Scale::Linear and log10 for Scale::Log10.
inline AutcValue autc(const AccuracyCurve& curve) {
    curve.validate();
    auto h = [&](long n) {
        return curve.scale == Scale::Log10 ? std::log10(static_cast<double>(n)) : static_cast<double>(n);
    };
    const double lo = h(curve.points.front().n_tr);
    const double hi = h(curve.points.back().n_tr);
    require(hi > lo, ErrorCode::DegenerateRange, "AUTC abscissa range is empty");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double dx = h(curve.points[i].n_tr) - h(curve.points[i - 1].n_tr);
        area += 0.5 * dx * (curve.points[i].accuracy + curve.points[i - 1].accuracy);
    }
    return {area / (hi - lo), curve.scale, curve.points.size()};
}

/// Fraction of columns whose argmax (lowest index on ties) equals the label.
inline double accuracy_from_outputs(const Matrix& outputs, std::span<const int> labels) {
    require(static_cast<std::size_t>(outputs.cols()) == labels.size(), ErrorCode::DimensionMismatch,
            "accuracy: output count differs from label count");
    require(!labels.empty(), ErrorCode::InvalidArgument, "accuracy: empty test set");
    std::size_t hits = 0;
    for (Eigen::Index j = 0; j < outputs.cols(); ++j)
        if (argmax(outputs.col(j)) == labels[static_cast<std::size_t>(j)]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

/// Anything that maps a batch of inputs (one sample per column) to a batch of
/// outputs and reports the input width it expects.
template <class P>
concept BatchPredictor = requires(const P& p, const Matrix& x) {
    { p.input_dim() } -> std::convertible_to<Eigen::Index>;
    { p.predict(x) } -> std::convertible_to<Matrix>;
};

template <BatchPredictor P>
double accuracy(const P& model, const Dataset& test) {
    require(test.labels.has_value(), ErrorCode::InvalidArgument, "accuracy needs a labelled test set");
    require(model.input_dim() == test.inputs.rows(), ErrorCode::DimensionMismatch,
            "accuracy: model expects " + std::to_string(model.input_dim()) + " inputs, test set has " +
                std::to_string(test.inputs.rows()));
    return accuracy_from_outputs(model.predict(test.inputs), *test.labels);
}

/// Adapter so a LinearSolution satisfies BatchPredictor.
struct LinearPredictor {
    const solvers::LinearSolution& solution;
    Eigen::Index input_dim() const { return solution.input_dim(); }
    Matrix predict(const Matrix& x) const { return solvers::predict(solution, x); }
};

inline double accuracy(const solvers::LinearSolution& w, const Dataset& test) {
    return accuracy(LinearPredictor{w}, test);
}

/// Mean over test samples of the squared L2 prediction error.
inline double mse_error(const solvers::LinearSolution& w, const Matrix& inputs, const Matrix& targets) {
    require_cols(inputs, targets, "mse_error");
    require(w.output_dim() == targets.rows(), ErrorCode::DimensionMismatch, "mse_error: output width");
    require(inputs.cols() >= 1, ErrorCode::InvalidArgument, "mse_error: empty test set");
    const Matrix residual = solvers::predict(w, inputs) - targets;
    return residual.colwise().squaredNorm().mean();
}

inline double mse_error(const solvers::LinearSolution& w, const Dataset& test) {
    return mse_error(w, test.inputs, test.targets);
}

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

/// Sample mean and (n - 1)-denominator standard deviation; 0 for one run.
inline Summary summarize(std::span<const double> runs) {
    require(!runs.empty(), ErrorCode::InvalidArgument, "summarize needs at least one run");
    double mean = 0.0;
    for (double r : runs) mean += r;
    mean /= static_cast<double>(runs.size());
    double ss = 0.0;
    for (double r : runs) ss += (r - mean) * (r - mean);
    const double sd = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
    return {mean, sd, runs.size()};
}

inline Summary summarize(std::span<const AutcValue> runs) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& a : runs) v.push_back(a.value);
    return summarize(std::span<const double>(v));
}

} // namespace dimlab::metrics

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dimlab/metrics.hpp"
#include "support.hpp"

using namespace dimlab;
using namespace dimlab::metrics;

namespace {

AccuracyCurve curve(std::vector<std::pair<long, double>> pts, Scale s) {
    AccuracyCurve c;
    c.scale = s;
    for (auto [n, a] : pts) c.points.push_back({n, a});
    return c;
}

Dataset labelled(const Matrix& inputs, std::vector<int> labels, int classes) {
    Dataset ds;
    ds.inputs = inputs;
    ds.targets = Matrix::Zero(classes, inputs.cols());
    for (std::size_t j = 0; j < labels.size(); ++j) ds.targets(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
    ds.labels = std::move(labels);
    ds.layout = {inputs.rows(), 0, 0};
    return ds;
}

// Trapezoid oracle written independently of the library.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) area += (x[i + 1] - x[i]) * (y[i] + y[i + 1]) / 2.0;
    return area / (x.back() - x.front());
}

} // namespace

TEST(Autc, HandExamples) {
    EXPECT_NEAR(autc(curve({{1, 1.0}, {10, 1.0}, {100, 1.0}}, Scale::Log10)).value, 1.0, 1e-12);
    EXPECT_NEAR(autc(curve({{1, 0.5}, {10, 0.5}, {100, 0.5}}, Scale::Linear)).value, 0.5, 1e-12);
    EXPECT_NEAR(autc(curve({{10, 0.5}, {100, 1.0}}, Scale::Log10)).value, 0.75, 1e-12);
    const auto v = autc(curve({{10, 0.5}, {100, 1.0}}, Scale::Log10));
    EXPECT_EQ(v.n_points, 2u);
    EXPECT_EQ(v.scale, Scale::Log10);
}

TEST(Autc, InvalidCurves) {
    EXPECT_THROW(autc(curve({{10, 0.5}}, Scale::Linear)), Error);
    EXPECT_THROW(autc(curve({{10, 0.5}, {10, 0.6}}, Scale::Linear)), Error);
    EXPECT_THROW(autc(curve({{10, 0.5}, {5, 0.6}}, Scale::Linear)), Error);
    EXPECT_THROW(autc(curve({{10, 1.5}, {20, 0.6}}, Scale::Linear)), Error);
}

TEST(Autc, RandomizedBoundsMonotonicityAndOracle) {
    std::mt19937 g(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(2, 8), step(1, 50);
    for (int t = 0; t < 1000; ++t) {
        const Scale s = t % 2 ? Scale::Log10 : Scale::Linear;
        AccuracyCurve c, hi;
        c.scale = hi.scale = s;
        long n = step(g);
        std::vector<double> xs, ys;
        for (int i = 0, m = len(g); i < m; ++i) {
            const double a = u(g);
            c.points.push_back({n, a});
            hi.points.push_back({n, a + (1.0 - a) * u(g)});
            xs.push_back(s == Scale::Log10 ? std::log10(static_cast<double>(n)) : static_cast<double>(n));
            ys.push_back(a);
            n += step(g);
        }
        const double v = autc(c).value;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_LT(v, 1.0 - 1e-12);
        EXPECT_GE(autc(hi).value, v - 1e-15);
        EXPECT_NEAR(v, trapezoid(xs, ys), 1e-12);
    }
}

TEST(Autc, LogSpacedEqualsIndexTrapezoid) {
    std::mt19937 g(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        AccuracyCurve log_curve;
        log_curve.scale = Scale::Log10;
        std::vector<double> idx, ys;
        for (int i = 0; i < 5; ++i) {
            const double a = u(g);
            log_curve.points.push_back({static_cast<long>(std::pow(10, i)), a});
            idx.push_back(i);
            ys.push_back(a);
        }
        EXPECT_NEAR(autc(log_curve).value, trapezoid(idx, ys), 1e-12);
    }
}

TEST(Accuracy, PerfectConstantFlippedAndPermuted) {
    std::mt19937 g(3);
    const Eigen::Index n = 10000;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < labels.size(); ++j) labels[j] = static_cast<int>(j % 2);
    std::shuffle(labels.begin(), labels.end(), g);
    Matrix onehot = Matrix::Zero(2, n);
    for (Eigen::Index j = 0; j < n; ++j) onehot(labels[j], j) = 1.0;
    EXPECT_EQ(accuracy_from_outputs(onehot, labels), 1.0);

    Matrix constant = Matrix::Zero(2, n);
    constant.row(1).setOnes();
    const double c = accuracy_from_outputs(constant, labels);
    EXPECT_GE(c, 0.48);
    EXPECT_LE(c, 0.52);

    const Matrix noisy = testing_support::randn(2, n, g);
    const double a = accuracy_from_outputs(noisy, labels);
    std::vector<int> flipped(labels);
    for (int& l : flipped) l = 1 - l;
    EXPECT_NEAR(accuracy_from_outputs(noisy, flipped), 1.0 - a, 1e-15);

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    Matrix pn(2, n);
    std::vector<int> pl(labels.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        pn.col(j) = noisy.col(perm[j]);
        pl[j] = labels[perm[j]];
    }
    EXPECT_EQ(accuracy_from_outputs(pn, pl), a);
}

TEST(Accuracy, TiesGoToLowestClass) {
    const Matrix out = Matrix::Zero(3, 4);
    EXPECT_EQ(accuracy_from_outputs(out, std::vector<int>{0, 0, 0, 0}), 1.0);
    EXPECT_EQ(accuracy_from_outputs(out, std::vector<int>{1, 2, 1, 2}), 0.0);
}

TEST(Accuracy, LinearSolutionAndWidthCheck) {
    std::mt19937 g(4);
    const Matrix x = testing_support::randn(3, 50, g);
    std::vector<int> labels(50);
    for (int j = 0; j < 50; ++j) labels[j] = x(0, j) > 0 ? 1 : 0;
    const auto ds = labelled(x, labels, 2);
    solvers::LinearSolution w{Matrix::Zero(2, 3)};
    w.weights(1, 0) = 1.0;
    w.weights(0, 0) = -1.0;
    EXPECT_EQ(accuracy(w, ds), 1.0);
    solvers::LinearSolution narrow{Matrix::Zero(2, 2)};
    EXPECT_THROW(accuracy(narrow, ds), Error);
}

TEST(Mse, LoopOracleZeroPredictorAndInterpolation) {
    std::mt19937 g(5);
    const Matrix x = testing_support::randn(4, 30, g), y = testing_support::randn(2, 30, g);
    solvers::LinearSolution w{testing_support::randn(2, 4, g)};
    double acc = 0.0;
    for (int j = 0; j < 30; ++j)
        for (int i = 0; i < 2; ++i) {
            double pred = 0.0;
            for (int k = 0; k < 4; ++k) pred += w.weights(i, k) * x(k, j);
            acc += (pred - y(i, j)) * (pred - y(i, j));
        }
    EXPECT_NEAR(mse_error(w, x, y), acc / 30.0, 1e-12);

    solvers::LinearSolution zero{Matrix::Zero(2, 4)};
    EXPECT_NEAR(mse_error(zero, x, y), y.colwise().squaredNorm().mean(), 1e-12);

    const Matrix xs = testing_support::randn(8, 5, g), ys = testing_support::randn(2, 5, g);
    EXPECT_LT(mse_error(solvers::min_norm_pseudo_inverse(xs, ys), xs, ys), 1e-12);
}

TEST(Summarize, HandExamples) {
    auto s = summarize(std::vector<double>{0.5, 0.5, 0.5});
    EXPECT_EQ(s.mean, 0.5);
    EXPECT_EQ(s.stddev, 0.0);
    s = summarize(std::vector<double>{0.0, 1.0});
    EXPECT_EQ(s.mean, 0.5);
    EXPECT_NEAR(s.stddev, std::sqrt(0.5), 1e-15);
    s = summarize(std::vector<double>{0.9});
    EXPECT_EQ(s.mean, 0.9);
    EXPECT_EQ(s.stddev, 0.0);
    EXPECT_EQ(s.count, 1u);
    EXPECT_THROW(summarize(std::vector<double>{}), Error);
    const std::vector<AutcValue> runs{{0.2}, {0.4}};
    EXPECT_NEAR(summarize(std::span<const AutcValue>(runs)).mean, 0.3, 1e-15);
}

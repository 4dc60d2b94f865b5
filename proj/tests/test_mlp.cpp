#include <gtest/gtest.h>

#include <sstream>

#include "dimlab/datagen.hpp"
#include "dimlab/metrics.hpp"
#include "dimlab/mlp.hpp"
#include "dimlab/mlp_io.hpp"
#include "support.hpp"

using namespace dimlab;
using namespace dimlab::mlp;
using testing_support::max_abs;
using testing_support::randn;

namespace {

MlpConfig small(Activation a, Loss l) { return {5, 7, 3, a, l}; }

Matrix targets_for(Loss l, Eigen::Index cols, std::mt19937& g) {
    if (l == Loss::Square) return randn(3, cols, g);
    Matrix y = Matrix::Zero(3, cols);
    for (Eigen::Index j = 0; j < cols; ++j) y(static_cast<Eigen::Index>(g() % 3), j) = 1.0;
    return y;
}

// Max relative error between analytic and central-difference gradients.
double fd_error(Mlp m, const Matrix& x, const Matrix& y) {
    const Gradients an = backward(m, x, y);
    const double eps = 1e-5;
    double worst = 0.0;
    auto check = [&](auto& param, const auto& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i) {
            const double keep = param.data()[i];
            param.data()[i] = keep + eps;
            const double up = loss(m, x, y);
            param.data()[i] = keep - eps;
            const double down = loss(m, x, y);
            param.data()[i] = keep;
            const double num = (up - down) / (2 * eps);
            const double a = grad.data()[i];
            const double denom = std::max({std::abs(a), std::abs(num), 1e-6});
            worst = std::max(worst, std::abs(a - num) / denom);
        }
    };
    check(m.w1, an.w1);
    check(m.b1, an.b1);
    check(m.w2, an.w2);
    check(m.b2, an.b2);
    return worst;
}

Mlp with_random_biases(Mlp m, std::mt19937& g) {
    m.b1 = randn(m.b1.size(), 1, g, 0.1).col(0);
    m.b2 = randn(m.b2.size(), 1, g, 0.1).col(0);
    return m;
}

} // namespace

TEST(Init, GlorotBoundsZeroBiasesAndDeterminism) {
    const auto m = init({30, 128, 2, Activation::ReLU, Loss::CrossEntropySoftmax}, 3);
    EXPECT_LE(m.w1.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 158.0));
    EXPECT_LE(m.w2.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 130.0));
    EXPECT_EQ(max_abs(m.b1), 0.0);
    EXPECT_EQ(max_abs(m.b2), 0.0);
    const auto again = init({30, 128, 2, Activation::ReLU, Loss::CrossEntropySoftmax}, 3);
    EXPECT_TRUE(m.w1 == again.w1 && m.w2 == again.w2);
    EXPECT_THROW(init({0, 4, 2}, 1), Error);

    const auto big = init({1000, 1000, 1000, Activation::Linear, Loss::Square}, 4);
    EXPECT_LT(std::abs(big.w1.mean()), 0.003);
}

TEST(Forward, SoftmaxProperties) {
    const auto m = init({4, 6, 3, Activation::ReLU, Loss::CrossEntropySoftmax}, 1);
    std::mt19937 g(1);
    for (int t = 0; t < 20; ++t) {
        const Vector out = m.forward(randn(4, 1, g, 5.0).col(0));
        EXPECT_NEAR(out.sum(), 1.0, 1e-9);
        EXPECT_GT(out.minCoeff(), 0.0);
    }
    const Matrix eq = softmax(Matrix::Constant(4, 1, 2.5));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(eq(i, 0), 0.25, 1e-15);
    const Matrix huge = softmax(Matrix::Constant(2, 1, 1e308));
    EXPECT_NEAR(huge(0, 0), 0.5, 1e-15);
}

TEST(Forward, LinearSquareLoopOracle) {
    std::mt19937 g(2);
    const auto m = with_random_biases(init({5, 7, 3, Activation::Linear, Loss::Square}, 2), g);
    const Vector x = randn(5, 1, g).col(0);
    const Vector out = m.forward(x);
    for (int o = 0; o < 3; ++o) {
        double acc = m.b2(o);
        for (int h = 0; h < 7; ++h) {
            double hid = m.b1(h);
            for (int i = 0; i < 5; ++i) hid += m.w1(h, i) * x(i);
            acc += m.w2(o, h) * hid;
        }
        EXPECT_NEAR(out(o), acc, 1e-12);
    }
}

TEST(Forward, DeadReluGivesSoftmaxOfBias) {
    auto m = init({3, 4, 2, Activation::ReLU, Loss::CrossEntropySoftmax}, 3);
    m.w1.setZero();
    m.b1.setConstant(-1.0);
    m.b2 << 0.3, -0.2;
    const Vector out = m.forward(Vector::Ones(3));
    const Matrix expect = softmax(Matrix(m.b2));
    EXPECT_NEAR(out(0), expect(0, 0), 1e-15);
    EXPECT_NEAR(out(1), expect(1, 0), 1e-15);
    EXPECT_THROW(m.forward(Vector::Ones(4)), Error);
}

TEST(Backward, FiniteDifferencesAllConfigurations) {
    for (auto a : {Activation::Linear, Activation::ReLU})
        for (auto l : {Loss::Square, Loss::CrossEntropySoftmax})
            for (int seed = 0; seed < 10; ++seed) {
                std::mt19937 g(static_cast<unsigned>(100 + seed));
                const auto m = with_random_biases(init(small(a, l), static_cast<std::uint64_t>(seed)), g);
                const Matrix x = randn(5, 4, g);
                EXPECT_LT(fd_error(m, x, targets_for(l, 4, g)), 1e-4)
                    << to_string(a) << "/" << to_string(l) << " seed " << seed;
            }
}

TEST(Backward, ZeroAtPerfectFitAndMeanReduction) {
    std::mt19937 g(5);
    const auto m = with_random_biases(init(small(Activation::Linear, Loss::Square), 5), g);
    const Matrix x = randn(5, 6, g);
    const Gradients at_fit = backward(m, x, m.predict(x));
    EXPECT_LT(std::sqrt(at_fit.w1.squaredNorm() + at_fit.b1.squaredNorm() + at_fit.w2.squaredNorm() +
                        at_fit.b2.squaredNorm()),
              1e-10);

    const Matrix y = targets_for(Loss::CrossEntropySoftmax, 6, g);
    const auto mx = init(small(Activation::ReLU, Loss::CrossEntropySoftmax), 6);
    Matrix x2(5, 12), y2(3, 12);
    x2 << x, x;
    y2 << y, y;
    const Gradients one = backward(mx, x, y), two = backward(mx, x2, y2);
    EXPECT_LT(max_abs(one.w1 - two.w1), 1e-14);
    EXPECT_LT(max_abs(one.w2 - two.w2), 1e-14);
    EXPECT_NEAR(one.loss, two.loss, 1e-14);
}

TEST(Backward, SmallStepsDescend) {
    std::mt19937 g(7);
    auto m = init(small(Activation::ReLU, Loss::CrossEntropySoftmax), 7);
    const Matrix x = randn(5, 16, g), y = targets_for(Loss::CrossEntropySoftmax, 16, g);
    double prev = loss(m, x, y);
    for (int s = 0; s < 10; ++s) {
        const Gradients gr = backward(m, x, y);
        m.w1 -= 1e-4 * gr.w1;
        m.b1 -= 1e-4 * gr.b1;
        m.w2 -= 1e-4 * gr.w2;
        m.b2 -= 1e-4 * gr.b2;
        const double cur = loss(m, x, y);
        EXPECT_LE(cur, prev);
        prev = cur;
    }
}

TEST(Train, PatienceWithConstantValidationLoss) {
    std::mt19937 g(8);
    const auto m = init(small(Activation::ReLU, Loss::CrossEntropySoftmax), 8);
    const Matrix x = randn(5, 10, g), y = targets_for(Loss::CrossEntropySoftmax, 10, g);
    TrainConfig tc;
    const auto out = train(m, x, y, x, y, tc, {0.0, 2});
    EXPECT_EQ(out.best_epoch, 0);
    EXPECT_EQ(static_cast<int>(out.history.size()), tc.patience);
    EXPECT_TRUE(out.model.w1 == m.w1);
}

TEST(Train, BestWeightsRestoredAndHistoryBounded) {
    std::mt19937 g(9);
    const auto m = init(small(Activation::ReLU, Loss::CrossEntropySoftmax), 9);
    const Matrix x = randn(5, 40, g), y = targets_for(Loss::CrossEntropySoftmax, 40, g);
    const Matrix xv = randn(5, 40, g), yv = targets_for(Loss::CrossEntropySoftmax, 40, g);
    TrainConfig tc;
    tc.max_epochs = 30;
    const auto out = train(m, x, y, xv, yv, tc, {0.05, 4});
    EXPECT_LE(static_cast<int>(out.history.size()), tc.max_epochs);
    EXPECT_NEAR(loss(out.model, xv, yv), out.best_val_loss, 1e-12);
    for (const auto& h : out.history) EXPECT_GE(h.val_loss, out.best_val_loss - 1e-12);
    const auto again = train(m, x, y, xv, yv, tc, {0.05, 4});
    ASSERT_EQ(again.history.size(), out.history.size());
    for (std::size_t i = 0; i < out.history.size(); ++i) EXPECT_EQ(again.history[i].val_loss, out.history[i].val_loss);
}

TEST(Train, LinSepReachesHighAccuracy) {
    const auto teacher = datagen::make_teacher(30, 2, 1);
    const auto tr = datagen::sample_linsep(teacher, 300, 2);
    const auto val = datagen::sample_linsep(teacher, 300, 3);
    const auto te = datagen::sample_linsep(teacher, 2000, 4);
    TrainConfig tc;
    tc.lr_grid = {1e-2};
    tc.batch_grid = {10};
    const auto relu = grid_search(tr, val, {30, 128, 2, Activation::ReLU, Loss::CrossEntropySoftmax}, tc);
    const auto lin = grid_search(tr, val, {30, 128, 2, Activation::Linear, Loss::CrossEntropySoftmax}, tc);
    // Baseline over three teachers: relu 0.918-0.922, linear 0.940-0.958,
    // pseudo-inverse 0.913-0.931 on the same split.
    EXPECT_GT(metrics::accuracy(relu.model, te), 0.9);
    EXPECT_GT(metrics::accuracy(lin.model, te), 0.93);
    EXPECT_GT(metrics::accuracy(lin.model, te), metrics::accuracy(solvers::moore_penrose_solution(tr.inputs, tr.targets), te));
}

TEST(GridSearch, SingletonEqualsTrainAndFiltering) {
    const auto teacher = datagen::make_teacher(6, 2, 1);
    const auto tr = datagen::sample_linsep(teacher, 20, 2);
    const auto val = datagen::sample_linsep(teacher, 20, 3);
    const MlpConfig mc{6, 8, 2, Activation::ReLU, Loss::CrossEntropySoftmax};
    TrainConfig tc;
    tc.lr_grid = {1e-2};
    tc.batch_grid = {5};
    tc.seed = 11;
    const auto gs = grid_search(tr, val, mc, tc);
    const auto direct = train(init(mc, 11), tr, val, tc, {1e-2, 5});
    EXPECT_TRUE(gs.model.w1 == direct.model.w1);
    EXPECT_EQ(gs.chosen.lr, 1e-2);
    EXPECT_EQ(gs.chosen.batch, 5);

    EXPECT_EQ(usable_batches({2, 10, 32, 50}, 20), (std::vector<Eigen::Index>{2, 10}));
    const auto two = datagen::sample_linsep(teacher, 2, 4);
    try {
        grid_search(two, two, mc, TrainConfig{});
        FAIL() << "expected EmptyGrid";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
    }
}

TEST(GridSearch, ReproduciblePerSeed) {
    const auto teacher = datagen::make_teacher(6, 2, 1);
    const auto tr = datagen::sample_linsep(teacher, 30, 2);
    const auto val = datagen::sample_linsep(teacher, 30, 3);
    const MlpConfig mc{6, 8, 2, Activation::Linear, Loss::Square};
    TrainConfig tc;
    tc.max_epochs = 20;
    const auto a = grid_search(tr, val, mc, tc);
    const auto b = grid_search(tr, val, mc, tc);
    EXPECT_EQ(a.chosen.lr, b.chosen.lr);
    EXPECT_EQ(a.chosen.batch, b.chosen.batch);
    EXPECT_TRUE(a.model.w2 == b.model.w2);
}

TEST(Checkpoint, RoundTripAndHistoryCsv) {
    std::mt19937 g(12);
    const auto m = with_random_biases(init(small(Activation::ReLU, Loss::Square), 12), g);
    std::stringstream ss;
    save_checkpoint(m, ss);
    const auto back = load_checkpoint(ss);
    EXPECT_EQ(back.config.activation, Activation::ReLU);
    EXPECT_EQ(back.config.loss, Loss::Square);
    EXPECT_TRUE(back.w1 == m.w1 && back.b1 == m.b1 && back.w2 == m.w2 && back.b2 == m.b2);
    std::stringstream bad("DIMLABXX");
    EXPECT_THROW(load_checkpoint(bad), Error);

    std::ostringstream hist;
    write_history_csv({{1, 0.5, 0.25, 0.01}}, hist);
    EXPECT_EQ(hist.str(), "epoch,train_loss,val_loss,lr\n1,0.5,0.25,0.01\n");
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "dimlab/datagen.hpp"
#include "dimlab/linalg.hpp"
#include "dimlab/rng.hpp"

/// One-hidden-layer perceptron trained with minibatch SGD.
namespace dimlab::mlp {

enum class Activation { Linear, ReLU };
enum class Loss { Square, CrossEntropySoftmax };

constexpr std::string_view to_string(Activation a) { return a == Activation::Linear ? "linear" : "relu"; }
constexpr std::string_view to_string(Loss l) { return l == Loss::Square ? "square" : "xent"; }

struct MlpConfig {
    Eigen::Index input_dim = 1;
    Eigen::Index hidden_dim = 128;
    Eigen::Index output_dim = 2;
    Activation activation = Activation::ReLU;
    /// Square pairs with a linear output layer; CrossEntropySoftmax with a
    /// softmax output. There is no square-loss-on-softmax combination.
    Loss loss = Loss::CrossEntropySoftmax;

    void validate() const {
        require(input_dim >= 1 && hidden_dim >= 1 && output_dim >= 1, ErrorCode::InvalidDim,
                "MLP dimensions must be >= 1");
    }
};

/// u = sqrt(6 / (fan_in + fan_out)).
inline double glorot_bound(Eigen::Index fan_in, Eigen::Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

class Mlp {
public:
    MlpConfig config;
    Matrix w1; // hidden x input
    Vector b1;
    Matrix w2; // output x hidden
    Vector b2;

    Eigen::Index input_dim() const { return config.input_dim; }

    /// Hidden pre-activations for a batch.
    Matrix hidden_pre(const Matrix& x) const {
        require(x.rows() == config.input_dim, ErrorCode::DimensionMismatch,
                "MLP expects " + std::to_string(config.input_dim) + " inputs, got " + std::to_string(x.rows()));
        Matrix z = w1 * x;
        z.colwise() += b1;
        return z;
    }

    Matrix activate(const Matrix& z) const {
        return config.activation == Activation::ReLU ? Matrix(z.cwiseMax(0.0)) : z;
    }

    /// Output-layer logits (raw outputs for square loss).
    Matrix logits(const Matrix& x) const {
        Matrix z = w2 * activate(hidden_pre(x));
        z.colwise() += b2;
        return z;
    }

    /// Probabilities for cross-entropy models, raw outputs otherwise.
    Matrix predict(const Matrix& x) const;

    Vector forward(const Vector& x) const { return predict(Matrix(x)).col(0); }
};

/// Column-wise softmax with max shift.
inline Matrix softmax(const Matrix& z) {
    Matrix out(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double m = z.col(j).maxCoeff();
        out.col(j) = (z.col(j).array() - m).exp().matrix();
        out.col(j) /= out.col(j).sum();
    }
    return out;
}

inline Matrix Mlp::predict(const Matrix& x) const {
    Matrix z = logits(x);
    return config.loss == Loss::CrossEntropySoftmax ? softmax(z) : z;
}

/// Glorot-uniform weights, zero biases.
inline Mlp init(const MlpConfig& config, std::uint64_t seed) {
    config.validate();
    Engine eng = make_stream(seed, "glorot");
    auto uniform_layer = [&eng](Eigen::Index rows, Eigen::Index cols, double bound) {
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = dist(eng);
        return w;
    };
    Mlp m;
    m.config = config;
    m.w1 = uniform_layer(config.hidden_dim, config.input_dim, glorot_bound(config.input_dim, config.hidden_dim));
    m.b1 = Vector::Zero(config.hidden_dim);
    m.w2 = uniform_layer(config.output_dim, config.hidden_dim, glorot_bound(config.hidden_dim, config.output_dim));
    m.b2 = Vector::Zero(config.output_dim);
    return m;
}

/// Mean over the batch of the per-sample loss: sum_k (out_k - y_k)^2 for
/// Square, -sum_k y_k log softmax_k for CrossEntropySoftmax.
inline double loss(const Mlp& m, const Matrix& x, const Matrix& y) {
    require_cols(x, y, "loss");
    require(y.rows() == m.config.output_dim, ErrorCode::DimensionMismatch, "loss: target width");
    require(x.cols() >= 1, ErrorCode::InvalidArgument, "loss: empty batch");
    const Matrix z = m.logits(x);
    double total = 0.0;
    if (m.config.loss == Loss::Square) {
        total = (z - y).squaredNorm();
    } else {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            const double mx = z.col(j).maxCoeff();
            const double lse = mx + std::log((z.col(j).array() - mx).exp().sum());
            total -= (y.col(j).array() * (z.col(j).array() - lse)).sum();
        }
    }
    return total / static_cast<double>(x.cols());
}

struct Gradients {
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
    double loss = 0.0;
};

/// Exact gradients of `loss` with respect to every parameter.
inline Gradients backward(const Mlp& m, const Matrix& x, const Matrix& y) {
    require_cols(x, y, "backward");
    require(y.rows() == m.config.output_dim, ErrorCode::DimensionMismatch, "backward: target width");
    require(x.cols() >= 1, ErrorCode::InvalidArgument, "backward: empty batch");
    const double inv_b = 1.0 / static_cast<double>(x.cols());
    const Matrix z1 = m.hidden_pre(x);
    const Matrix h = m.activate(z1);
    Matrix z2 = m.w2 * h;
    z2.colwise() += m.b2;

    Gradients g;
    Matrix dz2;
    if (m.config.loss == Loss::Square) {
        dz2 = 2.0 * inv_b * (z2 - y);
        g.loss = (z2 - y).squaredNorm() * inv_b;
    } else {
        const Matrix p = softmax(z2);
        // d/dz of -sum_k y_k log p_k is p * sum(y) - y.
        dz2 = inv_b * (p * y.colwise().sum().asDiagonal() - y);
        double total = 0.0;
        for (Eigen::Index j = 0; j < z2.cols(); ++j) {
            const double mx = z2.col(j).maxCoeff();
            const double lse = mx + std::log((z2.col(j).array() - mx).exp().sum());
            total -= (y.col(j).array() * (z2.col(j).array() - lse)).sum();
        }
        g.loss = total * inv_b;
    }
    g.w2 = dz2 * h.transpose();
    g.b2 = dz2.rowwise().sum();
    Matrix dz1 = m.w2.transpose() * dz2;
    if (m.config.activation == Activation::ReLU) dz1 = dz1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
    g.w1 = dz1 * x.transpose();
    g.b1 = dz1.rowwise().sum();
    return g;
}

struct TrainConfig {
    int max_epochs = 100;
    int patience = 8;
    double tolerance = 1e-4;
    std::vector<double> lr_grid{1e-5, 1e-4, 1e-3, 1e-2};
    std::vector<Eigen::Index> batch_grid{2, 10, 32, 50};
    double lr_decay_factor = 0.1;
    int lr_plateau_window = 5;
    double lr_plateau_tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct Hyperparams {
    double lr = 1e-3;
    Eigen::Index batch = 10;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
};

struct TrainedMlp {
    Mlp model;
    std::vector<EpochRecord> history;
    Hyperparams chosen;
    int best_epoch = 0; // 0 means the initial weights were never improved on
    double best_val_loss = std::numeric_limits<double>::infinity();
};

/// Minibatch SGD (no momentum) with early stopping and plateau learning-rate
/// decay. The initial weights count as epoch 0. Training stops after
/// `patience` consecutive epochs without a validation improvement larger than
/// `tolerance`, or at max_epochs, and the best-validation weights are
/// returned. Whenever the validation loss moves by less than
/// lr_plateau_tolerance across the last lr_plateau_window epochs, the
/// learning rate is multiplied by lr_decay_factor.
inline TrainedMlp train(const Mlp& start, const Matrix& x_train, const Matrix& y_train, const Matrix& x_val,
                        const Matrix& y_val, const TrainConfig& tc, Hyperparams hp) {
    require_cols(x_train, y_train, "train");
    require_cols(x_val, y_val, "train (validation)");
    require(x_val.cols() >= 1, ErrorCode::InvalidArgument, "train needs a non-empty validation set");
    require(x_train.cols() >= 1, ErrorCode::InvalidArgument, "train needs a non-empty training set");
    require(hp.batch >= 1, ErrorCode::InvalidArgument, "batch size must be >= 1");
    require(hp.lr >= 0.0, ErrorCode::InvalidArgument, "learning rate must be >= 0");

    TrainedMlp out;
    out.chosen = hp;
    out.model = start;
    out.best_val_loss = loss(start, x_val, y_val);

    Mlp cur = start;
    double lr = hp.lr;
    int wait = 0;
    int since_decay = 0;
    Engine shuffle_eng = make_stream(tc.seed, "shuffle");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x_train.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Eigen::Index n = x_train.cols();
    const Eigen::Index batch = std::min(hp.batch, n);
    Matrix xb(x_train.rows(), batch);
    Matrix yb(y_train.rows(), batch);

    for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_eng);
        for (Eigen::Index start_idx = 0; start_idx < n; start_idx += batch) {
            const Eigen::Index len = std::min(batch, n - start_idx);
            xb.resize(Eigen::NoChange, len);
            yb.resize(Eigen::NoChange, len);
            for (Eigen::Index j = 0; j < len; ++j) {
                const Eigen::Index src = order[static_cast<std::size_t>(start_idx + j)];
                xb.col(j) = x_train.col(src);
                yb.col(j) = y_train.col(src);
            }
            const Gradients g = backward(cur, xb, yb);
            cur.w1.noalias() -= lr * g.w1;
            cur.b1.noalias() -= lr * g.b1;
            cur.w2.noalias() -= lr * g.w2;
            cur.b2.noalias() -= lr * g.b2;
        }
        const double train_loss = loss(cur, x_train, y_train);
        const double val_loss = loss(cur, x_val, y_val);
        out.history.push_back({epoch, train_loss, val_loss, lr});
        if (!std::isfinite(val_loss)) break;

        if (val_loss < out.best_val_loss - tc.tolerance) {
            out.best_val_loss = val_loss;
            out.best_epoch = epoch;
            out.model = cur;
            wait = 0;
        } else if (++wait >= tc.patience) {
            break;
        }

        if (++since_decay >= tc.lr_plateau_window) {
            const auto window_begin = out.history.end() - tc.lr_plateau_window;
            auto [lo, hi] = std::minmax_element(window_begin, out.history.end(), [](const auto& a, const auto& b) {
                return a.val_loss < b.val_loss;
            });
            if (hi->val_loss - lo->val_loss < tc.lr_plateau_tolerance) {
                lr *= tc.lr_decay_factor;
                since_decay = 0;
            }
        }
    }
    return out;
}

/// Training targets for a dataset: the one-hot (or regression) targets.
inline TrainedMlp train(const Mlp& start, const datagen::Dataset& train_set, const datagen::Dataset& val_set,
                        const TrainConfig& tc, Hyperparams hp) {
    return train(start, train_set.inputs, train_set.targets, val_set.inputs, val_set.targets, tc, hp);
}

/// Batch sizes >= the number of training examples are dropped.
inline std::vector<Eigen::Index> usable_batches(const std::vector<Eigen::Index>& grid, Eigen::Index n_train) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index b : grid)
        if (b < n_train) out.push_back(b);
    return out;
}

/// Trains one model per (lr, batch) cell from the same initial weights and
/// keeps the one with the lowest best-validation loss. Ties go to the smaller
/// learning rate, then the smaller batch.
inline TrainedMlp grid_search(const datagen::Dataset& train_set, const datagen::Dataset& val_set,
                              const MlpConfig& mc, const TrainConfig& tc) {
    require(!tc.lr_grid.empty(), ErrorCode::EmptyGrid, "learning-rate grid is empty");
    std::vector<Eigen::Index> batches = usable_batches(tc.batch_grid, train_set.n());
    require(!batches.empty(), ErrorCode::EmptyGrid,
            "no batch size below n_train = " + std::to_string(train_set.n()));
    std::vector<double> lrs = tc.lr_grid;
    std::sort(lrs.begin(), lrs.end());
    std::sort(batches.begin(), batches.end());

    const Mlp start = init(mc, tc.seed);
    TrainedMlp best;
    bool have = false;
    for (double lr : lrs) {
        for (Eigen::Index b : batches) {
            TrainedMlp cand = train(start, train_set, val_set, tc, {lr, b});
            if (!have || cand.best_val_loss < best.best_val_loss) {
                best = std::move(cand);
                have = true;
            }
        }
    }
    return best;
}

} // namespace dimlab::mlp

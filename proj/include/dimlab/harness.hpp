#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "dimlab/datagen.hpp"
#include "dimlab/dataset_io.hpp"
#include "dimlab/metrics.hpp"
#include "dimlab/mlp.hpp"
#include "dimlab/solvers.hpp"

namespace dimlab::harness {

using datagen::Dataset;
using datagen::Family;
using datagen::NoiseSpec;
using metrics::AutcValue;
using metrics::Scale;
using metrics::Summary;

enum class ModelKind { PseudoInverse, Tikhonov, MlpLinearSquare, MlpLinearXent, MlpReluXent };
enum class RelatedFrame { Repeat, Gaussian };

constexpr std::string_view to_string(ModelKind m) {
    switch (m) {
    case ModelKind::PseudoInverse: return "pseudo_inverse";
    case ModelKind::Tikhonov: return "tikhonov";
    case ModelKind::MlpLinearSquare: return "mlp_linear_square";
    case ModelKind::MlpLinearXent: return "mlp_linear_xent";
    case ModelKind::MlpReluXent: return "mlp_relu_xent";
    }
    return "unknown";
}

constexpr bool is_mlp(ModelKind m) {
    return m == ModelKind::MlpLinearSquare || m == ModelKind::MlpLinearXent || m == ModelKind::MlpReluXent;
}

/// d unnecessary dimensions, a fraction nu of them task-related.
struct DimCell {
    Eigen::Index d = 0;
    double nu = 0.0;

    Eigen::Index related() const { return static_cast<Eigen::Index>(std::llround(static_cast<double>(d) * nu)); }
    Eigen::Index unrelated() const { return d - related(); }
    bool operator==(const DimCell&) const = default;
};

struct ExperimentConfig {
    std::string name = "sweep";
    Family family = Family::LinSepTeacher;
    Eigen::Index p = 30;
    Eigen::Index o = 2;          // linsep output dimension
    double mean_scale = 4.0;     // mixture component separation
    NoiseSpec::Kind noise = NoiseSpec::GaussianIID{0.1};
    RelatedFrame related_frame = RelatedFrame::Repeat;
    std::vector<DimCell> dim_grid{{0, 0.0}};
    std::vector<Eigen::Index> ntr_grid{10, 100};
    Eigen::Index test_size = 10000;
    int repetitions = 10;
    ModelKind model = ModelKind::PseudoInverse;
    double lambda = 1.0;             // Tikhonov only
    Eigen::Index hidden_dim = 128;   // MLP only
    mlp::TrainConfig train;          // MLP only; its seed is derived per cell
    std::uint64_t seed = 0;

    Eigen::Index classes() const { return family == Family::GaussianMixture ? 2 : o; }

    void validate() const {
        require(datagen::is_classification(family), ErrorCode::Config, "sweeps need a classification family");
        require(p >= 1, ErrorCode::Config, "p must be >= 1");
        require(family != Family::LinSepTeacher || o >= 2, ErrorCode::Config, "o must be >= 2");
        require(family != Family::GaussianMixture || p >= 3, ErrorCode::Config, "mixture needs p >= 3");
        require(!dim_grid.empty(), ErrorCode::Config, "dim_grid is empty");
        for (const auto& c : dim_grid) {
            require(c.d >= 0, ErrorCode::Config, "d must be >= 0");
            require(c.nu >= 0.0 && c.nu <= 1.0, ErrorCode::Config, "nu must lie in [0, 1]");
            if (related_frame == RelatedFrame::Repeat)
                require(c.related() % p == 0, ErrorCode::Config,
                        "repeat frames need d * nu to be a multiple of p (d = " + std::to_string(c.d) + ")");
        }
        require(ntr_grid.size() >= 2, ErrorCode::Config, "ntr_grid needs at least 2 values for an AUTC");
        for (std::size_t i = 0; i < ntr_grid.size(); ++i) {
            require(ntr_grid[i] >= 1, ErrorCode::Config, "ntr_grid values must be >= 1");
            if (i > 0) require(ntr_grid[i] > ntr_grid[i - 1], ErrorCode::Config, "ntr_grid must be strictly increasing");
        }
        require(test_size >= 1, ErrorCode::Config, "test_size must be >= 1");
        require(repetitions >= 1, ErrorCode::Config, "repetitions must be >= 1");
        require(model != ModelKind::Tikhonov || lambda > 0.0, ErrorCode::Config, "tikhonov lambda must be > 0");
        require(hidden_dim >= 1, ErrorCode::Config, "hidden_dim must be >= 1");
        NoiseSpec{noise, 1}.validate();
    }

    /// n_tr axis scale: log10 once the grid spans at least two decades.
    Scale autc_scale() const {
        return ntr_grid.back() >= 100 * ntr_grid.front() ? Scale::Log10 : Scale::Linear;
    }
};

struct CellRecord {
    Eigen::Index d = 0;
    double nu = 0.0;
    Eigen::Index n_tr = 0;
    int repetition = 0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string status;
};

struct AutcRecord {
    Eigen::Index d = 0;
    double nu = 0.0;
    int repetition = 0;
    std::optional<AutcValue> autc; // empty when any n_tr cell failed
};

struct Aggregate {
    Eigen::Index d = 0;
    double nu = 0.0;
    double autc_mean = std::numeric_limits<double>::quiet_NaN();
    double autc_std = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_ok = 0;
};

struct SweepResult {
    Scale scale = Scale::Linear;
    /// Ordered by (dim_grid position, n_tr, repetition).
    std::vector<CellRecord> cells;
    /// Ordered by (dim_grid position, repetition).
    std::vector<AutcRecord> autc_per_cell;
    /// One entry per dim_grid cell, in dim_grid order.
    std::vector<Aggregate> aggregates;

    const CellRecord* find(Eigen::Index d, double nu, Eigen::Index n_tr, int rep) const {
        for (const auto& c : cells)
            if (c.d == d && c.nu == nu && c.n_tr == n_tr && c.repetition == rep) return &c;
        return nullptr;
    }

    const Aggregate* find(Eigen::Index d, double nu) const {
        for (const auto& a : aggregates)
            if (a.d == d && a.nu == nu) return &a;
        return nullptr;
    }

    std::size_t failed_cells() const {
        return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.ok; }));
    }
};

/// Seed of repetition `rep`; independent of the repetition count so adding
/// repetitions never changes existing cells.
inline std::uint64_t repetition_seed(std::uint64_t seed, int rep) {
    return derive_seed(seed, "repetition", static_cast<std::uint64_t>(rep));
}

/// Samples shared by every dim cell of one repetition, laid out as
/// [train pool | validation pool | test set] along the columns.
struct BasePool {
    Dataset data;
    Eigen::Index train_size = 0;
    Eigen::Index val_size = 0;
    Eigen::Index test_size = 0;
};

inline BasePool make_base_pool(const ExperimentConfig& cfg, int rep) {
    const std::uint64_t rs = repetition_seed(cfg.seed, rep);
    BasePool pool;
    pool.train_size = cfg.ntr_grid.back();
    pool.val_size = is_mlp(cfg.model) ? cfg.ntr_grid.back() : 0;
    pool.test_size = cfg.test_size;
    const Eigen::Index total = pool.train_size + pool.val_size + pool.test_size;
    if (cfg.family == Family::LinSepTeacher) {
        const auto teacher = datagen::make_teacher(cfg.p, cfg.o, derive_seed(rs, "teacher"));
        pool.data = datagen::sample_linsep(teacher, total, derive_seed(rs, "pool"));
    } else {
        const auto spec = datagen::MixtureSpec::defaults(cfg.p, cfg.mean_scale);
        const Eigen::Index per_class = (total + spec.class_count - 1) / spec.class_count;
        pool.data = datagen::sample_mixture(spec, per_class, derive_seed(rs, "pool")).slice(0, total);
    }
    return pool;
}

/// The base pool with the unrelated and related blocks of `cell` appended.
inline Dataset augment(const ExperimentConfig& cfg, const BasePool& pool, const DimCell& cell, int rep) {
    const std::uint64_t rs = repetition_seed(cfg.seed, rep);
    Dataset ds = datagen::append_unrelated(pool.data, NoiseSpec{cfg.noise, cell.unrelated()}, derive_seed(rs, "unrelated"));
    const Eigen::Index dr = cell.related();
    if (dr > 0) {
        const auto frame = cfg.related_frame == RelatedFrame::Repeat
                               ? solvers::FrameSpec::repeat(cfg.p, static_cast<int>(dr / cfg.p))
                               : solvers::FrameSpec::gaussian(cfg.p, dr, derive_seed(rs, "frame"));
        ds = datagen::append_related(ds, frame);
    }
    return ds;
}

/// Fits the configured model on `train` and returns its test accuracy.
inline double fit_and_score(const ExperimentConfig& cfg, const Dataset& train, const Dataset& val, const Dataset& test,
                            std::uint64_t cell_seed) {
    switch (cfg.model) {
    case ModelKind::PseudoInverse:
        return metrics::accuracy(solvers::moore_penrose_solution(train.inputs, train.targets), test);
    case ModelKind::Tikhonov:
        return metrics::accuracy(solvers::tikhonov_solution(train.inputs, train.targets, cfg.lambda), test);
    default: break;
    }
    mlp::MlpConfig mc;
    mc.input_dim = train.inputs.rows();
    mc.hidden_dim = cfg.hidden_dim;
    mc.output_dim = cfg.classes();
    mc.activation = cfg.model == ModelKind::MlpReluXent ? mlp::Activation::ReLU : mlp::Activation::Linear;
    mc.loss = cfg.model == ModelKind::MlpLinearSquare ? mlp::Loss::Square : mlp::Loss::CrossEntropySoftmax;
    mlp::TrainConfig tc = cfg.train;
    tc.seed = cell_seed;
    const auto trained = mlp::grid_search(train, val, mc, tc);
    return metrics::accuracy(trained.model, test);
}

namespace detail {

struct TaskOutput {
    std::vector<CellRecord> cells; // one per n_tr
    AutcRecord autc;
};

inline std::string failure_status(const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return "failed: " + msg;
}

inline TaskOutput run_task(const ExperimentConfig& cfg, std::size_t dim_index, int rep) {
    const DimCell cell = cfg.dim_grid[dim_index];
    TaskOutput out;
    out.autc = {cell.d, cell.nu, rep, std::nullopt};
    for (Eigen::Index n_tr : cfg.ntr_grid) out.cells.push_back({cell.d, cell.nu, n_tr, rep, std::numeric_limits<double>::quiet_NaN(), false, {}});

    std::optional<Dataset> data;
    BasePool pool;
    try {
        pool = make_base_pool(cfg, rep);
        data = augment(cfg, pool, cell, rep);
    } catch (const std::exception& e) {
        for (auto& c : out.cells) c.status = failure_status(e);
        return out;
    }
    const std::uint64_t rs = repetition_seed(cfg.seed, rep);
    const Dataset test = data->slice(pool.train_size + pool.val_size, pool.test_size);
    metrics::AccuracyCurve curve;
    curve.scale = cfg.autc_scale();
    bool all_ok = true;
    for (auto& c : out.cells) {
        try {
            const Dataset train = data->slice(0, c.n_tr);
            const Dataset val = pool.val_size > 0 ? data->slice(pool.train_size, c.n_tr) : Dataset{};
            const std::uint64_t cell_seed = derive_seed(
                derive_seed(rs, "model"), std::to_string(cell.d) + "/" + datagen::format_real(cell.nu) + "/" +
                                              std::to_string(c.n_tr));
            c.accuracy = fit_and_score(cfg, train, val, test, cell_seed);
            c.ok = true;
            c.status = "ok";
            curve.points.push_back({static_cast<long>(c.n_tr), c.accuracy});
        } catch (const std::exception& e) {
            c.status = failure_status(e);
            all_ok = false;
        }
    }
    if (all_ok) out.autc.autc = metrics::autc(curve);
    return out;
}

/// Runs task(i) for i in [0, count) on up to `jobs` threads.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    for (auto& t : workers) t.join();
}

} // namespace detail

/// Runs every (dim cell, repetition) task on a bounded worker pool. Each task
/// owns its seeds, so results do not depend on `jobs` or scheduling.
inline SweepResult run_sweep(const ExperimentConfig& cfg, unsigned jobs = 1) {
    cfg.validate();
    const std::size_t dims = cfg.dim_grid.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);
    std::vector<detail::TaskOutput> outputs(dims * reps);
    detail::parallel_for(outputs.size(), jobs, [&](std::size_t i) {
        outputs[i] = detail::run_task(cfg, i / reps, static_cast<int>(i % reps));
    });

    SweepResult result;
    result.scale = cfg.autc_scale();
    for (std::size_t di = 0; di < dims; ++di) {
        for (std::size_t ni = 0; ni < cfg.ntr_grid.size(); ++ni)
            for (std::size_t r = 0; r < reps; ++r) result.cells.push_back(outputs[di * reps + r].cells[ni]);
        std::vector<double> ok_values;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& rec = outputs[di * reps + r].autc;
            result.autc_per_cell.push_back(rec);
            if (rec.autc) ok_values.push_back(rec.autc->value);
        }
        Aggregate agg{cfg.dim_grid[di].d, cfg.dim_grid[di].nu};
        agg.n_ok = ok_values.size();
        if (!ok_values.empty()) {
            const Summary s = metrics::summarize(std::span<const double>(ok_values));
            agg.autc_mean = s.mean;
            agg.autc_std = s.stddev;
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

/// Columns: family,d,nu,n_tr,repetition,accuracy,autc,status. The autc
/// column repeats the (d, nu, repetition) AUTC on each of its rows.
inline void write_results_csv(const ExperimentConfig& cfg, const SweepResult& r, std::ostream& os) {
    using datagen::format_real;
    os << "family,d,nu,n_tr,repetition,accuracy,autc,status\n";
    for (const auto& c : r.cells) {
        std::string autc = "nan";
        for (const auto& a : r.autc_per_cell)
            if (a.d == c.d && a.nu == c.nu && a.repetition == c.repetition && a.autc) autc = format_real(a.autc->value);
        os << datagen::to_string(cfg.family) << "," << c.d << "," << format_real(c.nu) << "," << c.n_tr << ","
           << c.repetition << "," << (c.ok ? format_real(c.accuracy) : std::string("nan")) << "," << autc << ","
           << c.status << "\n";
    }
}

/// Columns: d,nu,autc_mean,autc_std,n_ok.
inline void write_aggregate_csv(const SweepResult& r, std::ostream& os) {
    using datagen::format_real;
    os << "d,nu,autc_mean,autc_std,n_ok\n";
    for (const auto& a : r.aggregates)
        os << a.d << "," << format_real(a.nu) << "," << (a.n_ok ? format_real(a.autc_mean) : "nan") << ","
           << (a.n_ok ? format_real(a.autc_std) : "nan") << "," << a.n_ok << "\n";
}

// ---------------------------------------------------------------------------
// Large-d approximation study

/// FixedSigma keeps the noise scale constant as d grows. FixedLambda shrinks
/// it so that d sigma_d^2 stays at d_0 sigma^2 (d_0 = first grid value), the
/// regime in which the law-of-large-numbers steps become exact.
enum class NoiseScaling { FixedSigma, FixedLambda };

constexpr std::string_view to_string(NoiseScaling s) {
    return s == NoiseScaling::FixedSigma ? "fixed-sigma" : "fixed-lambda";
}

struct ApproxRow {
    Eigen::Index d = 0;
    double sigma = 0.0;
    std::vector<double> test_residuals; // ||N^T n_ts||_inf / (d sigma^2)
    std::vector<double> gram_residuals; // ||N^T N - d sigma^2 I||_max / (d sigma^2)
    std::vector<double> gaps;           // ||exact - approx||_2 / ||exact||_2
    double median_test_residual = 0.0;
    double median_gram_residual = 0.0;
    double median_gap = 0.0;
};

struct ApproxReport {
    Eigen::Index p = 0;
    Eigen::Index n = 0;
    double sigma = 0.0;
    NoiseScaling scaling = NoiseScaling::FixedSigma;
    std::vector<ApproxRow> rows;

    static bool strictly_decreasing(const std::vector<ApproxRow>& rows, double ApproxRow::*field) {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].*field < rows[i - 1].*field)) return false;
        return true;
    }
    bool test_residual_decreases() const { return strictly_decreasing(rows, &ApproxRow::median_test_residual); }
    bool gram_residual_decreases() const { return strictly_decreasing(rows, &ApproxRow::median_gram_residual); }
    bool gap_decreases() const { return strictly_decreasing(rows, &ApproxRow::median_gap); }
};

inline double median(std::vector<double> v) {
    require(!v.empty(), ErrorCode::InvalidArgument, "median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Measures how well N^T n_ts ~ 0, N^T N ~ d sigma^2 I and the resulting
/// ridge prediction track the exact with-unrelated solution, for every d in
/// `d_grid` and `seeds` independent draws. X, Y and x_ts are shared across d
/// within a seed.
inline ApproxReport verify_approximations(Eigen::Index p, Eigen::Index n, double sigma,
                                          const std::vector<Eigen::Index>& d_grid, int seeds,
                                          NoiseScaling scaling = NoiseScaling::FixedSigma, Eigen::Index o = 2,
                                          std::uint64_t base_seed = 0) {
    require(p >= 1 && n >= 1 && o >= 1, ErrorCode::InvalidArgument, "p, n and o must be >= 1");
    require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "sigma must be > 0");
    require(seeds >= 1, ErrorCode::InvalidArgument, "need at least one seed");
    require(!d_grid.empty(), ErrorCode::InvalidArgument, "d_grid is empty");
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        require(d_grid[i] >= 1, ErrorCode::InvalidArgument, "d values must be >= 1");
        if (i > 0) require(d_grid[i] > d_grid[i - 1], ErrorCode::InvalidArgument, "d_grid must be increasing");
    }

    ApproxReport report{p, n, sigma, scaling, {}};
    const double d0 = static_cast<double>(d_grid.front());
    for (Eigen::Index d : d_grid) {
        ApproxRow row;
        row.d = d;
        row.sigma = scaling == NoiseScaling::FixedSigma ? sigma : sigma * std::sqrt(d0 / static_cast<double>(d));
        const double lambda = solvers::unrelated_lambda(d, row.sigma);
        for (int s = 0; s < seeds; ++s) {
            const std::uint64_t ss = derive_seed(base_seed, "approx", static_cast<std::uint64_t>(s));
            Engine x_eng = make_stream(ss, "x");
            Engine t_eng = make_stream(ss, "teacher");
            Engine xt_eng = make_stream(ss, "x_ts");
            const Matrix x = gaussian_matrix(p, n, 1.0, x_eng);
            const Matrix y = gaussian_matrix(o, p, 1.0, t_eng) * x;
            const Vector x_ts = gaussian_vector(p, 1.0, xt_eng);
            Engine n_eng(derive_seed(ss, "noise", static_cast<std::uint64_t>(d)));
            const Matrix noise = gaussian_matrix(d, n, row.sigma, n_eng);
            const Vector n_ts = gaussian_vector(d, row.sigma, n_eng);

            row.test_residuals.push_back((noise.transpose() * n_ts).cwiseAbs().maxCoeff() / lambda);
            Matrix gram = noise.transpose() * noise;
            gram.diagonal().array() -= lambda;
            row.gram_residuals.push_back(gram.cwiseAbs().maxCoeff() / lambda);

            const auto exact = solvers::with_unrelated_solution(x, noise, y);
            Vector full(p + d);
            full << x_ts, n_ts;
            const Vector exact_pred = solvers::predict(exact, full);
            const Vector approx_pred = solvers::approx_prediction_unrelated(x, y, row.sigma, d, x_ts);
            row.gaps.push_back((exact_pred - approx_pred).norm() / exact_pred.norm());
        }
        row.median_test_residual = median(row.test_residuals);
        row.median_gram_residual = median(row.gram_residuals);
        row.median_gap = median(row.gaps);
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// Columns: d,sigma,median_test_residual,median_gram_residual,median_gap.
inline void write_approx_csv(const ApproxReport& r, std::ostream& os) {
    using datagen::format_real;
    os << "d,sigma,median_test_residual,median_gram_residual,median_gap\n";
    for (const auto& row : r.rows)
        os << row.d << "," << format_real(row.sigma) << "," << format_real(row.median_test_residual) << ","
           << format_real(row.median_gram_residual) << "," << format_real(row.median_gap) << "\n";
}

// ---------------------------------------------------------------------------
// Corrupted-output regression

struct RegressionParams {
    Eigen::Index p = 10;
    Eigen::Index o = 4;
    Eigen::Index d = 500;
    Eigen::Index n = 7;
    Eigen::Index n_test = 1000;
    std::uint64_t seed = 0;
};

struct RegressionCell {
    double sigma_input = 0.0;
    double sigma_output = 0.0;
    Summary err_with;      // with task-unrelated dimensions, exact pseudo-inverse
    Summary err_without;   // minimal dimensions only, min-norm
    Summary err_tikhonov;  // minimal dimensions, lambda = d sigma_input^2
    Summary diff_with_without;
    Summary diff_with_tikhonov;
    double mean_abs_diff_with_without = 0.0;
    double mean_abs_diff_with_tikhonov = 0.0;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
};

/// For every (sigma_input, sigma_output) pair and seed, fits the three
/// baselines on n training samples and averages their test errors. Seed s
/// uses the same teacher and standard-normal draws in every cell.
inline std::vector<RegressionCell> regression_demo(const std::vector<double>& sigma_input_grid,
                                                   const std::vector<double>& sigma_output_grid, int seeds,
                                                   const RegressionParams& params = {}) {
    require(seeds >= 1, ErrorCode::InvalidArgument, "need at least one seed");
    require(!sigma_input_grid.empty() && !sigma_output_grid.empty(), ErrorCode::InvalidArgument, "empty sigma grid");
    struct Acc {
        std::vector<double> ew, eo, et, dwo, dwt;
        std::size_t failed = 0;
    };
    const std::size_t n_in = sigma_input_grid.size();
    std::vector<Acc> acc(sigma_output_grid.size() * n_in);
    const datagen::CorruptedRegressionSpec base{params.p, params.o, params.d, params.n + params.n_test, 1.0, 0.0};
    for (int s = 0; s < seeds; ++s) {
        const auto draws =
            datagen::regression_draws(base, derive_seed(params.seed, "regression", static_cast<std::uint64_t>(s)));
        for (std::size_t io = 0; io < sigma_output_grid.size(); ++io)
            for (std::size_t ii = 0; ii < n_in; ++ii) {
                const double s_in = sigma_input_grid[ii], s_out = sigma_output_grid[io];
                Acc& a = acc[io * n_in + ii];
                try {
                    const Dataset all = draws.scaled(s_in, s_out);
                    const Dataset train = all.slice(0, params.n);
                    const Dataset test = all.slice(params.n, params.n_test);
                    const Matrix x = train.minimal();
                    const Matrix x_test = test.minimal();

                    const auto with = solvers::with_unrelated_solution(x, train.unrelated(), train.targets);
                    const auto without = solvers::min_norm_pseudo_inverse(x, train.targets);
                    const auto ridge = solvers::tikhonov_solution(x, train.targets, solvers::unrelated_lambda(params.d, s_in));
                    const double e_with = metrics::mse_error(with, test.inputs, test.targets);
                    const double e_wo = metrics::mse_error(without, x_test, test.targets);
                    const double e_tik = metrics::mse_error(ridge, x_test, test.targets);
                    a.ew.push_back(e_with);
                    a.eo.push_back(e_wo);
                    a.et.push_back(e_tik);
                    a.dwo.push_back(e_with - e_wo);
                    a.dwt.push_back(e_with - e_tik);
                } catch (const Error&) {
                    ++a.failed;
                }
            }
    }
    auto mean_abs = [](const std::vector<double>& v) {
        double total = 0.0;
        for (double x : v) total += std::abs(x);
        return total / static_cast<double>(v.size());
    };
    std::vector<RegressionCell> cells;
    for (std::size_t io = 0; io < sigma_output_grid.size(); ++io)
        for (std::size_t ii = 0; ii < n_in; ++ii) {
            const Acc& a = acc[io * n_in + ii];
            RegressionCell cell;
            cell.sigma_input = sigma_input_grid[ii];
            cell.sigma_output = sigma_output_grid[io];
            cell.n_ok = a.ew.size();
            cell.n_failed = a.failed;
            if (cell.n_ok > 0) {
                cell.err_with = metrics::summarize(std::span<const double>(a.ew));
                cell.err_without = metrics::summarize(std::span<const double>(a.eo));
                cell.err_tikhonov = metrics::summarize(std::span<const double>(a.et));
                cell.diff_with_without = metrics::summarize(std::span<const double>(a.dwo));
                cell.diff_with_tikhonov = metrics::summarize(std::span<const double>(a.dwt));
                cell.mean_abs_diff_with_without = mean_abs(a.dwo);
                cell.mean_abs_diff_with_tikhonov = mean_abs(a.dwt);
            }
            cells.push_back(cell);
        }
    return cells;
}

/// One row per (sigma_input, sigma_output) cell.
inline void write_regression_csv(const std::vector<RegressionCell>& cells, std::ostream& os) {
    using datagen::format_real;
    os << "sigma_input,sigma_output,err_with_mean,err_without_mean,err_tikhonov_mean,diff_with_without_mean,"
          "diff_with_without_std,diff_with_tikhonov_mean,diff_with_tikhonov_std,mean_abs_diff_with_without,"
          "mean_abs_diff_with_tikhonov,n_ok\n";
    for (const auto& c : cells)
        os << format_real(c.sigma_input) << "," << format_real(c.sigma_output) << "," << format_real(c.err_with.mean)
           << "," << format_real(c.err_without.mean) << "," << format_real(c.err_tikhonov.mean) << ","
           << format_real(c.diff_with_without.mean) << "," << format_real(c.diff_with_without.stddev) << ","
           << format_real(c.diff_with_tikhonov.mean) << "," << format_real(c.diff_with_tikhonov.stddev) << ","
           << format_real(c.mean_abs_diff_with_without) << "," << format_real(c.mean_abs_diff_with_tikhonov) << ","
           << c.n_ok << "\n";
}

} // namespace dimlab::harness

// dimlab: dataset generation, solves, sweeps, verification and plotting.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimlab/dimlab.hpp"

namespace fs = std::filesystem;
using namespace dimlab;

namespace {

constexpr const char* kToolVersion = "0.1.0";

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kIo = 3 };

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string command;
    std::string started = utc_now();
    std::uint64_t fingerprint = 0;
    std::vector<std::string> outputs;

    void write(const fs::path& path) const {
        nlohmann::json j;
        j["tool"] = "dimlab";
        j["version"] = kToolVersion;
        j["rng_version"] = kRngVersion;
        j["command"] = command;
        j["config_fingerprint"] = config::hex64(fingerprint);
        j["started_at"] = started;
        j["finished_at"] = utc_now();
        j["outputs"] = outputs;
        std::ofstream os(path);
        require(bool(os), ErrorCode::Io, "cannot write " + path.string());
        os << j.dump(2) << "\n";
    }
};

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return os;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorCode::Io, "cannot create directory " + dir.string());
}

unsigned worker_count(unsigned requested) {
    unsigned jobs = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DIMLAB_JOBS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) jobs = std::min(jobs, static_cast<unsigned>(cap));
    }
    return jobs;
}

datagen::Dataset load_dataset(const fs::path& path) {
    std::ifstream probe(path, std::ios::binary);
    require(bool(probe), ErrorCode::Io, "cannot open " + path.string());
    char magic[8] = {};
    probe.read(magic, sizeof(magic));
    if (probe && std::string(magic, 8) == "DIMLABDS") return datagen::read_binary(path).dataset;
    return datagen::read_csv(path);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& a) {
    Manifest m;
    m.command = "generate";
    auto g = config::read_generate_config(config::ConfigFile::load(a.config));
    if (a.seed) g.seed = *a.seed;
    const std::uint64_t fp = g.canonical().fingerprint();
    const auto ds = config::generate(g);
    {
        auto os = open_out(a.out);
        if (a.format == "binary") datagen::write_binary(ds, fp, os);
        else datagen::write_csv(ds, os);
        require(bool(os), ErrorCode::Io, "write failed: " + a.out);
    }
    m.fingerprint = fp;
    m.outputs = {a.out};
    m.write(a.out + ".manifest.json");
    std::cout << "wrote " << ds.n() << " samples x " << ds.layout.total() << " inputs to " << a.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string train;
    std::string test;
    std::string method = "moore_penrose";
    double lambda = 1.0;
    std::string out;
};

int cmd_solve(const SolveArgs& a) {
    const auto train = load_dataset(a.train);
    solvers::LinearSolution w;
    if (a.method == "min_norm") w = solvers::min_norm_pseudo_inverse(train.inputs, train.targets);
    else if (a.method == "moore_penrose") w = solvers::moore_penrose_solution(train.inputs, train.targets);
    else if (a.method == "tikhonov") w = solvers::tikhonov_solution(train.inputs, train.targets, a.lambda);
    else if (a.method == "with_unrelated") {
        require(train.layout.d_related == 0, ErrorCode::InvalidArgument,
                "with_unrelated needs a dataset without related dimensions");
        w = solvers::with_unrelated_solution(train.minimal(), train.unrelated(), train.targets);
    } else {
        fail(ErrorCode::Config, "unknown method '" + a.method + "'");
    }
    std::cout << "method " << solvers::to_string(w.method) << ", condition " << w.conditioning << "\n";
    if (!a.test.empty()) {
        const auto test = load_dataset(a.test);
        std::cout << "test mse " << metrics::mse_error(w, test) << "\n";
        if (test.labels) std::cout << "test accuracy " << metrics::accuracy(w, test) << "\n";
    }
    if (!a.out.empty()) {
        auto os = open_out(a.out);
        for (Eigen::Index i = 0; i < w.weights.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.weights.cols(); ++j)
                os << (j ? "," : "") << datagen::format_real(w.weights(i, j));
            os << "\n";
        }
        require(bool(os), ErrorCode::Io, "write failed: " + a.out);
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string out;
    std::optional<int> repetitions;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
};

int cmd_sweep(const SweepArgs& a) {
    Manifest m;
    m.command = "sweep";
    auto cfg = config::read_experiment_config(config::ConfigFile::load(a.config));
    if (a.repetitions) cfg.repetitions = *a.repetitions;
    if (a.seed) cfg.seed = *a.seed;
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Config, e.what());
    }
    make_dir(a.out);
    const auto result = harness::run_sweep(cfg, worker_count(a.jobs));
    const fs::path dir(a.out);
    {
        auto os = open_out(dir / "results.csv");
        harness::write_results_csv(cfg, result, os);
    }
    {
        auto os = open_out(dir / "aggregate.csv");
        harness::write_aggregate_csv(result, os);
    }
    m.fingerprint = config::canonical(cfg).fingerprint();
    m.outputs = {(dir / "results.csv").string(), (dir / "aggregate.csv").string()};
    m.write(dir / "manifest.json");

    const auto failed = result.failed_cells();
    for (const auto& agg : result.aggregates)
        std::cout << "d=" << agg.d << " nu=" << datagen::format_real(agg.nu) << " autc "
                  << datagen::format_real(agg.autc_mean) << " +- " << datagen::format_real(agg.autc_std) << " (n_ok "
                  << agg.n_ok << ")\n";
    if (failed > 0) std::cerr << failed << " of " << result.cells.size() << " cells failed\n";
    return failed == result.cells.size() ? kRuntime : kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    Eigen::Index p = 30;
    Eigen::Index n = 20;
    double sigma = 0.1;
    std::vector<Eigen::Index> d_grid = {100, 1000, 10000};
    int seeds = 20;
    std::string scaling = "fixed-lambda";
    std::string out;
};

struct CheckList {
    int failures = 0;
    void report(const std::string& name, bool ok, const std::string& detail = {}) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : "  " + detail) << "\n";
        if (!ok) ++failures;
    }
};

int cmd_verify(const VerifyArgs& a) {
    CheckList checks;
    const auto scaling = a.scaling == "fixed-sigma" ? harness::NoiseScaling::FixedSigma : harness::NoiseScaling::FixedLambda;
    const auto report = harness::verify_approximations(a.p, a.n, a.sigma, a.d_grid, a.seeds, scaling);
    std::cout << "approximation study: p=" << a.p << " n=" << a.n << " sigma=" << a.sigma << " seeds=" << a.seeds
              << " scaling=" << harness::to_string(scaling) << "\n";
    for (const auto& row : report.rows)
        std::cout << "  d=" << row.d << " sigma_d=" << datagen::format_real(row.sigma)
                  << " test_residual=" << row.median_test_residual << " gram_residual=" << row.median_gram_residual
                  << " gap=" << row.median_gap << "\n";
    checks.report("test-residual-decreases", report.test_residual_decreases());
    checks.report("gram-residual-decreases", report.gram_residual_decreases());
    checks.report("prediction-gap-decreases", report.gap_decreases());

    // Repeat-k frames leave the min-norm prediction unchanged.
    const Eigen::Index fp = 10, fn = 6;
    double frame_err = 0.0;
    for (int k : {1, 2, 5})
        for (int s = 0; s < a.seeds; ++s) {
            Engine eng = make_stream(derive_seed(0, "verify-frame", static_cast<std::uint64_t>(s)), "data");
            const Matrix x = gaussian_matrix(fp, fn, 1.0, eng);
            const Matrix y = gaussian_matrix(3, fn, 1.0, eng);
            const Vector x_ts = gaussian_vector(fp, 1.0, eng);
            const auto frame = solvers::FrameSpec::repeat(fp, k);
            const auto base = solvers::min_norm_pseudo_inverse(x, y);
            const auto framed = solvers::frame_solution(x, y, frame);
            const Vector fx = frame.materialize() * x_ts;
            frame_err = std::max(frame_err, (solvers::predict(framed, fx) - solvers::predict(base, x_ts)).cwiseAbs().maxCoeff());
        }
    checks.report("tight-frame-equivalence", frame_err < 1e-8, "max deviation " + datagen::format_real(frame_err));

    // Block solvers agree with the min-norm solve of the stacked input.
    double stack_err = 0.0;
    for (int s = 0; s < a.seeds; ++s) {
        Engine eng = make_stream(derive_seed(0, "verify-stack", static_cast<std::uint64_t>(s)), "data");
        const Eigen::Index p = 8, n = 12, d = 20;
        const Matrix x = gaussian_matrix(p, n, 1.0, eng);
        const Matrix noise = gaussian_matrix(d, n, 0.5, eng);
        const Matrix t = gaussian_matrix(p, 2 * p, 1.0, eng).transpose();
        const Matrix y = gaussian_matrix(2, n, 1.0, eng);
        const auto wu = solvers::with_unrelated_solution(x, noise, y);
        Matrix stacked_u(p + d, n);
        stacked_u << x, noise;
        stack_err = std::max(stack_err, (wu.weights - solvers::min_norm_pseudo_inverse(stacked_u, y).weights).cwiseAbs().maxCoeff());
        const auto wc = solvers::combined_solution(x, noise, t, y);
        Matrix stacked_c(p + d + t.rows(), n);
        stacked_c << x, noise, t * x;
        stack_err = std::max(stack_err, (wc.weights - solvers::min_norm_pseudo_inverse(stacked_c, y).weights).cwiseAbs().maxCoeff());
    }
    checks.report("stacking-equivalence", stack_err < 1e-10, "max deviation " + datagen::format_real(stack_err));

    if (!a.out.empty()) {
        auto os = open_out(a.out);
        harness::write_approx_csv(report, os);
    }
    std::cout << (checks.failures == 0 ? "all checks passed" : std::to_string(checks.failures) + " check(s) failed")
              << "\n";
    return checks.failures == 0 ? kOk : kRuntime;
}

// ---------------------------------------------------------------------------

struct RegressionArgs {
    std::vector<double> sigma_input = {0.01, 0.03, 0.1, 0.3, 1.0};
    std::vector<double> sigma_output = {0.0, 0.1, 0.3, 1.0, 3.0};
    int seeds = 50;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_regression(const RegressionArgs& a) {
    Manifest m;
    m.command = "regression-demo";
    harness::RegressionParams params;
    params.seed = a.seed;
    const auto cells = harness::regression_demo(a.sigma_input, a.sigma_output, a.seeds, params);
    make_dir(a.out);
    const fs::path csv = fs::path(a.out) / "regression.csv";
    {
        auto os = open_out(csv);
        harness::write_regression_csv(cells, os);
    }
    config::Canonical c;
    std::string si, so;
    for (double v : a.sigma_input) si += datagen::format_real(v) + ";";
    for (double v : a.sigma_output) so += datagen::format_real(v) + ";";
    c.add("sigma_input", si);
    c.add("sigma_output", so);
    c.add("seeds", std::to_string(a.seeds));
    c.add("seed", std::to_string(a.seed));
    c.add("rng.version", std::to_string(kRngVersion));
    m.fingerprint = c.fingerprint();
    m.outputs = {csv.string()};
    m.write(fs::path(a.out) / "manifest.json");
    for (const auto& cell : cells)
        std::cout << "sigma_in=" << datagen::format_real(cell.sigma_input)
                  << " sigma_out=" << datagen::format_real(cell.sigma_output)
                  << " with-without=" << cell.diff_with_without.mean << " with-tikhonov=" << cell.diff_with_tikhonov.mean
                  << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
    std::string input;
    std::string out;
    std::string kind;
};

int cmd_plot(const PlotArgs& a) {
    const auto kind = plot::parse_plot_kind(a.kind);
    require(kind.has_value(), ErrorCode::Config, "unknown plot kind '" + a.kind + "'");
    std::ifstream is(a.input);
    require(bool(is), ErrorCode::Io, "cannot open " + a.input);
    const auto chart = plot::build_chart(*kind, plot::read_table(is));
    auto os = open_out(a.out);
    os << plot::render_svg(chart);
    require(bool(os), ErrorCode::Io, "write failed: " + a.out);
    return kOk;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::Config: return kConfig;
    case ErrorCode::Io: return kIo;
    default: return kRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimlab: unnecessary input dimensions and data efficiency"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a dataset from a config file");
    generate->add_option("--config", gen.config, "Config file")->required()->check(CLI::ExistingFile);
    generate->add_option("--out", gen.out, "Output dataset path")->required();
    generate->add_option("--format", gen.format, "Output format")->check(CLI::IsMember({"csv", "binary"}));
    generate->add_option("--seed", gen.seed, "Override dataset.seed");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Fit a linear solver to a dataset file");
    solve->add_option("--data", sol.train, "Training dataset (csv or binary)")->required()->check(CLI::ExistingFile);
    solve->add_option("--test", sol.test, "Optional test dataset")->check(CLI::ExistingFile);
    solve->add_option("--method", sol.method, "Solver")
        ->check(CLI::IsMember({"min_norm", "moore_penrose", "tikhonov", "with_unrelated"}));
    solve->add_option("--lambda", sol.lambda, "Tikhonov lambda")->check(CLI::PositiveNumber);
    solve->add_option("--out", sol.out, "Write the weight matrix as CSV");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep");
    sweep->add_option("--config", sw.config, "Config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", sw.out, "Output directory")->required();
    sweep->add_option("--repetitions", sw.repetitions, "Override experiment.repetitions")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sw.seed, "Override experiment.seed");
    sweep->add_option("--jobs", sw.jobs, "Worker threads (0 = all cores)");

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "Check the linear-theory identities and approximations");
    verify->add_option("--p", ver.p, "Minimal dimensions")->check(CLI::PositiveNumber);
    verify->add_option("--n", ver.n, "Training samples")->check(CLI::PositiveNumber);
    verify->add_option("--sigma", ver.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
    verify->add_option("--d-grid", ver.d_grid, "Increasing unrelated-dimension counts")->delimiter(',');
    verify->add_option("--seeds", ver.seeds, "Monte-Carlo seeds")->check(CLI::PositiveNumber);
    verify->add_option("--scaling", ver.scaling, "Noise scaling as d grows")
        ->check(CLI::IsMember({"fixed-sigma", "fixed-lambda"}));
    verify->add_option("--out", ver.out, "Write the per-d medians as CSV");

    RegressionArgs reg;
    auto* regression = app.add_subcommand("regression-demo", "Corrupted-output regression study");
    regression->add_option("--sigma-input", reg.sigma_input, "Input noise grid")->delimiter(',');
    regression->add_option("--sigma-output", reg.sigma_output, "Output noise grid")->delimiter(',');
    regression->add_option("--seeds", reg.seeds, "Seeds per cell")->check(CLI::PositiveNumber);
    regression->add_option("--seed", reg.seed, "Base seed");
    regression->add_option("--out", reg.out, "Output directory")->required();

    PlotArgs pl;
    auto* plot_cmd = app.add_subcommand("plot", "Render a result CSV as SVG");
    plot_cmd->add_option("--input", pl.input, "Input CSV")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", pl.out, "Output SVG")->required();
    plot_cmd->add_option("--kind", pl.kind, "accuracy_vs_ntr, autc_vs_d or regression_diff")
        ->required()
        ->check(CLI::IsMember({"accuracy_vs_ntr", "autc_vs_d", "regression_diff"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*generate) return cmd_generate(gen);
        if (*solve) return cmd_solve(sol);
        if (*sweep) return cmd_sweep(sw);
        if (*verify) return cmd_verify(ver);
        if (*regression) return cmd_regression(reg);
        if (*plot_cmd) return cmd_plot(pl);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kRuntime;
}

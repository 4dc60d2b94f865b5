// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "dimlab/dimlab.hpp"

using namespace dimlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s | %s | %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs, budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

Matrix randn(Eigen::Index r, Eigen::Index c, std::mt19937& g) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(g);
    return m;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

harness::ExperimentConfig linsep_sweep() {
    harness::ExperimentConfig c;
    c.name = "data-efficiency";
    c.family = datagen::Family::LinSepTeacher;
    c.p = 30;
    c.noise = datagen::NoiseSpec::GaussianIID{0.1};
    c.related_frame = harness::RelatedFrame::Repeat;
    c.dim_grid = {{0, 0.0}, {500, 0.0}, {510, 1.0}};
    c.ntr_grid = {5, 10, 20, 50, 100, 300};
    c.repetitions = 10;
    c.test_size = 10000;
    c.model = harness::ModelKind::PseudoInverse;
    c.seed = 2024;
    return c;
}

std::string results_csv(const harness::ExperimentConfig& c, const harness::SweepResult& r) {
    std::ostringstream os;
    harness::write_results_csv(c, r, os);
    return os.str();
}

} // namespace

int main() {
    criterion(1, "tight-frame equivalence", 1.0, [] {
        const Eigen::Index p = 10, n = 6;
        double worst = 0.0;
        for (int k : {1, 2, 5})
            for (int s = 0; s < 20; ++s) {
                std::mt19937 g(static_cast<unsigned>(1000 * k + s));
                const Matrix x = randn(p, n, g), y = randn(2, n, g);
                const auto frame = solvers::FrameSpec::repeat(p, k);
                const Matrix f = frame.materialize();
                const auto base = solvers::min_norm_pseudo_inverse(x, y);
                const auto w = solvers::frame_solution(x, y, frame);
                for (int t = 0; t < 10; ++t) {
                    const Vector xt = randn(p, 1, g).col(0);
                    worst = std::max(worst, (solvers::predict(w, Vector(f * xt)) - solvers::predict(base, xt))
                                                .cwiseAbs()
                                                .maxCoeff());
                }
            }
        return Outcome{worst < 1e-8, "max deviation " + fmt(worst) + " (< 1e-8)"};
    });

    criterion(2, "stacking-oracle equivalence", 5.0, [] {
        double wu = 0.0, wc = 0.0;
        for (int s = 0; s < 50; ++s) {
            std::mt19937 g(static_cast<unsigned>(7000 + s));
            const Eigen::Index p = 4 + s % 5, n = 3 + s % 6, d = 6 + s % 9, dr = 2 + s % 4;
            const Matrix x = randn(p, n, g), nn = randn(d, n, g), t = randn(dr, p, g), y = randn(2, n, g);
            Matrix su(p + d, n);
            su << x, nn;
            wu = std::max(wu, (solvers::with_unrelated_solution(x, nn, y).weights -
                               solvers::min_norm_pseudo_inverse(su, y).weights)
                                  .cwiseAbs()
                                  .maxCoeff());
            Matrix sc(p + d + dr, n);
            sc << x, nn, t * x;
            wc = std::max(wc, (solvers::combined_solution(x, nn, t, y).weights -
                               solvers::min_norm_pseudo_inverse(sc, y).weights)
                                  .cwiseAbs()
                                  .maxCoeff());
        }
        return Outcome{wu < 1e-10 && wc < 1e-10,
                       "with_unrelated " + fmt(wu) + ", combined " + fmt(wc) + " (< 1e-10 entrywise)"};
    });

    criterion(3, "emergent-Tikhonov convergence (fixed sigma)", 30.0, [] {
        const auto rep = harness::verify_approximations(30, 20, 0.1, {100, 1000, 10000}, 20,
                                                        harness::NoiseScaling::FixedSigma);
        std::string detail = "median gap";
        for (const auto& row : rep.rows) detail += " d=" + std::to_string(row.d) + ":" + fmt(row.median_gap);
        detail += rep.gap_decreases() ? ", strictly decreasing" : ", not decreasing";
        return Outcome{rep.gap_decreases(), detail};
    });

    harness::SweepResult c4_result;
    criterion(4, "data-efficiency trend, pseudo-inverse", 120.0, [&] {
        const auto cfg = linsep_sweep();
        c4_result = harness::run_sweep(cfg, jobs());
        const auto* base = c4_result.find(0, 0.0);
        const auto* unrel = c4_result.find(500, 0.0);
        const auto* rel = c4_result.find(510, 1.0);
        if (!base || !unrel || !rel || base->n_ok != 10 || unrel->n_ok != 10 || rel->n_ok != 10)
            return Outcome{false, "missing or failed cells"};
        const bool harm = unrel->autc_mean < base->autc_mean - (base->autc_std + unrel->autc_std);
        const bool same = std::abs(rel->autc_mean - base->autc_mean) <= base->autc_std;
        return Outcome{harm && same, "autc d=0 " + fmt(base->autc_mean) + "+-" + fmt(base->autc_std) +
                                         ", unrelated d=500 " + fmt(unrel->autc_mean) + "+-" + fmt(unrel->autc_std) +
                                         ", related d=510 " + fmt(rel->autc_mean) + "+-" + fmt(rel->autc_std) +
                                         " (" + std::string(metrics::to_string(c4_result.scale)) + " scale)"};
    });

    criterion(5, "corrupted-regression demo", 60.0, [] {
        const std::vector<double> s_in{0.01, 0.03, 0.1, 0.3, 1.0};
        const std::vector<double> s_out{0.0, 0.1, 0.3, 1.0, 3.0};
        const auto cells = harness::regression_demo(s_in, s_out, 50);
        bool a = true, b = true, c = true;
        double min_clean = INFINITY, max_noisy = -INFINITY, worst_ratio = 0.0;
        for (const auto& cell : cells) {
            if (cell.n_ok != 50) return Outcome{false, "failed seeds in a cell"};
            if (cell.sigma_output == s_out.front()) {
                a = a && cell.diff_with_without.mean >= 0.0;
                min_clean = std::min(min_clean, cell.diff_with_without.mean);
            }
            if (cell.sigma_output == s_out.back()) {
                b = b && cell.diff_with_without.mean < 0.0;
                max_noisy = std::max(max_noisy, cell.diff_with_without.mean);
                const double ratio = cell.mean_abs_diff_with_tikhonov / cell.mean_abs_diff_with_without;
                worst_ratio = std::max(worst_ratio, ratio);
                c = c && ratio < 0.2;
            }
        }
        return Outcome{a && b && c, "(a) min diff at sigma_out=0: " + fmt(min_clean) +
                                        "; (b) max diff at sigma_out=3: " + fmt(max_noisy) +
                                        "; (c) worst |with-tikhonov|/|with-without|: " + fmt(worst_ratio) + " (< 0.2)"};
    });

    criterion(6, "AUTC metric suite", 1.0, [] {
        using metrics::AccuracyCurve;
        using metrics::Scale;
        const double e1 = metrics::autc({{{1, 1.0}, {10, 1.0}, {100, 1.0}}, Scale::Log10}).value;
        const double e2 = metrics::autc({{{1, 0.5}, {10, 0.5}, {100, 0.5}}, Scale::Linear}).value;
        const double e3 = metrics::autc({{{10, 0.5}, {100, 1.0}}, Scale::Log10}).value;
        const bool examples = std::abs(e1 - 1.0) <= 1e-12 && std::abs(e2 - 0.5) <= 1e-12 && std::abs(e3 - 0.75) <= 1e-12;
        std::mt19937 g(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int violations = 0;
        for (int t = 0; t < 1000; ++t) {
            AccuracyCurve lo, hi;
            lo.scale = hi.scale = t % 2 ? Scale::Log10 : Scale::Linear;
            long n = 1 + static_cast<long>(g() % 20);
            const int len = 2 + static_cast<int>(g() % 7);
            for (int i = 0; i < len; ++i) {
                const double a = u(g);
                lo.points.push_back({n, a});
                hi.points.push_back({n, a + (1.0 - a) * u(g)});
                n += 1 + static_cast<long>(g() % 100);
            }
            const double vl = metrics::autc(lo).value, vh = metrics::autc(hi).value;
            if (vl < 0.0 || vl > 1.0 || vh < 0.0 || vh > 1.0 || vh < vl - 1e-15) ++violations;
        }
        return Outcome{examples && violations == 0, "examples " + fmt(e1) + "/" + fmt(e2) + "/" + fmt(e3) +
                                                         ", randomized violations " + std::to_string(violations)};
    });

    criterion(7, "MLP gradient correctness", 5.0, [] {
        double worst = 0.0;
        for (auto act : {mlp::Activation::Linear, mlp::Activation::ReLU})
            for (auto los : {mlp::Loss::Square, mlp::Loss::CrossEntropySoftmax})
                for (int s = 0; s < 10; ++s) {
                    std::mt19937 g(static_cast<unsigned>(300 + s));
                    auto m = mlp::init({5, 7, 3, act, los}, static_cast<std::uint64_t>(s));
                    m.b1 = randn(7, 1, g).col(0) * 0.1;
                    m.b2 = randn(3, 1, g).col(0) * 0.1;
                    const Matrix x = randn(5, 4, g);
                    Matrix y = randn(3, 4, g);
                    if (los == mlp::Loss::CrossEntropySoftmax) {
                        y.setZero();
                        for (int j = 0; j < 4; ++j) y(static_cast<Eigen::Index>(g() % 3), j) = 1.0;
                    }
                    const auto an = mlp::backward(m, x, y);
                    auto sweep = [&](auto& param, const auto& grad) {
                        for (Eigen::Index i = 0; i < param.size(); ++i) {
                            const double keep = param.data()[i];
                            param.data()[i] = keep + 1e-5;
                            const double up = mlp::loss(m, x, y);
                            param.data()[i] = keep - 1e-5;
                            const double down = mlp::loss(m, x, y);
                            param.data()[i] = keep;
                            const double num = (up - down) / 2e-5;
                            const double den = std::max({std::abs(num), std::abs(grad.data()[i]), 1e-6});
                            worst = std::max(worst, std::abs(num - grad.data()[i]) / den);
                        }
                    };
                    sweep(m.w1, an.w1);
                    sweep(m.b1, an.b1);
                    sweep(m.w2, an.w2);
                    sweep(m.b2, an.b2);
                }
        return Outcome{worst < 1e-4, "max relative error " + fmt(worst) + " (< 1e-4)"};
    });

    criterion(8, "MLP data-efficiency trend, mixture", 600.0, [] {
        harness::ExperimentConfig c;
        c.name = "mlp-mixture";
        c.family = datagen::Family::GaussianMixture;
        c.noise = datagen::NoiseSpec::GaussianIID{1.0};
        c.dim_grid = {{0, 0.0}, {300, 0.0}};
        c.ntr_grid = {10, 50, 200};
        c.repetitions = 3;
        c.model = harness::ModelKind::MlpReluXent;
        c.seed = 8;
        const auto r = harness::run_sweep(c, jobs());
        const auto* base = r.find(0, 0.0);
        const auto* noisy = r.find(300, 0.0);
        if (!base || !noisy || base->n_ok != 3 || noisy->n_ok != 3) return Outcome{false, "missing or failed cells"};
        const double pooled = std::sqrt(0.5 * (base->autc_std * base->autc_std + noisy->autc_std * noisy->autc_std));
        return Outcome{base->autc_mean - noisy->autc_mean > pooled,
                       "autc d=0 " + fmt(base->autc_mean) + "+-" + fmt(base->autc_std) + ", d=300 " +
                           fmt(noisy->autc_mean) + "+-" + fmt(noisy->autc_std) + ", pooled std " + fmt(pooled)};
    });

    criterion(9, "sweep determinism", 120.0, [&] {
        const auto cfg = linsep_sweep();
        const std::string first = results_csv(cfg, c4_result);
        const std::string again = results_csv(cfg, harness::run_sweep(cfg, 1));
        return Outcome{!first.empty() && first == again,
                       std::to_string(first.size()) + " bytes, " + (first == again ? "identical" : "different")};
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}

#pragma once

#include <string>

#include "dimlab/config.hpp"
#include "dimlab/dataset_io.hpp"
#include "dimlab/harness.hpp"

/// Binding of config files to generator and sweep settings.
///
/// Generate configs:
///   [dataset]   family (linsep|mixture|corrupted_regression), p, o, n, seed,
///               mean_scale, sigma_input, sigma_output
///   [unrelated] kind (gaussian_iid|gaussian_correlated|salt_pepper), d,
///               sigma, variance, covariance, magnitude, prob
///   [related]   frame (none|repeat|gaussian), k, d
///
/// Sweep configs:
///   [experiment] name, seed, repetitions, test_size
///   [dataset]    family (linsep|mixture), p, o, mean_scale
///   [unrelated]  kind, sigma, variance, covariance, magnitude, prob
///   [related]    frame (repeat|gaussian)
///   [grid]       d (int_list), nu (real_list, same length), n_tr (int_list)
///   [model]      kind, lambda, hidden, max_epochs, patience, tolerance,
///                lr (real_list), batch (int_list)
namespace dimlab::config {

using datagen::format_real;

inline datagen::NoiseSpec::Kind read_noise_kind(Reader& r, double default_sigma) {
    const std::string kind = r.get_string("unrelated.kind", "gaussian_iid");
    if (kind == "gaussian_iid") {
        return datagen::NoiseSpec::GaussianIID{r.get_real("unrelated.sigma", default_sigma)};
    }
    if (kind == "gaussian_correlated") {
        return datagen::NoiseSpec::GaussianCorrelated{r.get_real("unrelated.variance", 1.0),
                                                      r.get_real("unrelated.covariance", 0.5)};
    }
    if (kind == "salt_pepper") {
        return datagen::NoiseSpec::SaltPepper{r.get_real("unrelated.magnitude", 1.0), r.get_real("unrelated.prob", 0.5)};
    }
    config_error(r.line_of("unrelated.kind"), "unknown unrelated.kind '" + kind + "'");
}

inline void add_noise(Canonical& c, const datagen::NoiseSpec::Kind& kind) {
    std::visit(
        [&c](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, datagen::NoiseSpec::GaussianIID>) {
                c.add("unrelated.kind", "gaussian_iid");
                c.add("unrelated.sigma", format_real(k.sigma));
            } else if constexpr (std::is_same_v<K, datagen::NoiseSpec::GaussianCorrelated>) {
                c.add("unrelated.kind", "gaussian_correlated");
                c.add("unrelated.variance", format_real(k.variance));
                c.add("unrelated.covariance", format_real(k.covariance));
            } else {
                c.add("unrelated.kind", "salt_pepper");
                c.add("unrelated.magnitude", format_real(k.magnitude));
                c.add("unrelated.prob", format_real(k.prob));
            }
        },
        kind);
}

// ---------------------------------------------------------------------------

enum class RelatedKind { None, Repeat, Gaussian };

struct GenerateConfig {
    datagen::Family family = datagen::Family::LinSepTeacher;
    Eigen::Index p = 30;
    Eigen::Index o = 2;
    Eigen::Index n = 100;
    std::uint64_t seed = 0;
    double mean_scale = 4.0;
    double sigma_input = 1.0;
    double sigma_output = 0.0;
    datagen::NoiseSpec::Kind noise = datagen::NoiseSpec::GaussianIID{0.1};
    Eigen::Index d_unrelated = 0;
    RelatedKind related = RelatedKind::None;
    int related_k = 1;
    Eigen::Index related_d = 0;

    Canonical canonical() const {
        Canonical c;
        c.add("dataset.family", std::string(datagen::to_string(family)));
        c.add("dataset.p", std::to_string(p));
        c.add("dataset.o", std::to_string(o));
        c.add("dataset.n", std::to_string(n));
        c.add("dataset.seed", std::to_string(seed));
        if (family == datagen::Family::GaussianMixture) c.add("dataset.mean_scale", format_real(mean_scale));
        if (family == datagen::Family::CorruptedRegression) {
            c.add("dataset.sigma_input", format_real(sigma_input));
            c.add("dataset.sigma_output", format_real(sigma_output));
        }
        c.add("unrelated.d", std::to_string(d_unrelated));
        if (d_unrelated > 0) add_noise(c, noise);
        c.add("related.frame", related == RelatedKind::None ? "none" : related == RelatedKind::Repeat ? "repeat" : "gaussian");
        if (related == RelatedKind::Repeat) c.add("related.k", std::to_string(related_k));
        if (related == RelatedKind::Gaussian) c.add("related.d", std::to_string(related_d));
        c.add("rng.version", std::to_string(kRngVersion));
        return c;
    }
};

inline GenerateConfig read_generate_config(const ConfigFile& file) {
    Reader r(file);
    GenerateConfig g;
    const std::string fam = r.get_string("dataset.family", "linsep");
    auto family = datagen::parse_family(fam);
    if (!family) config_error(r.line_of("dataset.family"), "unknown dataset.family '" + fam + "'");
    g.family = *family;
    const bool regression = g.family == datagen::Family::CorruptedRegression;
    g.p = r.get_int("dataset.p", regression ? 10 : 30);
    g.o = r.get_int("dataset.o", regression ? 4 : 2);
    g.n = r.get_int("dataset.n", regression ? 7 : 100);
    g.seed = static_cast<std::uint64_t>(r.get_int("dataset.seed", 0));
    g.mean_scale = r.get_real("dataset.mean_scale", 4.0);
    g.sigma_input = r.get_real("dataset.sigma_input", 1.0);
    g.sigma_output = r.get_real("dataset.sigma_output", 0.0);
    g.d_unrelated = r.get_int("unrelated.d", regression ? 500 : 0);
    g.noise = read_noise_kind(r, regression ? g.sigma_input : 0.1);
    const std::string frame = r.get_string("related.frame", "none");
    if (frame == "none") g.related = RelatedKind::None;
    else if (frame == "repeat") g.related = RelatedKind::Repeat;
    else if (frame == "gaussian") g.related = RelatedKind::Gaussian;
    else config_error(r.line_of("related.frame"), "unknown related.frame '" + frame + "'");
    g.related_k = static_cast<int>(r.get_int("related.k", 1));
    g.related_d = r.get_int("related.d", 0);
    r.reject_unknown();

    if (g.p < 1) config_error(r.line_of("dataset.p"), "dataset.p must be >= 1");
    if (g.n < 1) config_error(r.line_of("dataset.n"), "dataset.n must be >= 1");
    if (g.family == datagen::Family::LinSepTeacher && g.o < 2) config_error(r.line_of("dataset.o"), "dataset.o must be >= 2");
    if (g.d_unrelated < 0) config_error(r.line_of("unrelated.d"), "unrelated.d must be >= 0");
    if (regression && g.sigma_input <= 0.0) config_error(r.line_of("dataset.sigma_input"), "sigma_input must be > 0");
    if (regression && g.sigma_output < 0.0) config_error(r.line_of("dataset.sigma_output"), "sigma_output must be >= 0");
    try {
        datagen::NoiseSpec{g.noise, 1}.validate();
    } catch (const Error& e) {
        config_error(r.line_of("unrelated.kind"), e.what());
    }
    if (g.related == RelatedKind::Repeat && g.related_k < 1) config_error(r.line_of("related.k"), "related.k must be >= 1");
    if (g.related == RelatedKind::Gaussian && g.related_d < 1) config_error(r.line_of("related.d"), "related.d must be >= 1");
    return g;
}

/// Materializes the dataset described by a generate config.
inline datagen::Dataset generate(const GenerateConfig& g) {
    using namespace datagen;
    Dataset ds;
    if (g.family == Family::LinSepTeacher) {
        ds = sample_linsep(make_teacher(g.p, g.o, derive_seed(g.seed, "teacher")), g.n, derive_seed(g.seed, "pool"));
    } else if (g.family == Family::GaussianMixture) {
        const auto spec = MixtureSpec::defaults(g.p, g.mean_scale);
        ds = sample_mixture(spec, (g.n + 1) / 2, derive_seed(g.seed, "pool")).slice(0, g.n);
    } else {
        const CorruptedRegressionSpec spec{g.p, g.o, g.d_unrelated, g.n, g.sigma_input, g.sigma_output};
        ds = make_corrupted_regression(spec, g.seed, NoiseSpec{g.noise, g.d_unrelated});
    }
    if (g.family != Family::CorruptedRegression)
        ds = append_unrelated(ds, NoiseSpec{g.noise, g.d_unrelated}, derive_seed(g.seed, "unrelated"));
    if (g.related == RelatedKind::Repeat) ds = append_related(ds, solvers::FrameSpec::repeat(g.p, g.related_k));
    if (g.related == RelatedKind::Gaussian)
        ds = append_related(ds, solvers::FrameSpec::gaussian(g.p, g.related_d, derive_seed(g.seed, "frame")));
    return ds;
}

// ---------------------------------------------------------------------------

inline Canonical canonical(const harness::ExperimentConfig& c) {
    Canonical out;
    out.add("experiment.seed", std::to_string(c.seed));
    out.add("experiment.repetitions", std::to_string(c.repetitions));
    out.add("experiment.test_size", std::to_string(c.test_size));
    out.add("dataset.family", std::string(datagen::to_string(c.family)));
    out.add("dataset.p", std::to_string(c.p));
    if (c.family == datagen::Family::LinSepTeacher) out.add("dataset.o", std::to_string(c.o));
    if (c.family == datagen::Family::GaussianMixture) out.add("dataset.mean_scale", format_real(c.mean_scale));
    add_noise(out, c.noise);
    out.add("related.frame", c.related_frame == harness::RelatedFrame::Repeat ? "repeat" : "gaussian");
    std::string dims;
    for (const auto& cell : c.dim_grid) dims += std::to_string(cell.d) + ":" + format_real(cell.nu) + ";";
    out.add("grid.dims", dims);
    std::string ntr;
    for (auto n : c.ntr_grid) ntr += std::to_string(n) + ";";
    out.add("grid.n_tr", ntr);
    out.add("model.kind", std::string(harness::to_string(c.model)));
    if (c.model == harness::ModelKind::Tikhonov) out.add("model.lambda", format_real(c.lambda));
    if (harness::is_mlp(c.model)) {
        out.add("model.hidden", std::to_string(c.hidden_dim));
        out.add("model.max_epochs", std::to_string(c.train.max_epochs));
        out.add("model.patience", std::to_string(c.train.patience));
        out.add("model.tolerance", format_real(c.train.tolerance));
        std::string lrs, batches;
        for (double lr : c.train.lr_grid) lrs += format_real(lr) + ";";
        for (auto b : c.train.batch_grid) batches += std::to_string(b) + ";";
        out.add("model.lr", lrs);
        out.add("model.batch", batches);
    }
    out.add("rng.version", std::to_string(kRngVersion));
    return out;
}

inline harness::ExperimentConfig read_experiment_config(const ConfigFile& file) {
    using harness::ModelKind;
    Reader r(file);
    harness::ExperimentConfig c;
    c.name = r.get_string("experiment.name", "sweep");
    c.seed = static_cast<std::uint64_t>(r.get_int("experiment.seed", 0));
    c.test_size = r.get_int("experiment.test_size", 10000);

    const std::string fam = r.get_string("dataset.family", "linsep");
    auto family = datagen::parse_family(fam);
    if (!family || *family == datagen::Family::CorruptedRegression)
        config_error(r.line_of("dataset.family"), "dataset.family must be linsep or mixture, got '" + fam + "'");
    c.family = *family;
    c.p = r.get_int("dataset.p", 30);
    c.o = r.get_int("dataset.o", 2);
    c.mean_scale = r.get_real("dataset.mean_scale", 4.0);

    c.noise = read_noise_kind(r, c.family == datagen::Family::GaussianMixture ? 1.0 : 0.1);
    const std::string frame = r.get_string("related.frame", "repeat");
    if (frame == "repeat") c.related_frame = harness::RelatedFrame::Repeat;
    else if (frame == "gaussian") c.related_frame = harness::RelatedFrame::Gaussian;
    else config_error(r.line_of("related.frame"), "related.frame must be repeat or gaussian");

    const IntList ds = r.get_int_list("grid.d", {0});
    const RealList nus = r.get_real_list("grid.nu", RealList(ds.size(), 0.0));
    if (ds.size() != nus.size())
        config_error(r.line_of("grid.nu"), "grid.d and grid.nu must have the same length");
    c.dim_grid.clear();
    for (std::size_t i = 0; i < ds.size(); ++i) c.dim_grid.push_back({ds[i], nus[i]});
    const IntList ntr = r.get_int_list("grid.n_tr", {10, 100});
    c.ntr_grid.assign(ntr.begin(), ntr.end());

    const std::string model = r.get_string("model.kind", "pseudo_inverse");
    if (model == "pseudo_inverse") c.model = ModelKind::PseudoInverse;
    else if (model == "tikhonov") c.model = ModelKind::Tikhonov;
    else if (model == "mlp_linear_square") c.model = ModelKind::MlpLinearSquare;
    else if (model == "mlp_linear_xent") c.model = ModelKind::MlpLinearXent;
    else if (model == "mlp_relu_xent") c.model = ModelKind::MlpReluXent;
    else config_error(r.line_of("model.kind"), "unknown model.kind '" + model + "'");
    c.lambda = r.get_real("model.lambda", 1.0);
    c.hidden_dim = r.get_int("model.hidden", 128);
    c.train.max_epochs = static_cast<int>(r.get_int("model.max_epochs", 100));
    c.train.patience = static_cast<int>(r.get_int("model.patience", 8));
    c.train.tolerance = r.get_real("model.tolerance", 1e-4);
    c.train.lr_grid = r.get_real_list("model.lr", c.train.lr_grid);
    const IntList batches = r.get_int_list("model.batch", {2, 10, 32, 50});
    c.train.batch_grid.assign(batches.begin(), batches.end());

    c.repetitions = static_cast<int>(r.get_int("experiment.repetitions", harness::is_mlp(c.model) ? 3 : 10));
    r.reject_unknown();
    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Config, e.what());
    }
    return c;
}

} // namespace dimlab::config

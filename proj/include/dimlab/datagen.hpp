#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dimlab/linalg.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/solvers.hpp"

namespace dimlab::datagen {

using solvers::FrameSpec;

enum class Family { LinSepTeacher, GaussianMixture, CorruptedRegression };

constexpr std::string_view to_string(Family f) {
    switch (f) {
    case Family::LinSepTeacher: return "linsep";
    case Family::GaussianMixture: return "mixture";
    case Family::CorruptedRegression: return "corrupted_regression";
    }
    return "unknown";
}

inline std::optional<Family> parse_family(std::string_view s) {
    if (s == "linsep") return Family::LinSepTeacher;
    if (s == "mixture") return Family::GaussianMixture;
    if (s == "corrupted_regression") return Family::CorruptedRegression;
    return std::nullopt;
}

constexpr bool is_classification(Family f) { return f != Family::CorruptedRegression; }

/// Row counts of the three input blocks. Inputs are always stored in the
/// order [minimal | unrelated | related].
struct Layout {
    Eigen::Index p_minimal = 0;
    Eigen::Index d_unrelated = 0;
    Eigen::Index d_related = 0;

    Eigen::Index total() const { return p_minimal + d_unrelated + d_related; }
    Eigen::Index unnecessary() const { return d_unrelated + d_related; }
    /// Fraction of unnecessary dimensions that are task-related (0 if none).
    double nu() const {
        const Eigen::Index d = unnecessary();
        return d == 0 ? 0.0 : static_cast<double>(d_related) / static_cast<double>(d);
    }
    bool operator==(const Layout&) const = default;
};

struct Dataset {
    Matrix inputs;  // layout.total() x n
    Matrix targets; // o x n (one-hot for classification families)
    std::optional<std::vector<int>> labels;
    Layout layout;
    std::uint64_t seed = 0;
    Family family = Family::LinSepTeacher;
    /// Mixture component index per sample; empty for other families.
    std::vector<int> components;

    Eigen::Index n() const { return inputs.cols(); }
    Eigen::Index output_dim() const { return targets.rows(); }

    auto minimal() const { return inputs.topRows(layout.p_minimal); }
    auto unrelated() const { return inputs.middleRows(layout.p_minimal, layout.d_unrelated); }
    auto related() const { return inputs.bottomRows(layout.d_related); }

    /// Columns [begin, begin + count) as a new dataset with the same layout.
    Dataset slice(Eigen::Index begin, Eigen::Index count) const {
        require(begin >= 0 && count >= 0 && begin + count <= n(), ErrorCode::InvalidArgument,
                "slice out of range");
        Dataset out;
        out.inputs = inputs.middleCols(begin, count);
        out.targets = targets.middleCols(begin, count);
        if (labels) out.labels = std::vector<int>(labels->begin() + begin, labels->begin() + begin + count);
        if (!components.empty())
            out.components = std::vector<int>(components.begin() + begin, components.begin() + begin + count);
        out.layout = layout;
        out.seed = seed;
        out.family = family;
        return out;
    }

    /// Throws DimensionMismatch/InvalidArgument if the bookkeeping is off.
    void validate() const {
        require(layout.total() == inputs.rows(), ErrorCode::DimensionMismatch, "layout does not sum to input rows");
        require_cols(inputs, targets, "dataset");
        require(labels.has_value() == is_classification(family), ErrorCode::InvalidArgument,
                "labels must be present exactly for classification families");
        if (labels) {
            require(static_cast<Eigen::Index>(labels->size()) == n(), ErrorCode::DimensionMismatch,
                    "label count differs from sample count");
            for (int l : *labels)
                require(l >= 0 && l < output_dim(), ErrorCode::InvalidArgument, "label out of range");
        }
    }
};

struct TeacherSpec {
    Eigen::Index p = 30;
    Eigen::Index o = 2;
    Matrix weights; // o x p
};

/// Linear teacher with standard Gaussian weights.
inline TeacherSpec make_teacher(Eigen::Index p, Eigen::Index o, std::uint64_t seed) {
    require(p >= 1, ErrorCode::InvalidDim, "teacher needs p >= 1");
    require(o >= 2, ErrorCode::InvalidDim, "teacher needs o >= 2");
    Engine eng = make_stream(seed, "teacher");
    return {p, o, gaussian_matrix(o, p, 1.0, eng)};
}

namespace detail {

inline std::vector<int> argmax_labels(const Matrix& outputs) {
    std::vector<int> labels(static_cast<std::size_t>(outputs.cols()));
    for (Eigen::Index j = 0; j < outputs.cols(); ++j)
        labels[static_cast<std::size_t>(j)] = static_cast<int>(argmax(outputs.col(j)));
    return labels;
}

inline Matrix one_hot(const std::vector<int>& labels, Eigen::Index classes) {
    Matrix t = Matrix::Zero(classes, static_cast<Eigen::Index>(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j) t(labels[j], static_cast<Eigen::Index>(j)) = 1.0;
    return t;
}

} // namespace detail

/// Samples n standard Gaussian inputs and labels them with the argmax of the
/// teacher outputs. Targets are stored one-hot.
inline Dataset sample_linsep(const TeacherSpec& teacher, Eigen::Index n, std::uint64_t seed) {
    require(n >= 1, ErrorCode::InvalidDim, "sample_linsep needs n >= 1");
    require(teacher.weights.rows() == teacher.o && teacher.weights.cols() == teacher.p, ErrorCode::DimensionMismatch,
            "teacher weights do not match (o, p)");
    Engine eng = make_stream(seed, "inputs");
    Dataset ds;
    ds.inputs = gaussian_matrix(teacher.p, n, 1.0, eng);
    ds.labels = detail::argmax_labels(teacher.weights * ds.inputs);
    ds.targets = detail::one_hot(*ds.labels, teacher.o);
    ds.layout = {teacher.p, 0, 0};
    ds.seed = seed;
    ds.family = Family::LinSepTeacher;
    return ds;
}

/// Distribution of the appended task-unrelated block.
struct NoiseSpec {
    struct GaussianIID {
        double sigma = 0.1;
    };
    /// Equicorrelated Gaussian: Sigma_ii = variance, Sigma_ij = covariance.
    struct GaussianCorrelated {
        double variance = 1.0;
        double covariance = 0.5;
    };
    /// Each component is u with probability `prob`, else 0. The sign of
    /// u = +-magnitude is drawn once per dataset.
    struct SaltPepper {
        double magnitude = 1.0;
        double prob = 0.5;
    };
    using Kind = std::variant<GaussianIID, GaussianCorrelated, SaltPepper>;

    Kind kind = GaussianIID{};
    Eigen::Index d = 0;

    void validate() const {
        require(d >= 0, ErrorCode::InvalidDim, "noise d must be >= 0");
        std::visit(
            [](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, GaussianIID>) {
                    require(k.sigma > 0.0, ErrorCode::InvalidArgument, "GaussianIID needs sigma > 0");
                } else if constexpr (std::is_same_v<K, GaussianCorrelated>) {
                    require(k.variance > 0.0, ErrorCode::InvalidArgument, "GaussianCorrelated needs variance > 0");
                    require(k.covariance >= 0.0 && k.covariance <= k.variance, ErrorCode::InvalidArgument,
                            "GaussianCorrelated needs 0 <= covariance <= variance");
                } else {
                    require(k.magnitude > 0.0, ErrorCode::InvalidArgument, "SaltPepper needs magnitude > 0");
                    require(k.prob > 0.0 && k.prob < 1.0, ErrorCode::InvalidArgument, "SaltPepper needs prob in (0,1)");
                }
            },
            kind);
    }
};

/// Draws a d x n noise block column by column.
inline Matrix sample_noise(const NoiseSpec& spec, Eigen::Index n, std::uint64_t seed) {
    spec.validate();
    Engine eng = make_stream(seed, "unrelated");
    const Eigen::Index d = spec.d;
    return std::visit(
        [&](const auto& k) -> Matrix {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, NoiseSpec::GaussianIID>) {
                return gaussian_matrix(d, n, k.sigma, eng);
            } else if constexpr (std::is_same_v<K, NoiseSpec::GaussianCorrelated>) {
                // x_i = s (sqrt(rho) z_0 + sqrt(1 - rho) z_i) with rho = cov / var.
                const double s = std::sqrt(k.variance);
                const double rho = k.covariance / k.variance;
                const double shared = std::sqrt(rho);
                const double own = std::sqrt(1.0 - rho);
                std::normal_distribution<double> normal(0.0, 1.0);
                Matrix m(d, n);
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double z0 = normal(eng);
                    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = s * (shared * z0 + own * normal(eng));
                }
                return m;
            } else {
                std::bernoulli_distribution sign(0.5);
                const double u = sign(eng) ? k.magnitude : -k.magnitude;
                std::bernoulli_distribution on(k.prob);
                Matrix m(d, n);
                for (Eigen::Index j = 0; j < n; ++j)
                    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = on(eng) ? u : 0.0;
                return m;
            }
        },
        spec.kind);
}

/// Appends d task-unrelated rows; they are placed after the minimal block
/// and before any related block. Targets and labels are untouched.
inline Dataset append_unrelated(const Dataset& ds, const NoiseSpec& spec, std::uint64_t seed) {
    require(ds.layout.d_unrelated == 0, ErrorCode::DoubleAugmentation, "dataset already has an unrelated block");
    if (spec.d == 0) return ds;
    const Matrix noise = sample_noise(spec, ds.n(), seed);
    Dataset out = ds;
    out.inputs.resize(ds.layout.total() + spec.d, ds.n());
    out.inputs.topRows(ds.layout.p_minimal) = ds.minimal();
    out.inputs.middleRows(ds.layout.p_minimal, spec.d) = noise;
    if (ds.layout.d_related > 0) out.inputs.bottomRows(ds.layout.d_related) = ds.related();
    out.layout.d_unrelated = spec.d;
    return out;
}

/// Appends the rows T x for the frame's related block T.
inline Dataset append_related(const Dataset& ds, const FrameSpec& frame) {
    require(frame.p() == ds.layout.p_minimal, ErrorCode::DimensionMismatch,
            "frame p = " + std::to_string(frame.p()) + " but dataset has p_minimal = " +
                std::to_string(ds.layout.p_minimal));
    require(ds.layout.d_related == 0, ErrorCode::DoubleAugmentation, "dataset already has a related block");
    const Matrix t = frame.related_block();
    if (t.rows() == 0) return ds;
    Dataset out = ds;
    out.inputs.conservativeResize(ds.layout.total() + t.rows(), Eigen::NoChange);
    out.inputs.bottomRows(t.rows()) = t * ds.minimal();
    out.layout.d_related = t.rows();
    return out;
}

/// Two-class mixture with three Gaussian components per class.
struct MixtureSpec {
    Eigen::Index p = 30;
    int components_per_class = 3;
    int class_count = 2;
    std::vector<Vector> means;   // indexed class * components_per_class + component
    std::vector<Vector> stddevs; // diagonal standard deviations, same indexing

    /// Default component means on the coordinate axes, arranged so no
    /// hyperplane separates the classes:
    ///   class 0: +s e0, -s e0, +s e2      class 1: +s e1, -s e1, -s e2
    /// with unit diagonal covariance.
    static MixtureSpec defaults(Eigen::Index p = 30, double mean_scale = 4.0) {
        require(p >= 3, ErrorCode::InvalidDim, "mixture defaults need p >= 3");
        MixtureSpec spec;
        spec.p = p;
        auto axis = [p](Eigen::Index i, double v) {
            Vector m = Vector::Zero(p);
            m[i] = v;
            return m;
        };
        const double s = mean_scale;
        spec.means = {axis(0, s), axis(0, -s), axis(2, s), axis(1, s), axis(1, -s), axis(2, -s)};
        spec.stddevs.assign(6, Vector::Ones(p));
        return spec;
    }

    void validate() const {
        require(components_per_class == 3, ErrorCode::InvalidArgument, "mixture needs exactly 3 components per class");
        require(class_count >= 2, ErrorCode::InvalidArgument, "mixture needs at least 2 classes");
        const std::size_t total = static_cast<std::size_t>(components_per_class * class_count);
        require(means.size() == total && stddevs.size() == total, ErrorCode::InvalidArgument,
                "mixture needs one mean and one stddev vector per component");
        for (std::size_t i = 0; i < total; ++i) {
            require(means[i].size() == p && stddevs[i].size() == p, ErrorCode::DimensionMismatch,
                    "mixture component vectors must have length p");
            require((stddevs[i].array() > 0.0).all(), ErrorCode::InvalidArgument, "mixture stddevs must be > 0");
        }
    }
};

/// Sample j belongs to class j % class_count, so any prefix of the dataset is
/// class-balanced up to one sample.
inline Dataset sample_mixture(const MixtureSpec& spec, Eigen::Index n_per_class, std::uint64_t seed) {
    spec.validate();
    require(n_per_class >= 1, ErrorCode::InvalidDim, "sample_mixture needs n_per_class >= 1");
    const Eigen::Index n = n_per_class * spec.class_count;
    Engine eng = make_stream(seed, "inputs");
    std::uniform_int_distribution<int> pick(0, spec.components_per_class - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset ds;
    ds.inputs.resize(spec.p, n);
    ds.labels = std::vector<int>(static_cast<std::size_t>(n));
    ds.components.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const int cls = static_cast<int>(j % spec.class_count);
        const int comp = pick(eng);
        const std::size_t idx = static_cast<std::size_t>(cls * spec.components_per_class + comp);
        for (Eigen::Index i = 0; i < spec.p; ++i)
            ds.inputs(i, j) = spec.means[idx][i] + spec.stddevs[idx][i] * normal(eng);
        (*ds.labels)[static_cast<std::size_t>(j)] = cls;
        ds.components[static_cast<std::size_t>(j)] = comp;
    }
    ds.targets = detail::one_hot(*ds.labels, spec.class_count);
    ds.layout = {spec.p, 0, 0};
    ds.seed = seed;
    ds.family = Family::GaussianMixture;
    return ds;
}

struct CorruptedRegressionSpec {
    Eigen::Index p = 10;
    Eigen::Index o = 4;
    Eigen::Index d = 500;
    Eigen::Index n = 7;
    double sigma_input = 1.0;
    double sigma_output = 0.0;
};

/// Regression data y = W* x + eps with x ~ N(0, sigma_input^2),
/// eps ~ N(0, sigma_output^2) and a GaussianIID(sigma_input) unrelated block
/// (unless `unrelated` overrides it).
inline Dataset make_corrupted_regression(const CorruptedRegressionSpec& spec, std::uint64_t seed,
                                         const std::optional<NoiseSpec>& unrelated = std::nullopt) {
    require(spec.p >= 1 && spec.o >= 1 && spec.n >= 1 && spec.d >= 0, ErrorCode::InvalidDim,
            "corrupted regression needs p, o, n >= 1 and d >= 0");
    require(spec.sigma_input > 0.0, ErrorCode::InvalidArgument, "sigma_input must be > 0");
    require(spec.sigma_output >= 0.0, ErrorCode::InvalidArgument, "sigma_output must be >= 0");
    Engine teacher_eng = make_stream(seed, "teacher");
    const Matrix w = gaussian_matrix(spec.o, spec.p, 1.0, teacher_eng);
    Engine input_eng = make_stream(seed, "inputs");
    Engine eps_eng = make_stream(seed, "output_noise");
    Dataset ds;
    ds.inputs = gaussian_matrix(spec.p, spec.n, spec.sigma_input, input_eng);
    ds.targets = w * ds.inputs;
    if (spec.sigma_output > 0.0) ds.targets += gaussian_matrix(spec.o, spec.n, spec.sigma_output, eps_eng);
    ds.layout = {spec.p, 0, 0};
    ds.seed = seed;
    ds.family = Family::CorruptedRegression;
    NoiseSpec noise = unrelated.value_or(NoiseSpec{NoiseSpec::GaussianIID{spec.sigma_input}, spec.d});
    return append_unrelated(ds, noise, seed);
}

/// Unit-scale draws behind make_corrupted_regression with Gaussian iid
/// unrelated noise. Scaling them reproduces that dataset bit for bit for any
/// (sigma_input, sigma_output), so sigma sweeps draw once per seed.
struct RegressionDraws {
    Matrix teacher;      // o x p
    Matrix inputs;       // p x n
    Matrix output_noise; // o x n
    Matrix unrelated;    // d x n
    std::uint64_t seed = 0;

    Dataset scaled(double sigma_input, double sigma_output) const {
        require(sigma_input > 0.0, ErrorCode::InvalidArgument, "sigma_input must be > 0");
        require(sigma_output >= 0.0, ErrorCode::InvalidArgument, "sigma_output must be >= 0");
        const Eigen::Index p = inputs.rows(), d = unrelated.rows();
        const Matrix x = sigma_input * inputs;
        Dataset ds;
        ds.targets = teacher * x;
        ds.inputs.resize(p + d, inputs.cols());
        ds.inputs.topRows(p) = x;
        ds.inputs.bottomRows(d) = sigma_input * unrelated;
        if (sigma_output > 0.0) ds.targets += sigma_output * output_noise;
        ds.layout = {p, d, 0};
        ds.seed = seed;
        ds.family = Family::CorruptedRegression;
        return ds;
    }
};

inline RegressionDraws regression_draws(const CorruptedRegressionSpec& spec, std::uint64_t seed) {
    require(spec.p >= 1 && spec.o >= 1 && spec.n >= 1 && spec.d >= 0, ErrorCode::InvalidDim,
            "corrupted regression needs p, o, n >= 1 and d >= 0");
    Engine teacher_eng = make_stream(seed, "teacher");
    Engine input_eng = make_stream(seed, "inputs");
    Engine eps_eng = make_stream(seed, "output_noise");
    Engine noise_eng = make_stream(seed, "unrelated");
    RegressionDraws r;
    r.teacher = gaussian_matrix(spec.o, spec.p, 1.0, teacher_eng);
    r.inputs = gaussian_matrix(spec.p, spec.n, 1.0, input_eng);
    r.output_noise = gaussian_matrix(spec.o, spec.n, 1.0, eps_eng);
    r.unrelated = gaussian_matrix(spec.d, spec.n, 1.0, noise_eng);
    r.seed = seed;
    return r;
}

/// The teacher used by make_corrupted_regression for a given seed.
inline Matrix corrupted_regression_teacher(const CorruptedRegressionSpec& spec, std::uint64_t seed) {
    Engine teacher_eng = make_stream(seed, "teacher");
    return gaussian_matrix(spec.o, spec.p, 1.0, teacher_eng);
}

} // namespace dimlab::datagen

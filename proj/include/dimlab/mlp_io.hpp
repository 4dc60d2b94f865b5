#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "dimlab/dataset_io.hpp"
#include "dimlab/mlp.hpp"

/// Checkpoint layout (host byte order):
///   magic "DIMLABMP" | u32 version | u8 activation | u8 loss
///   | i64 input_dim, hidden_dim, output_dim
///   | f64 w1 (hidden x input, column-major) | f64 b1 | f64 w2 (column-major) | f64 b2
namespace dimlab::mlp {

namespace detail {
inline constexpr char kCheckpointMagic[8] = {'D', 'I', 'M', 'L', 'A', 'B', 'M', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_doubles(std::ostream& os, const double* data, Eigen::Index count) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

inline void read_doubles(std::istream& is, double* data, Eigen::Index count) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    require(bool(is), ErrorCode::Io, "truncated checkpoint");
}
} // namespace detail

inline void save_checkpoint(const Mlp& m, std::ostream& os) {
    using datagen::detail::put;
    os.write(detail::kCheckpointMagic, sizeof(detail::kCheckpointMagic));
    put(os, detail::kCheckpointVersion);
    put(os, static_cast<std::uint8_t>(m.config.activation));
    put(os, static_cast<std::uint8_t>(m.config.loss));
    put(os, static_cast<std::int64_t>(m.config.input_dim));
    put(os, static_cast<std::int64_t>(m.config.hidden_dim));
    put(os, static_cast<std::int64_t>(m.config.output_dim));
    detail::write_doubles(os, m.w1.data(), m.w1.size());
    detail::write_doubles(os, m.b1.data(), m.b1.size());
    detail::write_doubles(os, m.w2.data(), m.w2.size());
    detail::write_doubles(os, m.b2.data(), m.b2.size());
}

inline void save_checkpoint(const Mlp& m, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    save_checkpoint(m, os);
    require(bool(os), ErrorCode::Io, "write failed: " + path.string());
}

inline Mlp load_checkpoint(std::istream& is) {
    using datagen::detail::get;
    char magic[8];
    is.read(magic, sizeof(magic));
    require(bool(is) && std::memcmp(magic, detail::kCheckpointMagic, sizeof(magic)) == 0, ErrorCode::Io,
            "not a dimlab checkpoint");
    require(get<std::uint32_t>(is) == detail::kCheckpointVersion, ErrorCode::Io, "unsupported checkpoint version");
    Mlp m;
    const auto act = get<std::uint8_t>(is);
    const auto los = get<std::uint8_t>(is);
    require(act <= 1 && los <= 1, ErrorCode::Io, "bad activation/loss tag");
    m.config.activation = static_cast<Activation>(act);
    m.config.loss = static_cast<Loss>(los);
    m.config.input_dim = get<std::int64_t>(is);
    m.config.hidden_dim = get<std::int64_t>(is);
    m.config.output_dim = get<std::int64_t>(is);
    m.config.validate();
    m.w1.resize(m.config.hidden_dim, m.config.input_dim);
    m.b1.resize(m.config.hidden_dim);
    m.w2.resize(m.config.output_dim, m.config.hidden_dim);
    m.b2.resize(m.config.output_dim);
    detail::read_doubles(is, m.w1.data(), m.w1.size());
    detail::read_doubles(is, m.b1.data(), m.b1.size());
    detail::read_doubles(is, m.w2.data(), m.w2.size());
    detail::read_doubles(is, m.b2.data(), m.b2.size());
    return m;
}

inline Mlp load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), ErrorCode::Io, "cannot open " + path.string());
    return load_checkpoint(is);
}

/// CSV with columns epoch,train_loss,val_loss,lr.
inline void write_history_csv(const std::vector<EpochRecord>& history, std::ostream& os) {
    using datagen::format_real;
    os << "epoch,train_loss,val_loss,lr\n";
    for (const auto& r : history)
        os << r.epoch << "," << format_real(r.train_loss) << "," << format_real(r.val_loss) << "," << format_real(r.lr)
           << "\n";
}

} // namespace dimlab::mlp

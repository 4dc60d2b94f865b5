#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dimlab/datagen.hpp"

/// Dataset serialization.
///
/// CSV layout: one row per sample. An optional first line starting with '#'
/// carries provenance (`# dimlab-dataset v1 family=linsep seed=7 rng=1`). The
/// header names each column by role and index:
///
///   minimal_0..minimal_{p-1}, unrelated_0.., related_0.., target_0.., label
///
/// The `label` column is present only for classification families. Reals are
/// written in shortest round-trip form, so write -> read is lossless.
///
/// Binary cache (little-endian, host order):
///   magic "DIMLABDS" | u32 version | u64 fingerprint | u8 family | u64 seed
///   | i64 p, d_unrelated, d_related, o, n | u8 has_labels
///   | f64 inputs (column-major) | f64 targets (column-major) | i32 labels
namespace dimlab::datagen {

inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::Io,
            "not a number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline void write_csv(const Dataset& ds, std::ostream& os) {
    ds.validate();
    os << "# dimlab-dataset v1 family=" << to_string(ds.family) << " seed=" << ds.seed << " rng=" << kRngVersion
       << "\n";
    std::vector<std::string> header;
    for (Eigen::Index i = 0; i < ds.layout.p_minimal; ++i) header.push_back("minimal_" + std::to_string(i));
    for (Eigen::Index i = 0; i < ds.layout.d_unrelated; ++i) header.push_back("unrelated_" + std::to_string(i));
    for (Eigen::Index i = 0; i < ds.layout.d_related; ++i) header.push_back("related_" + std::to_string(i));
    for (Eigen::Index i = 0; i < ds.output_dim(); ++i) header.push_back("target_" + std::to_string(i));
    if (ds.labels) header.push_back("label");
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (Eigen::Index j = 0; j < ds.n(); ++j) {
        for (Eigen::Index i = 0; i < ds.inputs.rows(); ++i) os << (i ? "," : "") << format_real(ds.inputs(i, j));
        for (Eigen::Index i = 0; i < ds.targets.rows(); ++i) os << "," << format_real(ds.targets(i, j));
        if (ds.labels) os << "," << (*ds.labels)[static_cast<std::size_t>(j)];
        os << "\n";
    }
}

inline void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    write_csv(ds, os);
    require(bool(os), ErrorCode::Io, "write failed: " + path.string());
}

inline Dataset read_csv(std::istream& is) {
    Dataset ds;
    std::string line;
    require(bool(std::getline(is, line)), ErrorCode::Io, "empty dataset file");
    if (!line.empty() && line[0] == '#') {
        std::istringstream meta(line.substr(1));
        std::string tok;
        while (meta >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "family") {
                auto f = parse_family(val);
                require(f.has_value(), ErrorCode::Io, "unknown family '" + val + "'");
                ds.family = *f;
            } else if (key == "seed") {
                ds.seed = std::stoull(val);
            }
        }
        require(bool(std::getline(is, line)), ErrorCode::Io, "missing CSV header");
    }
    const auto header = split_csv_line(line);
    enum class Role { Minimal, Unrelated, Related, Target, Label };
    std::vector<Role> roles;
    Eigen::Index counts[4] = {0, 0, 0, 0};
    bool has_label = false;
    for (const auto& h : header) {
        if (h.rfind("minimal_", 0) == 0) roles.push_back(Role::Minimal), ++counts[0];
        else if (h.rfind("unrelated_", 0) == 0) roles.push_back(Role::Unrelated), ++counts[1];
        else if (h.rfind("related_", 0) == 0) roles.push_back(Role::Related), ++counts[2];
        else if (h.rfind("target_", 0) == 0) roles.push_back(Role::Target), ++counts[3];
        else if (h == "label") roles.push_back(Role::Label), has_label = true;
        else fail(ErrorCode::Io, "unknown column '" + h + "'");
    }
    for (std::size_t i = 1; i < roles.size(); ++i)
        require(roles[i - 1] <= roles[i], ErrorCode::Io, "columns must be ordered minimal, unrelated, related, target, label");
    ds.layout = {counts[0], counts[1], counts[2]};
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        require(cells.size() == roles.size(), ErrorCode::Io,
                "row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(roles.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (roles[i] == Role::Label) labels.push_back(std::stoi(cells[i]));
            else row.push_back(parse_real(cells[i]));
        }
        rows.push_back(std::move(row));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index in_dim = ds.layout.total();
    ds.inputs.resize(in_dim, n);
    ds.targets.resize(counts[3], n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& row = rows[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < in_dim; ++i) ds.inputs(i, j) = row[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i < counts[3]; ++i) ds.targets(i, j) = row[static_cast<std::size_t>(in_dim + i)];
    }
    if (has_label) ds.labels = std::move(labels);
    if (!has_label && ds.family != Family::CorruptedRegression) ds.family = Family::CorruptedRegression;
    ds.validate();
    return ds;
}

inline Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), ErrorCode::Io, "cannot open " + path.string());
    return read_csv(is);
}

namespace detail {

inline constexpr char kBinaryMagic[8] = {'D', 'I', 'M', 'L', 'A', 'B', 'D', 'S'};
inline constexpr std::uint32_t kBinaryVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(bool(is), ErrorCode::Io, "truncated binary dataset");
    return v;
}

} // namespace detail

inline void write_binary(const Dataset& ds, std::uint64_t fingerprint, std::ostream& os) {
    ds.validate();
    os.write(detail::kBinaryMagic, sizeof(detail::kBinaryMagic));
    detail::put(os, detail::kBinaryVersion);
    detail::put(os, fingerprint);
    detail::put(os, static_cast<std::uint8_t>(ds.family));
    detail::put(os, ds.seed);
    for (std::int64_t v : {std::int64_t(ds.layout.p_minimal), std::int64_t(ds.layout.d_unrelated),
                           std::int64_t(ds.layout.d_related), std::int64_t(ds.output_dim()), std::int64_t(ds.n())})
        detail::put(os, v);
    detail::put(os, static_cast<std::uint8_t>(ds.labels ? 1 : 0));
    os.write(reinterpret_cast<const char*>(ds.inputs.data()),
             static_cast<std::streamsize>(ds.inputs.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(ds.targets.data()),
             static_cast<std::streamsize>(ds.targets.size() * sizeof(double)));
    if (ds.labels)
        for (int l : *ds.labels) detail::put(os, static_cast<std::int32_t>(l));
}

inline void write_binary(const Dataset& ds, std::uint64_t fingerprint, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    write_binary(ds, fingerprint, os);
    require(bool(os), ErrorCode::Io, "write failed: " + path.string());
}

struct BinaryDataset {
    Dataset dataset;
    std::uint64_t fingerprint = 0;
};

/// Reads a binary cache. If `expected_fingerprint` is given and differs from
/// the embedded one, the cache is stale and an Io error is raised.
inline BinaryDataset read_binary(std::istream& is, std::optional<std::uint64_t> expected_fingerprint = std::nullopt) {
    char magic[8];
    is.read(magic, sizeof(magic));
    require(bool(is) && std::memcmp(magic, detail::kBinaryMagic, sizeof(magic)) == 0, ErrorCode::Io,
            "not a dimlab binary dataset");
    const auto version = detail::get<std::uint32_t>(is);
    require(version == detail::kBinaryVersion, ErrorCode::Io, "unsupported binary version " + std::to_string(version));
    BinaryDataset out;
    out.fingerprint = detail::get<std::uint64_t>(is);
    if (expected_fingerprint)
        require(*expected_fingerprint == out.fingerprint, ErrorCode::Io, "binary dataset fingerprint mismatch");
    Dataset& ds = out.dataset;
    const auto family = detail::get<std::uint8_t>(is);
    require(family <= 2, ErrorCode::Io, "bad family tag");
    ds.family = static_cast<Family>(family);
    ds.seed = detail::get<std::uint64_t>(is);
    const auto p = detail::get<std::int64_t>(is);
    const auto du = detail::get<std::int64_t>(is);
    const auto dr = detail::get<std::int64_t>(is);
    const auto o = detail::get<std::int64_t>(is);
    const auto n = detail::get<std::int64_t>(is);
    require(p >= 0 && du >= 0 && dr >= 0 && o >= 0 && n >= 0, ErrorCode::Io, "negative dimension in header");
    const bool has_labels = detail::get<std::uint8_t>(is) != 0;
    ds.layout = {p, du, dr};
    ds.inputs.resize(p + du + dr, n);
    ds.targets.resize(o, n);
    is.read(reinterpret_cast<char*>(ds.inputs.data()), static_cast<std::streamsize>(ds.inputs.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(ds.targets.data()),
            static_cast<std::streamsize>(ds.targets.size() * sizeof(double)));
    require(bool(is), ErrorCode::Io, "truncated binary dataset");
    if (has_labels) {
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& l : labels) l = detail::get<std::int32_t>(is);
        ds.labels = std::move(labels);
    }
    ds.validate();
    return out;
}

inline BinaryDataset read_binary(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> expected_fingerprint = std::nullopt) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), ErrorCode::Io, "cannot open " + path.string());
    return read_binary(is, expected_fingerprint);
}

} // namespace dimlab::datagen

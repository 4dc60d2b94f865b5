#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "dimlab/linalg.hpp"

namespace dimlab {

/// Seeded random streams.
///
/// Every generator draws from a std::mt19937_64 whose seed is derived from a
/// parent seed and a stream label ("inputs", "unrelated", "frame", ...). Two
/// streams with different labels are statistically independent, so appending
/// a noise block never shifts the draws of the base samples. Bump
/// kRngVersion whenever the derivation or any draw order changes; it is part
/// of every dataset fingerprint.
inline constexpr std::uint32_t kRngVersion = 1;

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
    return splitmix64(parent ^ splitmix64(fnv1a64(label)));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index) {
    return splitmix64(derive_seed(parent, label) + splitmix64(index + 1));
}

inline Engine make_stream(std::uint64_t parent, std::string_view label) {
    return Engine(derive_seed(parent, label));
}

/// Fills a rows x cols matrix with i.i.d. N(0, sigma^2) entries, column by
/// column, so the first k columns do not depend on how many follow.
inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sigma, Engine& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = sigma * normal(eng);
    return m;
}

inline Vector gaussian_vector(Eigen::Index n, double sigma, Engine& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = sigma * normal(eng);
    return v;
}

} // namespace dimlab

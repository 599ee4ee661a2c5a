#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace semsar {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Sub-seed for one stage of one iteration: mixes the master seed with a
/// stage tag ("icm", "noise", ...) and an index.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(master ^ fnv1a(stage)) + index);
}

/// Unbiased integer in [0, n) built from raw engine output only, so results
/// do not depend on the standard library's distribution implementations.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

/// k distinct indices from [0, n), sorted ascending.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

} // namespace semsar

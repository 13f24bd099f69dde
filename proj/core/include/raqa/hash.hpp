#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace raqa {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

/// Per-call RNG stream keyed by (run seed, example id, step index) so
/// concurrent examples draw independent, reproducible sequences.
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::string_view example_id,
                                  std::uint64_t step_index) {
    std::uint64_t h = fnv1a64(seed, kFnvOffset);
    h = fnv1a64(example_id, h);
    h = fnv1a64(step_index, h);
    return std::mt19937_64(h);
}

}  // namespace raqa

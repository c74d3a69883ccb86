#pragma once

// Counter-based pseudo-random stream.
//
// Output k of a stream keyed by `key` is mix64(key + (k + 1) * 0x9E3779B97F4A7C15),
// i.e. the SplitMix64 sequence. Any draw can be reproduced from (key, counter)
// alone, and independent streams are keyed with derive_seed(). Normals use the
// Box-Muller transform on two consecutive uniforms; uniforms take the top 53
// bits of an output and are shifted into the open interval (0, 1).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mixlasso {

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Stream key for child `index` of `parent` (e.g. trial index under the master seed).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Stream key for a named child stream ("design", "noise", ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;

    /// Uniform integer in [0, bound) by rejection; bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;

    /// Uniform on {-1, +1}.
    double sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mixlasso

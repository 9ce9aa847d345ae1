#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orl {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// SplitMix64 finalizer; a bijective scrambler for counters and seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent named stream derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t base, std::string_view stream) {
  return Rng(derive_seed(base, stream));
}

/// Lower-case hex rendering of a 64-bit value, zero padded to 16 chars.
std::string hex64(std::uint64_t value);

/// Draws `count` distinct indices from [0, population) in draw order.
void sample_without_replacement(Rng& rng, std::size_t population, std::size_t count,
                                std::vector<std::size_t>& out);

}  // namespace orl

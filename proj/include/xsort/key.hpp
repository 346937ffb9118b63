#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace xsort {

/// Sort keys are 64-bit and totally ordered: signed integers or non-NaN doubles.
template <class K>
concept SortKey = std::same_as<K, std::int64_t> || std::same_as<K, double>;

using Rng = std::mt19937_64;

inline constexpr bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline constexpr int log2_exact(std::uint64_t v) {
  int k = 0;
  while (v > 1) {
    v >>= 1;
    ++k;
  }
  return k;
}

}  // namespace xsort

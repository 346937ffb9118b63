#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "xsort/key.hpp"

namespace xsort {

enum class InputKind { perm, uniform_int, uniform_double };

InputKind parse_input_kind(std::string_view text);
std::string_view to_string(InputKind kind);

/// perm and uniform-int produce 64-bit integer keys, uniform-double doubles.
bool uses_double_keys(InputKind kind);

/// Sizes of the p contiguous blocks n elements are dealt into: the first
/// n mod p blocks get one extra element.
std::vector<std::size_t> block_sizes(std::uint64_t n, int p);

/// Generate n keys and deal them to p ranks in contiguous blocks.
///
/// perm: a seeded shuffle of 0..n-1. uniform-int / uniform-double: i.i.d. keys
/// in [0, key_range). The key sequence depends only on (kind, n, key_range,
/// seed), not on p.
template <SortKey K>
std::vector<std::vector<K>> gen_input(InputKind kind, std::uint64_t n, int p, double key_range,
                                      std::uint64_t seed);

}  // namespace xsort

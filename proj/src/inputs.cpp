#include "xsort/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xsort/error.hpp"

namespace xsort {

InputKind parse_input_kind(std::string_view text) {
  if (text == "perm") return InputKind::perm;
  if (text == "uniform-int") return InputKind::uniform_int;
  if (text == "uniform-double") return InputKind::uniform_double;
  throw ConfigError("unknown input kind '" + std::string(text) +
                    "' (expected perm|uniform-int|uniform-double)");
}

std::string_view to_string(InputKind kind) {
  switch (kind) {
    case InputKind::perm: return "perm";
    case InputKind::uniform_int: return "uniform-int";
    case InputKind::uniform_double: return "uniform-double";
  }
  return "unknown";
}

bool uses_double_keys(InputKind kind) { return kind == InputKind::uniform_double; }

std::vector<std::size_t> block_sizes(std::uint64_t n, int p) {
  if (p < 1) throw ConfigError("rank count must be positive");
  const auto up = static_cast<std::uint64_t>(p);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(p), static_cast<std::size_t>(n / up));
  for (std::uint64_t r = 0; r < n % up; ++r) ++sizes[r];
  return sizes;
}

template <SortKey K>
std::vector<std::vector<K>> gen_input(InputKind kind, std::uint64_t n, int p, double key_range,
                                      std::uint64_t seed) {
  if (uses_double_keys(kind) != std::is_floating_point_v<K>) {
    throw ConfigError("key type does not match input kind " + std::string(to_string(kind)));
  }
  Rng rng(seed);
  std::vector<K> keys(static_cast<std::size_t>(n));
  switch (kind) {
    case InputKind::perm:
      std::iota(keys.begin(), keys.end(), K{0});
      std::shuffle(keys.begin(), keys.end(), rng);
      break;
    case InputKind::uniform_int: {
      if (!(key_range >= 1.0)) throw ConfigError("key range must be at least 1");
      std::uniform_int_distribution<std::int64_t> dist(0, static_cast<std::int64_t>(key_range) - 1);
      for (auto& k : keys) k = static_cast<K>(dist(rng));
      break;
    }
    case InputKind::uniform_double: {
      if (!(key_range > 0.0)) throw ConfigError("key range must be positive");
      std::uniform_real_distribution<double> dist(0.0, key_range);
      for (auto& k : keys) {
        double x = dist(rng);
        // uniform_real_distribution may round up to the bound
        k = static_cast<K>(x < key_range ? x : std::nextafter(key_range, 0.0));
      }
      break;
    }
  }

  std::vector<std::vector<K>> blocks;
  blocks.reserve(static_cast<std::size_t>(p));
  auto at = keys.begin();
  for (auto len : block_sizes(n, p)) {
    blocks.emplace_back(at, at + static_cast<std::ptrdiff_t>(len));
    at += static_cast<std::ptrdiff_t>(len);
  }
  return blocks;
}

template std::vector<std::vector<std::int64_t>> gen_input<std::int64_t>(InputKind, std::uint64_t, int,
                                                                        double, std::uint64_t);
template std::vector<std::vector<double>> gen_input<double>(InputKind, std::uint64_t, int, double,
                                                            std::uint64_t);

}  // namespace xsort

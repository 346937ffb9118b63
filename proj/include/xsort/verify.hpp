#pragma once

#include <span>
#include <string>
#include <vector>

#include "xsort/key.hpp"

namespace xsort {

struct VerifyReport {
  bool sorted_ok = true;
  bool boundary_ok = true;
  bool multiset_ok = true;
  /// max over ranks of |m_i - n/p|.
  double imbalance = 0.0;

  bool ok() const { return sorted_ok && boundary_ok && multiset_ok; }
  std::string describe() const;
};

/// Check the distributed output contract: each rank's block sorted, blocks
/// ordered across ranks, and outputs a permutation of the inputs.
template <SortKey K>
VerifyReport verify(std::span<const std::vector<K>> inputs, std::span<const std::vector<K>> outputs);

/// Concatenation of the blocks in rank order.
template <SortKey K>
std::vector<K> concat(std::span<const std::vector<K>> blocks);

}  // namespace xsort

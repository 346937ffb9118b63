#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xsort/key.hpp"
#include "xsort/vcomm.hpp"

namespace xsort {

enum class PivotKind { interpolation, median_mean };

PivotKind parse_pivot_kind(std::string_view text);
std::string_view to_string(PivotKind kind);

struct PivotStrategy {
  PivotKind kind = PivotKind::interpolation;
  /// Elements sampled per unsorted segment. Must be at least 1.
  std::size_t sample_size = 20;
};

/// Global pivots for the active segments, identical on every rank of the group.
/// Slots no rank contributed to are flagged empty and hold the sentinel 0.
template <SortKey K>
struct PivotVector {
  std::vector<K> values;
  std::vector<bool> empty;

  std::size_t size() const { return values.size(); }
  bool operator==(const PivotVector&) const = default;
};

/// Local pivot candidate of one segment: (min, max) for interpolation, or
/// (median, median) for the median strategy. Invalid for empty segments.
template <SortKey K>
using Candidate = vcomm::MinMax<K>;

/// Sorted: the endpoints. Unsorted: min/max over `sample_size` positions drawn
/// uniformly with replacement (the whole buffer when it is not larger than that).
template <SortKey K>
Candidate<K> local_minmax(std::span<const K> a, bool sorted, std::size_t sample_size, Rng& rng);

/// Sorted: the middle element a[n/2]. Unsorted: the middle of a sorted sample.
template <SortKey K>
Candidate<K> local_median(std::span<const K> a, bool sorted, std::size_t sample_size, Rng& rng);

/// Candidate under `strategy`.
template <SortKey K>
Candidate<K> local_candidate(std::span<const K> a, bool sorted, const PivotStrategy& strategy, Rng& rng);

/// Overflow-free midpoint, gmin <= result <= gmax. Integer keys round down.
template <SortKey K>
K interpolate(K gmin, K gmax);

/// One collective for all slots: allreduce of (min, max) followed by
/// interpolation, or the mean of the valid ranks' medians.
template <SortKey K>
PivotVector<K> global_choose(vcomm::Comm& comm, std::span<const Candidate<K>> locals,
                             const PivotStrategy& strategy);

}  // namespace xsort

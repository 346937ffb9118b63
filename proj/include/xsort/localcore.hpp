#pragma once

// Sequential per-rank kernels. Pure functions over caller-owned buffers.

#include <cstddef>
#include <span>
#include <vector>

#include "xsort/key.hpp"
#include "xsort/segment_table.hpp"

namespace xsort {

/// Comparison sort into non-decreasing order.
template <SortKey K>
void local_sort(std::span<K> a);

/// Rearrange `a` in place so that a[0, n0) <= pivot <= a[n0, n) and return n0.
///
/// With L elements below the pivot and E equal to it, n0 = L + ceil(E/2): the
/// run of pivot-equal elements is split evenly, the extra one going left.
/// The rearrangement is stable within the less/equal/greater classes.
template <SortKey K>
std::size_t partition_even(std::span<K> a, K pivot);

/// Split point of a sorted buffer: lb + floor((ub - lb) / 2), where [lb, ub) is
/// the run of elements equal to `pivot`. O(log n) comparisons.
template <SortKey K>
std::size_t split_sorted(std::span<const K> a, K pivot);

/// Merge sorted runs with a binary heap over the run heads. Equal keys are
/// taken from the lower-indexed run first.
template <SortKey K>
std::vector<K> multiway_merge(std::span<const std::span<const K>> runs);

/// Cut `buffer` into consecutive runs of the given lengths.
template <SortKey K>
std::vector<std::span<const K>> runs_of(std::span<const K> buffer, std::span<const std::size_t> lengths);

template <SortKey K>
bool is_sorted(std::span<const K> a);

}  // namespace xsort

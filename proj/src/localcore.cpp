#include "xsort/localcore.hpp"

#include <algorithm>
#include <cstdint>

#include "xsort/error.hpp"

namespace xsort {

SegmentTable::SegmentTable(std::size_t slots, std::size_t n)
    : offsets_(slots, 0), lengths_(slots, 0), stride_(slots) {
  if (!is_power_of_two(slots)) throw_contract("SegmentTable: slot count must be a power of two");
  // Inactive slots sit at the end of their predecessor so the table stays ordered.
  lengths_[0] = n;
  std::fill(offsets_.begin() + 1, offsets_.end(), n);
}

SegmentTable SegmentTable::from_lengths(std::span<const std::size_t> lengths) {
  SegmentTable t;
  t.lengths_.assign(lengths.begin(), lengths.end());
  t.offsets_.resize(lengths.size());
  std::size_t at = 0;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    t.offsets_[j] = at;
    at += lengths[j];
  }
  t.stride_ = 1;
  return t;
}

std::vector<std::size_t> SegmentTable::active_slots() const {
  std::vector<std::size_t> out;
  if (stride_ == 0) return out;
  out.reserve(active_count());
  for (std::size_t i = 0; i < slots(); i += stride_) out.push_back(i);
  return out;
}

void SegmentTable::split(std::size_t slot, std::size_t n0) {
  if (stride_ < 2 || slot % stride_ != 0 || slot >= slots()) {
    throw_contract("SegmentTable::split: slot is not active or table is fully split");
  }
  if (n0 > lengths_[slot]) throw_contract("SegmentTable::split: cut beyond segment end");
  const auto tail = slot + stride_ / 2;
  offsets_[tail] = offsets_[slot] + n0;
  lengths_[tail] = lengths_[slot] - n0;
  lengths_[slot] = n0;
}

void SegmentTable::next_round() {
  if (stride_ < 2) throw_contract("SegmentTable::next_round: already fully split");
  stride_ /= 2;
}

bool SegmentTable::covers(std::size_t n) const {
  if (stride_ == 0) return n == 0 && slots() == 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < slots(); ++i) {
    if (i % stride_ != 0) {
      if (lengths_[i] != 0) return false;
      continue;
    }
    if (offsets_[i] != at) return false;
    at += lengths_[i];
  }
  return at == n;
}

template <SortKey K>
void local_sort(std::span<K> a) {
  std::sort(a.begin(), a.end());
}

template <SortKey K>
std::size_t partition_even(std::span<K> a, K pivot) {
  std::size_t less = 0;
  std::size_t equal = 0;
  for (const K& x : a) {
    if (x < pivot) {
      ++less;
    } else if (!(pivot < x)) {
      ++equal;
    }
  }
  if (less == 0 && equal == 0) return 0;
  if (less == a.size()) return less;

  std::vector<K> scratch(a.size());
  std::size_t lo = 0;
  std::size_t mid = less;
  std::size_t hi = less + equal;
  for (const K& x : a) {
    if (x < pivot) {
      scratch[lo++] = x;
    } else if (pivot < x) {
      scratch[hi++] = x;
    } else {
      scratch[mid++] = x;
    }
  }
  std::copy(scratch.begin(), scratch.end(), a.begin());
  return less + (equal + 1) / 2;
}

template <SortKey K>
std::size_t split_sorted(std::span<const K> a, K pivot) {
  const auto lb = std::lower_bound(a.begin(), a.end(), pivot);
  const auto ub = std::upper_bound(lb, a.end(), pivot);
  return static_cast<std::size_t>(lb - a.begin()) + static_cast<std::size_t>(ub - lb) / 2;
}

template <SortKey K>
std::vector<K> multiway_merge(std::span<const std::span<const K>> runs) {
  struct Head {
    K key;
    std::size_t run;
    std::size_t pos;
  };
  // std heap functions build a max-heap; invert so the smallest (key, run) is on top.
  auto after = [](const Head& x, const Head& y) {
    if (x.key < y.key) return false;
    if (y.key < x.key) return true;
    return x.run > y.run;
  };

  std::size_t total = 0;
  std::vector<Head> heap;
  heap.reserve(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    total += runs[r].size();
    if (!runs[r].empty()) heap.push_back(Head{runs[r][0], r, 0});
  }
  std::make_heap(heap.begin(), heap.end(), after);

  std::vector<K> out;
  out.reserve(total);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), after);
    Head& h = heap.back();
    out.push_back(h.key);
    if (++h.pos < runs[h.run].size()) {
      h.key = runs[h.run][h.pos];
      std::push_heap(heap.begin(), heap.end(), after);
    } else {
      heap.pop_back();
    }
  }
  return out;
}

template <SortKey K>
std::vector<std::span<const K>> runs_of(std::span<const K> buffer, std::span<const std::size_t> lengths) {
  std::vector<std::span<const K>> runs;
  runs.reserve(lengths.size());
  std::size_t at = 0;
  for (auto len : lengths) {
    if (at + len > buffer.size()) throw_contract("runs_of: lengths exceed buffer");
    runs.push_back(buffer.subspan(at, len));
    at += len;
  }
  return runs;
}

template <SortKey K>
bool is_sorted(std::span<const K> a) {
  return std::is_sorted(a.begin(), a.end());
}

#define XSORT_INSTANTIATE_LOCALCORE(K)                                                        \
  template void local_sort<K>(std::span<K>);                                                  \
  template std::size_t partition_even<K>(std::span<K>, K);                                    \
  template std::size_t split_sorted<K>(std::span<const K>, K);                                \
  template std::vector<K> multiway_merge<K>(std::span<const std::span<const K>>);             \
  template std::vector<std::span<const K>> runs_of<K>(std::span<const K>,                     \
                                                      std::span<const std::size_t>);          \
  template bool is_sorted<K>(std::span<const K>);

XSORT_INSTANTIATE_LOCALCORE(std::int64_t)
XSORT_INSTANTIATE_LOCALCORE(double)

}  // namespace xsort

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace xsort {

/// Ordered decomposition of one rank's local buffer into up to p contiguous
/// segments.
///
/// Slots are addressed 0..p-1. While the stride is k, only the slots that are
/// multiples of k are active; splitting slot i at stride k defines slot
/// i + k/2. Once the stride reaches 1 every slot is active and slot j holds
/// the elements destined for rank j.
class SegmentTable {
 public:
  SegmentTable() = default;

  /// One active segment (slot 0) covering [0, n). `slots` must be a power of two.
  SegmentTable(std::size_t slots, std::size_t n);

  /// Build a fully split table (stride 1) from explicit per-slot lengths.
  static SegmentTable from_lengths(std::span<const std::size_t> lengths);

  std::size_t slots() const { return offsets_.size(); }
  std::size_t stride() const { return stride_; }
  std::size_t active_count() const { return stride_ == 0 ? 0 : slots() / stride_; }

  std::size_t offset(std::size_t slot) const { return offsets_[slot]; }
  std::size_t length(std::size_t slot) const { return lengths_[slot]; }
  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const std::size_t> lengths() const { return lengths_; }

  /// Active slot indices in ascending (and therefore buffer) order.
  std::vector<std::size_t> active_slots() const;

  /// Cut the active segment at `slot` after its first `n0` elements.
  /// The tail becomes slot + stride/2. Requires stride > 1.
  void split(std::size_t slot, std::size_t n0);

  /// Halve the stride once every active segment of the current round is split.
  void next_round();

  /// Active segments are contiguous, in ascending order, and cover exactly
  /// [0, n); inactive slots are empty.
  bool covers(std::size_t n) const;

  template <class T>
  std::span<T> segment(std::span<T> buffer, std::size_t slot) const {
    return buffer.subspan(offsets_[slot], lengths_[slot]);
  }

  bool operator==(const SegmentTable&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> lengths_;
  std::size_t stride_ = 0;
};

}  // namespace xsort

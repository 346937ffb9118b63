#include "xsort/variants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "xsort/error.hpp"
#include "xsort/localcore.hpp"
#include "xsort/segment_table.hpp"

namespace xsort {

Variant parse_variant(std::string_view text) {
  for (auto v : all_variants()) {
    if (to_string(v) == text) return v;
  }
  throw ConfigError("unknown variant '" + std::string(text) +
                    "' (expected qsort|hyper|xfree-qsort|xfree-hyper|combined-qsort|combined-hyper)");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::qsort: return "qsort";
    case Variant::hyper: return "hyper";
    case Variant::xfree_qsort: return "xfree-qsort";
    case Variant::xfree_hyper: return "xfree-hyper";
    case Variant::combined_qsort: return "combined-qsort";
    case Variant::combined_hyper: return "combined-hyper";
  }
  return "unknown";
}

std::vector<Variant> all_variants() {
  return {Variant::qsort,       Variant::hyper,          Variant::xfree_qsort,
          Variant::xfree_hyper, Variant::combined_qsort, Variant::combined_hyper};
}

bool is_exchange_free(Variant v) { return v == Variant::xfree_qsort || v == Variant::xfree_hyper; }

bool debug_asserts_from_env() {
  const char* flag = std::getenv("XSORT_DEBUG_ASSERTS");
  return flag != nullptr && std::string_view(flag) == "1";
}

bool combined_guard(double c, int group_size, double per_rank_elements) {
  if (group_size < 2 || !(per_rank_elements > 0.0)) return false;
  const double denom = std::log2(static_cast<double>(group_size)) + std::log2(per_rank_elements);
  return per_rank_elements > c * group_size / denom;
}

namespace {

template <SortKey K>
void check_split(std::span<const K> a, std::size_t n0, K pivot, const char* where) {
  const auto left = a.first(n0);
  const auto right = a.subspan(n0);
  const bool ok = std::all_of(left.begin(), left.end(), [&](const K& x) { return !(pivot < x); }) &&
                  std::all_of(right.begin(), right.end(), [&](const K& x) { return !(x < pivot); });
  if (!ok) throw InvariantViolation(std::string(where) + ": elements on the wrong side of the pivot");
}

template <SortKey K>
void check_sorted(std::span<const K> a, const char* where) {
  if (!is_sorted(a)) throw InvariantViolation(std::string(where) + ": local buffer not sorted");
}

// After a partitioning round: every split respected its pivot, and the active
// segments are ordered (max of one <= min of the next non-empty one).
template <SortKey K>
void check_segments(const SegmentTable& table, std::span<const K> buf, std::span<const std::size_t> split_slots,
                    const PivotVector<K>& pv, std::size_t old_stride) {
  for (std::size_t j = 0; j < split_slots.size(); ++j) {
    if (pv.empty[j]) continue;
    const auto lo = table.segment(buf, split_slots[j]);
    const auto hi = table.segment(buf, split_slots[j] + old_stride / 2);
    const K pivot = pv.values[j];
    const bool ok = std::all_of(lo.begin(), lo.end(), [&](const K& x) { return !(pivot < x); }) &&
                    std::all_of(hi.begin(), hi.end(), [&](const K& x) { return !(x < pivot); });
    if (!ok) throw InvariantViolation("exchange-free round: segment violates its pivot");
  }
  std::optional<K> prev_max;
  for (auto slot : table.active_slots()) {
    const auto seg = table.segment(buf, slot);
    if (seg.empty()) continue;
    const auto [mn, mx] = std::minmax_element(seg.begin(), seg.end());
    if (prev_max && *mn < *prev_max) {
      throw InvariantViolation("exchange-free round: segments out of order");
    }
    prev_max = *mx;
  }
  if (!table.covers(buf.size())) throw InvariantViolation("exchange-free round: segment table broken");
}

// Shared body of both exchange-free variants. `hyper` selects binary-search
// splits on a sorted buffer plus a final merge; otherwise segments are
// partitioned in place and the received buffer is sorted. Never reads the rank.
template <SortKey K>
SortOutcome<K> exchange_free(vcomm::Comm& comm, std::vector<K> a, bool hyper, bool presorted,
                             const SortOptions& opts, Rng& rng) {
  SortOutcome<K> out;
  if (hyper && !presorted) local_sort(std::span<K>(a));
  if (comm.size() == 1) {
    if (!hyper) local_sort(std::span<K>(a));
    out.local_output = std::move(a);
    return out;
  }

  const std::span<K> buf(a);
  const std::span<const K> cbuf(a);
  SegmentTable table(static_cast<std::size_t>(comm.size()), a.size());
  while (table.stride() > 1) {
    const auto active = table.active_slots();
    std::vector<Candidate<K>> candidates(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
      candidates[j] = local_candidate(table.segment(cbuf, active[j]), hyper, opts.pivot, rng);
    }
    const auto pv = global_choose(comm, std::span<const Candidate<K>>(candidates), opts.pivot);
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto seg = table.segment(buf, active[j]);
      std::size_t n0 = 0;
      if (!pv.empty[j]) {
        n0 = hyper ? split_sorted(std::span<const K>(seg), pv.values[j]) : partition_even(seg, pv.values[j]);
      } else if (!seg.empty()) {
        throw InvariantViolation("pivot slot flagged empty for a non-empty local segment");
      }
      table.split(active[j], n0);
    }
    const auto old_stride = table.stride();
    table.next_round();
    ++out.levels_executed;
    if (opts.debug_asserts) {
      check_segments(table, cbuf, std::span<const std::size_t>(active), pv, old_stride);
      if (hyper) check_sorted(cbuf, "exchange-free hyper round");
    }
  }

  const auto counts = vcomm::alltoall_counts(comm, table.lengths());
  auto received = vcomm::alltoallv(comm, cbuf, table);
  if (opts.debug_asserts && received.source_lengths != counts) {
    throw InvariantViolation("alltoallv lengths disagree with alltoall counts");
  }
  if (hyper) {
    const auto runs = runs_of(std::span<const K>(received.data), std::span<const std::size_t>(counts));
    if (opts.debug_asserts) {
      for (const auto& run : runs) check_sorted(run, "received run");
    }
    out.local_output = multiway_merge(std::span<const std::span<const K>>(runs));
  } else {
    local_sort(std::span<K>(received.data));
    out.local_output = std::move(received.data);
  }
  return out;
}

// Standard recursion (iterated): pivot, split, exchange with rank ^ size/2,
// halve the group. With a policy, the guard is evaluated before each level
// and the remaining work is handed to the exchange-free body on the current
// group once it holds.
template <SortKey K>
SortOutcome<K> standard(vcomm::Comm& comm, std::vector<K> a, bool hyper, const CombinedPolicy* policy,
                        const SortOptions& opts, Rng& rng) {
  SortOutcome<K> out;
  vcomm::Comm group = comm;
  if (hyper) local_sort(std::span<K>(a));

  while (group.size() > 1) {
    if (policy != nullptr) {
      const double estimate =
          policy->estimate_mode == EstimateMode::static_estimate
              ? static_cast<double>(policy->per_rank_estimate)
              : static_cast<double>(vcomm::allreduce_max(group, a.size()));
      if (combined_guard(policy->c, group.size(), estimate)) {
        auto rest = exchange_free(group, std::move(a), hyper, hyper, opts, rng);
        rest.levels_executed += out.levels_executed;
        rest.switched_at = group.size();
        return rest;
      }
    }

    const auto candidate = local_candidate(std::span<const K>(a), hyper, opts.pivot, rng);
    const auto pv = global_choose(group, std::span<const Candidate<K>>(&candidate, 1), opts.pivot);
    std::size_t n0 = 0;
    if (!pv.empty[0]) {
      n0 = hyper ? split_sorted(std::span<const K>(a), pv.values[0]) : partition_even(std::span<K>(a), pv.values[0]);
      if (opts.debug_asserts) check_split(std::span<const K>(a), n0, pv.values[0], "standard level");
    }

    const int half = group.size() / 2;
    const bool lower = group.rank() < half;
    const std::span<const K> all(a);
    const auto keep = lower ? all.first(n0) : all.subspan(n0);
    const auto send = lower ? all.subspan(n0) : all.first(n0);
    auto received = vcomm::exchange(group, group.rank() ^ half, send);

    std::vector<K> next;
    next.reserve(keep.size() + received.size());
    if (hyper) {
      std::merge(keep.begin(), keep.end(), received.begin(), received.end(), std::back_inserter(next));
      if (opts.debug_asserts) check_sorted(std::span<const K>(next), "hyper level");
    } else {
      next.assign(keep.begin(), keep.end());
      next.insert(next.end(), received.begin(), received.end());
    }
    a = std::move(next);
    group = vcomm::split_group(group, lower);
    ++out.levels_executed;
  }

  if (!hyper) local_sort(std::span<K>(a));
  out.local_output = std::move(a);
  return out;
}

}  // namespace

template <SortKey K>
SortOutcome<K> par_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng) {
  return standard(comm, std::move(a), false, nullptr, opts, rng);
}

template <SortKey K>
SortOutcome<K> hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng) {
  return standard(comm, std::move(a), true, nullptr, opts, rng);
}

template <SortKey K>
SortOutcome<K> xfree_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng) {
  return exchange_free(comm, std::move(a), false, false, opts, rng);
}

template <SortKey K>
SortOutcome<K> xfree_hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng) {
  return exchange_free(comm, std::move(a), true, false, opts, rng);
}

template <SortKey K>
SortOutcome<K> combined_qsort(vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                              const SortOptions& opts, Rng& rng) {
  if (!(policy.c >= 0.0)) throw ConfigError("combined threshold c must be non-negative");
  return standard(comm, std::move(a), false, &policy, opts, rng);
}

template <SortKey K>
SortOutcome<K> combined_hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                                    const SortOptions& opts, Rng& rng) {
  if (!(policy.c >= 0.0)) throw ConfigError("combined threshold c must be non-negative");
  return standard(comm, std::move(a), true, &policy, opts, rng);
}

template <SortKey K>
SortOutcome<K> run_variant(Variant v, vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                           const SortOptions& opts, Rng& rng) {
  switch (v) {
    case Variant::qsort: return par_qsort(comm, std::move(a), opts, rng);
    case Variant::hyper: return hyper_qsort(comm, std::move(a), opts, rng);
    case Variant::xfree_qsort: return xfree_qsort(comm, std::move(a), opts, rng);
    case Variant::xfree_hyper: return xfree_hyper_qsort(comm, std::move(a), opts, rng);
    case Variant::combined_qsort: return combined_qsort(comm, std::move(a), policy, opts, rng);
    case Variant::combined_hyper: return combined_hyper_qsort(comm, std::move(a), policy, opts, rng);
  }
  throw ConfigError("unknown variant");
}

#define XSORT_INSTANTIATE_VARIANTS(K)                                                                     \
  template SortOutcome<K> par_qsort<K>(vcomm::Comm&, std::vector<K>, const SortOptions&, Rng&);           \
  template SortOutcome<K> hyper_qsort<K>(vcomm::Comm&, std::vector<K>, const SortOptions&, Rng&);         \
  template SortOutcome<K> xfree_qsort<K>(vcomm::Comm&, std::vector<K>, const SortOptions&, Rng&);         \
  template SortOutcome<K> xfree_hyper_qsort<K>(vcomm::Comm&, std::vector<K>, const SortOptions&, Rng&);   \
  template SortOutcome<K> combined_qsort<K>(vcomm::Comm&, std::vector<K>, const CombinedPolicy&,          \
                                            const SortOptions&, Rng&);                                    \
  template SortOutcome<K> combined_hyper_qsort<K>(vcomm::Comm&, std::vector<K>, const CombinedPolicy&,    \
                                                  const SortOptions&, Rng&);                              \
  template SortOutcome<K> run_variant<K>(Variant, vcomm::Comm&, std::vector<K>, const CombinedPolicy&,    \
                                         const SortOptions&, Rng&);

XSORT_INSTANTIATE_VARIANTS(std::int64_t)
XSORT_INSTANTIATE_VARIANTS(double)

}  // namespace xsort

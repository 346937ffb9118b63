#pragma once

// The distributed Quicksort variants. Each is an SPMD procedure: every rank of
// `comm` calls it with its local buffer, and on return rank i holds a sorted
// block whose elements are all <= those of rank i+1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "xsort/key.hpp"
#include "xsort/pivots.hpp"
#include "xsort/vcomm.hpp"

namespace xsort {

enum class Variant { qsort, hyper, xfree_qsort, xfree_hyper, combined_qsort, combined_hyper };

Variant parse_variant(std::string_view text);
std::string_view to_string(Variant v);
std::vector<Variant> all_variants();
bool is_exchange_free(Variant v);

/// True when XSORT_DEBUG_ASSERTS=1 is set in the environment.
bool debug_asserts_from_env();

struct SortOptions {
  PivotStrategy pivot;
  /// Check segment ordering / sortedness after every level; violations throw
  /// InvariantViolation.
  bool debug_asserts = debug_asserts_from_env();
};

enum class EstimateMode { static_estimate, allreduce_max };

/// When to hand a standard recursion over to the exchange-free variant.
struct CombinedPolicy {
  double c = 1500.0;
  EstimateMode estimate_mode = EstimateMode::static_estimate;
  /// Per-rank element count estimate used in static mode, identical on all
  /// ranks (normally ceil(n/p) of the initial distribution).
  std::uint64_t per_rank_estimate = 0;
};

/// Switch guard n' > c p' / (log2 p' + log2 n').
bool combined_guard(double c, int group_size, double per_rank_elements);

template <SortKey K>
struct SortOutcome {
  std::vector<K> local_output;
  int levels_executed = 0;
  /// Group size at which a combined variant switched to exchange-free.
  std::optional<int> switched_at;
};

/// Standard parallel Quicksort: partition, pairwise exchange, halve the group,
/// sort locally at the bottom.
template <SortKey K>
SortOutcome<K> par_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng);

/// HyperQuicksort: sort once, then split by binary search, exchange and merge
/// at every level.
template <SortKey K>
SortOutcome<K> hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng);

/// Exchange-free Quicksort: log2 p rounds of segment partitioning driven by
/// one pivot reduction each, then a single all-to-all and a local sort.
template <SortKey K>
SortOutcome<K> xfree_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng);

/// Exchange-free HyperQuicksort: sort once, split segments by binary search,
/// all-to-all, then a p-way merge of the received runs.
template <SortKey K>
SortOutcome<K> xfree_hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const SortOptions& opts, Rng& rng);

template <SortKey K>
SortOutcome<K> combined_qsort(vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                              const SortOptions& opts, Rng& rng);

template <SortKey K>
SortOutcome<K> combined_hyper_qsort(vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                                    const SortOptions& opts, Rng& rng);

/// Dispatch by variant id. `policy` is only read by the combined variants.
template <SortKey K>
SortOutcome<K> run_variant(Variant v, vcomm::Comm& comm, std::vector<K> a, const CombinedPolicy& policy,
                           const SortOptions& opts, Rng& rng);

}  // namespace xsort

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xsort {

enum class CollectiveKind : std::size_t { bcast, allreduce, alltoall, alltoallv, exchange, split };

inline constexpr std::size_t kCollectiveKinds = 6;

std::string_view to_string(CollectiveKind kind);

/// Transfer counters for one rank. Only the owning rank writes them while a
/// run is in flight; they are merged after all ranks have joined.
struct TraceStats {
  // Elements moved through pairwise exchange.
  std::uint64_t element_units_sent = 0;
  std::uint64_t element_units_received = 0;
  // Elements moved in the final all-to-all redistribution (self-segment excluded).
  std::uint64_t element_units_alltoallv = 0;
  std::uint64_t element_units_alltoallv_received = 0;
  // Pivot values received through broadcasts and pivot reductions, one unit
  // per logical value per collective round.
  std::uint64_t pivot_units = 0;
  std::array<std::uint64_t, kCollectiveKinds> collective_calls{};
  // Slot count of every pivot reduction this rank took part in, in call order.
  std::vector<std::uint32_t> reduction_widths;

  std::uint64_t calls(CollectiveKind kind) const {
    return collective_calls[static_cast<std::size_t>(kind)];
  }
  void count_call(CollectiveKind kind) { ++collective_calls[static_cast<std::size_t>(kind)]; }

  TraceStats& operator+=(const TraceStats& other);
  bool operator==(const TraceStats&) const = default;
};

/// Sum over ranks. reduction_widths of the total is the concatenation in rank order.
TraceStats merge_traces(std::span<const TraceStats> per_rank);

/// {variant, p, n, per_rank:[{element_units_sent, element_units_alltoallv,
///  pivot_units, collectives:{bcast, allreduce, alltoall, alltoallv, exchange, split}}]}
nlohmann::json trace_to_json(std::string_view variant, std::size_t p, std::uint64_t n,
                             std::span<const TraceStats> per_rank);

}  // namespace xsort

#include "xsort/trace.hpp"

namespace xsort {

std::string_view to_string(CollectiveKind kind) {
  switch (kind) {
    case CollectiveKind::bcast: return "bcast";
    case CollectiveKind::allreduce: return "allreduce";
    case CollectiveKind::alltoall: return "alltoall";
    case CollectiveKind::alltoallv: return "alltoallv";
    case CollectiveKind::exchange: return "exchange";
    case CollectiveKind::split: return "split";
  }
  return "unknown";
}

TraceStats& TraceStats::operator+=(const TraceStats& other) {
  element_units_sent += other.element_units_sent;
  element_units_received += other.element_units_received;
  element_units_alltoallv += other.element_units_alltoallv;
  element_units_alltoallv_received += other.element_units_alltoallv_received;
  pivot_units += other.pivot_units;
  for (std::size_t i = 0; i < kCollectiveKinds; ++i) collective_calls[i] += other.collective_calls[i];
  reduction_widths.insert(reduction_widths.end(), other.reduction_widths.begin(),
                          other.reduction_widths.end());
  return *this;
}

TraceStats merge_traces(std::span<const TraceStats> per_rank) {
  TraceStats total;
  for (const auto& t : per_rank) total += t;
  return total;
}

nlohmann::json trace_to_json(std::string_view variant, std::size_t p, std::uint64_t n,
                             std::span<const TraceStats> per_rank) {
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& t : per_rank) {
    nlohmann::json collectives = nlohmann::json::object();
    for (std::size_t k = 0; k < kCollectiveKinds; ++k) {
      collectives[std::string(to_string(static_cast<CollectiveKind>(k)))] = t.collective_calls[k];
    }
    ranks.push_back({{"element_units_sent", t.element_units_sent},
                     {"element_units_alltoallv", t.element_units_alltoallv},
                     {"pivot_units", t.pivot_units},
                     {"collectives", std::move(collectives)}});
  }
  return {{"variant", std::string(variant)}, {"p", p}, {"n", n}, {"per_rank", std::move(ranks)}};
}

}  // namespace xsort

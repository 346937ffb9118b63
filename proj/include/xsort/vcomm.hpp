#pragma once

// Virtual SPMD runtime: p logical processes run as threads of one address
// space and talk only through the collectives and pairwise exchange below.
// Every transfer is accounted in the calling rank's TraceStats.

#include <algorithm>
#include <any>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "xsort/error.hpp"
#include "xsort/key.hpp"
#include "xsort/segment_table.hpp"
#include "xsort/trace.hpp"

namespace xsort::vcomm {

struct FabricOptions {
  /// Bound on any wait inside the fabric; expiry turns a hang into ProtocolError.
  std::chrono::milliseconds deadlock_timeout{120'000};
};

namespace detail {

class FabricState {
 public:
  FabricState(int p, FabricOptions options) : options(options), traces(static_cast<std::size_t>(p)) {}

  FabricOptions options;
  std::atomic<bool> aborted{false};
  std::vector<TraceStats> traces;
};

struct Slot {
  CollectiveKind kind{};
  int root = 0;
  std::any payload;
};

using Combine = std::function<std::any(std::span<const Slot>)>;

/// Rendezvous point shared by the members of one communicator.
///
/// A collective runs in two phases. Arrival: every member deposits a slot; the
/// last one to arrive validates kind/root agreement and runs `combine` once.
/// Extraction: each member reads the slots and the combined value without the
/// lock, then departs. Nobody returns before every member has departed, so a
/// slot may safely point into its owner's memory.
class Group {
 public:
  Group(std::vector<int> world_ranks, FabricState* fabric);

  int size() const { return static_cast<int>(world_ranks_.size()); }
  int world_rank(int rank) const { return world_ranks_[static_cast<std::size_t>(rank)]; }
  const std::vector<int>& world_ranks() const { return world_ranks_; }

  template <class Extract>
  auto collective(int rank, CollectiveKind kind, int root, std::any payload, const Combine& combine,
                  Extract&& extract) {
    arrive(rank, Slot{kind, root, std::move(payload)}, combine);
    if (error_) {
      auto err = error_;
      depart();
      std::rethrow_exception(err);
    }
    using R = std::invoke_result_t<Extract, std::span<const Slot>, const std::any&>;
    std::optional<R> out;
    std::exception_ptr failure;
    try {
      out.emplace(extract(std::span<const Slot>(slots_), std::as_const(shared_)));
    } catch (...) {
      failure = std::current_exception();
    }
    depart();
    if (failure) std::rethrow_exception(failure);
    return std::move(*out);
  }

  /// Deposit `payload` for `partner` and block for the partner's payload.
  std::any exchange(int rank, int partner, std::any payload);

 private:
  template <class Pred>
  void wait(std::unique_lock<std::mutex>& lock, Pred pred, const char* what);

  void arrive(int rank, Slot slot, const Combine& combine);
  void depart();

  std::vector<int> world_ranks_;
  FabricState* fabric_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<Slot> slots_;
  int arrived_ = 0;
  int departed_ = 0;
  bool draining_ = false;
  std::uint64_t generation_ = 0;
  std::any shared_;
  std::exception_ptr error_;

  struct Message {
    int from;
    std::any payload;
  };
  std::vector<std::optional<Message>> inbox_;
};

struct RunReport {
  std::vector<TraceStats> traces;
  std::vector<double> rank_seconds;
};

}  // namespace detail

/// Handle to this process's membership in a group of ranks.
class Comm {
 public:
  Comm(std::shared_ptr<detail::Group> group, int rank, detail::FabricState* fabric)
      : group_(std::move(group)), rank_(rank), fabric_(fabric) {}

  int size() const { return group_->size(); }
  int rank() const { return rank_; }
  int world_rank() const { return group_->world_rank(rank_); }
  TraceStats& trace() const { return fabric_->traces[static_cast<std::size_t>(world_rank())]; }

  detail::Group& group() const { return *group_; }
  detail::FabricState* fabric() const { return fabric_; }

 private:
  std::shared_ptr<detail::Group> group_;
  int rank_;
  detail::FabricState* fabric_;
};

/// Per-slot (min, max) candidate. Invalid entries stand for empty segments and
/// contribute the neutral element.
template <SortKey K>
struct MinMax {
  K min{};
  K max{};
  bool valid = false;

  bool operator==(const MinMax&) const = default;
};

template <SortKey K>
struct AlltoallvResult {
  std::vector<K> data;
  std::vector<std::size_t> source_lengths;
};

namespace detail {

RunReport run_ranks(int p, const FabricOptions& options, const std::function<void(Comm&)>& body);

void check_same_length(std::span<const Slot> slots, const char* op);

// Slots of the typed collectives carry a pointer to the caller's argument.
template <class T>
const T& payload_as(const Slot& slot) {
  return **std::any_cast<T*>(&slot.payload);
}

}  // namespace detail

template <class Out>
struct SpmdRun {
  std::vector<Out> outputs;
  std::vector<TraceStats> traces;
  std::vector<double> rank_seconds;

  TraceStats totals() const { return merge_traces(traces); }
  double slowest_seconds() const {
    return rank_seconds.empty() ? 0.0 : *std::max_element(rank_seconds.begin(), rank_seconds.end());
  }
};

/// Run `program(comm, input)` on p concurrent logical processes.
///
/// p must be a power of two and `inputs` must hold exactly p entries. If any
/// rank throws, the fabric is aborted and the lowest-ranked original failure
/// is rethrown here. Output and trace do not depend on thread scheduling.
template <class In, class F>
auto spawn_spmd(int p, std::vector<In> inputs, F&& program, FabricOptions options = {})
    -> SpmdRun<std::invoke_result_t<F&, Comm&, In>> {
  using Out = std::invoke_result_t<F&, Comm&, In>;
  if (p < 1 || !is_power_of_two(static_cast<std::uint64_t>(p))) {
    throw ConfigError("rank count must be a power of two, got " + std::to_string(p));
  }
  if (inputs.size() != static_cast<std::size_t>(p)) {
    throw ConfigError("expected " + std::to_string(p) + " input buffers, got " +
                      std::to_string(inputs.size()));
  }
  std::vector<std::optional<Out>> slots(static_cast<std::size_t>(p));
  auto report = detail::run_ranks(p, options, [&](Comm& comm) {
    auto r = static_cast<std::size_t>(comm.rank());
    slots[r].emplace(program(comm, std::move(inputs[r])));
  });
  SpmdRun<Out> run;
  run.outputs.reserve(slots.size());
  for (auto& s : slots) run.outputs.push_back(std::move(*s));
  run.traces = std::move(report.traces);
  run.rank_seconds = std::move(report.rank_seconds);
  return run;
}

/// Every member returns root's value.
template <SortKey K>
std::vector<K> bcast(Comm& comm, int root, std::span<const K> value) {
  if (root < 0 || root >= comm.size()) throw_contract("bcast root out of range");
  comm.trace().count_call(CollectiveKind::bcast);
  auto out = comm.group().collective(
      comm.rank(), CollectiveKind::bcast, root, std::any(&value), nullptr,
      [root](std::span<const detail::Slot> slots, const std::any&) {
        const auto& v = detail::payload_as<std::span<const K>>(slots[static_cast<std::size_t>(root)]);
        return std::vector<K>(v.begin(), v.end());
      });
  if (comm.rank() != root) comm.trace().pivot_units += out.size();
  return out;
}

/// Elementwise (min, max) over the valid contributions of all members.
/// Positions without any valid contribution come back invalid everywhere.
template <SortKey K>
std::vector<MinMax<K>> allreduce_minmax(Comm& comm, std::span<const MinMax<K>> local) {
  comm.trace().count_call(CollectiveKind::allreduce);
  detail::Combine combine = [](std::span<const detail::Slot> slots) {
    detail::check_same_length(slots, "allreduce_minmax");
    const auto width = detail::payload_as<std::span<const MinMax<K>>>(slots[0]).size();
    std::vector<MinMax<K>> acc(width);
    for (const auto& slot : slots) {
      const auto& mine = detail::payload_as<std::span<const MinMax<K>>>(slot);
      for (std::size_t t = 0; t < width; ++t) {
        if (!mine[t].valid) continue;
        if (!acc[t].valid) {
          acc[t] = mine[t];
        } else {
          acc[t].min = std::min(acc[t].min, mine[t].min);
          acc[t].max = std::max(acc[t].max, mine[t].max);
        }
      }
    }
    return std::any(std::move(acc));
  };
  auto out = comm.group().collective(
      comm.rank(), CollectiveKind::allreduce, 0, std::any(&local), combine,
      [](std::span<const detail::Slot>, const std::any& shared) {
        return std::any_cast<const std::vector<MinMax<K>>&>(shared);
      });
  comm.trace().pivot_units += out.size();
  comm.trace().reduction_widths.push_back(static_cast<std::uint32_t>(out.size()));
  return out;
}

/// Elementwise arithmetic mean over the engaged contributions (integer keys:
/// floor of the exact mean). Positions nobody contributed to stay empty.
template <SortKey K>
std::vector<std::optional<K>> allreduce_mean(Comm& comm, std::span<const std::optional<K>> local) {
  comm.trace().count_call(CollectiveKind::allreduce);
  detail::Combine combine = [](std::span<const detail::Slot> slots) {
    detail::check_same_length(slots, "allreduce_mean");
    using Acc = std::conditional_t<std::is_integral_v<K>, __int128, long double>;
    const auto width = detail::payload_as<std::span<const std::optional<K>>>(slots[0]).size();
    std::vector<Acc> sum(width, Acc{0});
    std::vector<std::int64_t> count(width, 0);
    for (const auto& slot : slots) {
      const auto& mine = detail::payload_as<std::span<const std::optional<K>>>(slot);
      for (std::size_t t = 0; t < width; ++t) {
        if (!mine[t]) continue;
        sum[t] += static_cast<Acc>(*mine[t]);
        ++count[t];
      }
    }
    std::vector<std::optional<K>> mean(width);
    for (std::size_t t = 0; t < width; ++t) {
      if (count[t] == 0) continue;
      if constexpr (std::is_integral_v<K>) {
        __int128 q = sum[t] / count[t];
        if (sum[t] % count[t] != 0 && sum[t] < 0) --q;
        mean[t] = static_cast<K>(q);
      } else {
        mean[t] = static_cast<K>(sum[t] / static_cast<long double>(count[t]));
      }
    }
    return std::any(std::move(mean));
  };
  auto out = comm.group().collective(
      comm.rank(), CollectiveKind::allreduce, 0, std::any(&local), combine,
      [](std::span<const detail::Slot>, const std::any& shared) {
        return std::any_cast<const std::vector<std::optional<K>>&>(shared);
      });
  comm.trace().pivot_units += out.size();
  comm.trace().reduction_widths.push_back(static_cast<std::uint32_t>(out.size()));
  return out;
}

/// Scalar max over the group. Not a pivot distribution; only the call is counted.
std::uint64_t allreduce_max(Comm& comm, std::uint64_t value);

/// Swap buffers with `partner`, which must be rank XOR size/2.
template <SortKey K>
std::vector<K> exchange(Comm& comm, int partner, std::span<const K> send) {
  if (comm.size() < 2 || partner != (comm.rank() ^ (comm.size() / 2))) {
    throw_contract("exchange partner must be rank xor size/2");
  }
  comm.trace().count_call(CollectiveKind::exchange);
  comm.trace().element_units_sent += send.size();
  auto got = comm.group().exchange(comm.rank(), partner,
                                   std::any(std::vector<K>(send.begin(), send.end())));
  auto received = std::any_cast<std::vector<K>>(std::move(got));
  comm.trace().element_units_received += received.size();
  return received;
}

/// Entry s of the result is entry `rank` of rank s's send_counts.
std::vector<std::size_t> alltoall_counts(Comm& comm, std::span<const std::size_t> send_counts);

namespace detail {

void check_alltoallv_tables(std::span<const Slot> slots);

template <SortKey K>
struct AlltoallvSlot {
  std::span<const K> buffer;
  const SegmentTable* table;
};

}  // namespace detail

/// Send segment j of the local buffer to rank j. The result is the
/// concatenation, in source-rank order, of every rank's segment for us.
template <SortKey K>
AlltoallvResult<K> alltoallv(Comm& comm, std::span<const K> buffer, const SegmentTable& segments) {
  comm.trace().count_call(CollectiveKind::alltoallv);
  detail::AlltoallvSlot<K> mine{buffer, &segments};
  detail::Combine combine = [](std::span<const detail::Slot> slots) {
    check_alltoallv_tables(slots);
    return std::any();
  };
  const auto me = static_cast<std::size_t>(comm.rank());
  auto result = comm.group().collective(
      comm.rank(), CollectiveKind::alltoallv, 0, std::any(mine), combine,
      [me](std::span<const detail::Slot> slots, const std::any&) {
        AlltoallvResult<K> r;
        r.source_lengths.resize(slots.size());
        std::size_t total = 0;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          const auto& src = std::any_cast<const detail::AlltoallvSlot<K>&>(slots[s].payload);
          r.source_lengths[s] = src.table->length(me);
          total += r.source_lengths[s];
        }
        r.data.reserve(total);
        for (const auto& slot : slots) {
          const auto& src = std::any_cast<const detail::AlltoallvSlot<K>&>(slot.payload);
          auto seg = src.table->segment(src.buffer, me);
          r.data.insert(r.data.end(), seg.begin(), seg.end());
        }
        return r;
      });
  auto& trace = comm.trace();
  for (std::size_t j = 0; j < segments.slots(); ++j) {
    if (j != me) trace.element_units_alltoallv += segments.length(j);
  }
  for (std::size_t s = 0; s < result.source_lengths.size(); ++s) {
    if (s != me) trace.element_units_alltoallv_received += result.source_lengths[s];
  }
  return result;
}

/// Collective: split into lower and upper halves; `lower_half` must equal
/// rank < size/2. The returned Comm re-ranks members consecutively.
Comm split_group(Comm& comm, bool lower_half);

}  // namespace xsort::vcomm

#include "xsort/vcomm.hpp"

#include <latch>
#include <thread>

namespace xsort::vcomm {
namespace detail {

namespace {
constexpr auto kPollInterval = std::chrono::milliseconds(20);
}

Group::Group(std::vector<int> world_ranks, FabricState* fabric)
    : world_ranks_(std::move(world_ranks)),
      fabric_(fabric),
      slots_(world_ranks_.size()),
      inbox_(world_ranks_.size()) {}

template <class Pred>
void Group::wait(std::unique_lock<std::mutex>& lock, Pred pred, const char* what) {
  const auto deadline = std::chrono::steady_clock::now() + fabric_->options.deadlock_timeout;
  while (!pred()) {
    if (fabric_->aborted.load(std::memory_order_relaxed)) {
      throw FabricAborted("run aborted by a failing rank");
    }
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      throw ProtocolError(std::string("deadlock: timed out waiting in ") + what);
    }
    cv_.wait_for(lock, std::min<std::chrono::steady_clock::duration>(kPollInterval, deadline - now));
  }
}

void Group::arrive(int rank, Slot slot, const Combine& combine) {
  std::unique_lock lock(mutex_);
  wait(lock, [&] { return !draining_; }, "collective entry");
  slots_[static_cast<std::size_t>(rank)] = std::move(slot);
  const auto gen = generation_;
  if (++arrived_ == size()) {
    error_ = nullptr;
    shared_.reset();
    try {
      for (const auto& s : slots_) {
        if (s.kind != slots_[0].kind) {
          throw CollectiveMismatch(std::string("collective mismatch: ") +
                                   std::string(to_string(slots_[0].kind)) + " vs " +
                                   std::string(to_string(s.kind)));
        }
        if (s.root != slots_[0].root) {
          throw CollectiveMismatch(std::string("collective mismatch: roots disagree in ") +
                                   std::string(to_string(s.kind)));
        }
      }
      if (combine) shared_ = combine(std::span<const Slot>(slots_));
    } catch (...) {
      error_ = std::current_exception();
    }
    draining_ = true;
    cv_.notify_all();
    return;
  }
  wait(lock, [&] { return draining_ && generation_ == gen; }, to_string(slots_[static_cast<std::size_t>(rank)].kind).data());
}

void Group::depart() {
  std::unique_lock lock(mutex_);
  const auto gen = generation_;
  if (++departed_ == size()) {
    arrived_ = 0;
    departed_ = 0;
    draining_ = false;
    for (auto& s : slots_) s.payload.reset();
    shared_.reset();
    ++generation_;
    cv_.notify_all();
    return;
  }
  wait(lock, [&] { return generation_ != gen; }, "collective exit");
}

std::any Group::exchange(int rank, int partner, std::any payload) {
  std::unique_lock lock(mutex_);
  auto& outbox = inbox_[static_cast<std::size_t>(partner)];
  wait(lock, [&] { return !outbox.has_value(); }, "exchange send");
  outbox.emplace(Message{rank, std::move(payload)});
  cv_.notify_all();
  auto& mine = inbox_[static_cast<std::size_t>(rank)];
  wait(lock, [&] { return mine.has_value(); }, "exchange receive");
  Message msg = std::move(*mine);
  mine.reset();
  cv_.notify_all();
  if (msg.from != partner) {
    throw ProtocolError("exchange: expected data from rank " + std::to_string(partner) +
                        ", got rank " + std::to_string(msg.from));
  }
  return std::move(msg.payload);
}

void check_same_length(std::span<const Slot> slots, const char* op) {
  // All typed reductions store a pointer to a span; only the length matters here.
  auto length = [](const Slot& s) -> std::size_t {
    if (auto p = std::any_cast<std::span<const MinMax<std::int64_t>>*>(&s.payload)) return (*p)->size();
    if (auto p = std::any_cast<std::span<const MinMax<double>>*>(&s.payload)) return (*p)->size();
    if (auto p = std::any_cast<std::span<const std::optional<std::int64_t>>*>(&s.payload)) return (*p)->size();
    if (auto p = std::any_cast<std::span<const std::optional<double>>*>(&s.payload)) return (*p)->size();
    if (auto p = std::any_cast<std::span<const std::size_t>*>(&s.payload)) return (*p)->size();
    throw CollectiveMismatch("collective payload types disagree");
  };
  const auto want = length(slots[0]);
  for (const auto& s : slots) {
    if (s.payload.type() != slots[0].payload.type()) {
      throw CollectiveMismatch(std::string(op) + ": payload types disagree");
    }
    if (length(s) != want) throw CollectiveMismatch(std::string(op) + ": vector lengths disagree");
  }
}

namespace {

template <SortKey K>
bool try_check_tables(std::span<const Slot> slots) {
  if (!std::any_cast<AlltoallvSlot<K>>(&slots[0].payload)) return false;
  for (const auto& s : slots) {
    const auto* src = std::any_cast<AlltoallvSlot<K>>(&s.payload);
    if (!src) throw CollectiveMismatch("alltoallv: key types disagree");
    if (src->table->slots() != slots.size()) {
      throw ContractViolation("alltoallv: segment table must have one slot per rank");
    }
    if (src->table->stride() != 1 || !src->table->covers(src->buffer.size())) {
      throw ContractViolation("alltoallv: segments must be disjoint, in order and cover the buffer");
    }
  }
  return true;
}

}  // namespace

void check_alltoallv_tables(std::span<const Slot> slots) {
  if (try_check_tables<std::int64_t>(slots)) return;
  if (try_check_tables<double>(slots)) return;
  throw CollectiveMismatch("alltoallv: unsupported payload");
}

RunReport run_ranks(int p, const FabricOptions& options, const std::function<void(Comm&)>& body) {
  FabricState fabric(p, options);
  std::vector<int> world(static_cast<std::size_t>(p));
  for (int r = 0; r < p; ++r) world[static_cast<std::size_t>(r)] = r;
  auto root = std::make_shared<Group>(std::move(world), &fabric);

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(p));
  std::vector<bool> secondary(static_cast<std::size_t>(p), false);
  std::vector<double> seconds(static_cast<std::size_t>(p), 0.0);
  std::latch start(p);

  {
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(p));
    for (int r = 0; r < p; ++r) {
      threads.emplace_back([&, r] {
        const auto idx = static_cast<std::size_t>(r);
        start.arrive_and_wait();
        const auto t0 = std::chrono::steady_clock::now();
        try {
          Comm comm(root, r, &fabric);
          body(comm);
        } catch (const FabricAborted&) {
          errors[idx] = std::current_exception();
          secondary[idx] = true;
        } catch (...) {
          errors[idx] = std::current_exception();
          fabric.aborted.store(true);
        }
        seconds[idx] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      });
    }
  }

  std::exception_ptr first_secondary;
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (!errors[r]) continue;
    if (!secondary[r]) std::rethrow_exception(errors[r]);
    if (!first_secondary) first_secondary = errors[r];
  }
  if (first_secondary) std::rethrow_exception(first_secondary);

  return RunReport{std::move(fabric.traces), std::move(seconds)};
}

}  // namespace detail

std::uint64_t allreduce_max(Comm& comm, std::uint64_t value) {
  comm.trace().count_call(CollectiveKind::allreduce);
  detail::Combine combine = [](std::span<const detail::Slot> slots) {
    std::uint64_t best = 0;
    for (const auto& s : slots) {
      const auto* v = std::any_cast<std::uint64_t>(&s.payload);
      if (!v) throw CollectiveMismatch("allreduce_max: payload types disagree");
      best = std::max(best, *v);
    }
    return std::any(best);
  };
  return comm.group().collective(comm.rank(), CollectiveKind::allreduce, 0, std::any(value), combine,
                                 [](std::span<const detail::Slot>, const std::any& shared) {
                                   return std::any_cast<std::uint64_t>(shared);
                                 });
}

std::vector<std::size_t> alltoall_counts(Comm& comm, std::span<const std::size_t> send_counts) {
  if (send_counts.size() != static_cast<std::size_t>(comm.size())) {
    throw_contract("alltoall_counts: need exactly one count per rank");
  }
  comm.trace().count_call(CollectiveKind::alltoall);
  detail::Combine combine = [](std::span<const detail::Slot> slots) {
    detail::check_same_length(slots, "alltoall_counts");
    return std::any();
  };
  const auto me = static_cast<std::size_t>(comm.rank());
  return comm.group().collective(
      comm.rank(), CollectiveKind::alltoall, 0, std::any(&send_counts), combine,
      [me](std::span<const detail::Slot> slots, const std::any&) {
        std::vector<std::size_t> out(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
          out[s] = detail::payload_as<std::span<const std::size_t>>(slots[s])[me];
        }
        return out;
      });
}

Comm split_group(Comm& comm, bool lower_half) {
  const int size = comm.size();
  if (size < 2) throw_contract("split_group: cannot split a single-rank group");
  if (lower_half != (comm.rank() < size / 2)) {
    throw_contract("split_group: lower_half must equal rank < size/2");
  }
  comm.trace().count_call(CollectiveKind::split);
  auto* fabric = comm.fabric();
  const auto& parent = comm.group().world_ranks();
  detail::Combine combine = [fabric, &parent, size](std::span<const detail::Slot>) {
    const auto half = static_cast<std::size_t>(size / 2);
    std::vector<int> lower(parent.begin(), parent.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<int> upper(parent.begin() + static_cast<std::ptrdiff_t>(half), parent.end());
    return std::any(std::make_pair(std::make_shared<detail::Group>(std::move(lower), fabric),
                                   std::make_shared<detail::Group>(std::move(upper), fabric)));
  };
  using Halves = std::pair<std::shared_ptr<detail::Group>, std::shared_ptr<detail::Group>>;
  auto child = comm.group().collective(
      comm.rank(), CollectiveKind::split, 0, std::any(lower_half), combine,
      [lower_half](std::span<const detail::Slot>, const std::any& shared) {
        const auto& halves = std::any_cast<const Halves&>(shared);
        return lower_half ? halves.first : halves.second;
      });
  const int new_rank = lower_half ? comm.rank() : comm.rank() - size / 2;
  return Comm(std::move(child), new_rank, fabric);
}

}  // namespace xsort::vcomm

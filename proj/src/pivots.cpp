#include "xsort/pivots.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "xsort/error.hpp"

namespace xsort {

PivotKind parse_pivot_kind(std::string_view text) {
  if (text == "interp" || text == "interpolation") return PivotKind::interpolation;
  if (text == "median" || text == "median-mean") return PivotKind::median_mean;
  throw ConfigError("unknown pivot strategy '" + std::string(text) + "' (expected interp|median)");
}

std::string_view to_string(PivotKind kind) {
  return kind == PivotKind::interpolation ? "interp" : "median";
}

namespace {

template <SortKey K>
std::vector<K> draw_sample(std::span<const K> a, std::size_t sample_size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  std::vector<K> sample(sample_size);
  for (auto& x : sample) x = a[pick(rng)];
  return sample;
}

}  // namespace

template <SortKey K>
Candidate<K> local_minmax(std::span<const K> a, bool sorted, std::size_t sample_size, Rng& rng) {
  if (a.empty()) return {};
  if (sample_size == 0) throw_contract("pivot sample size must be at least 1");
  if (sorted) return {a.front(), a.back(), true};
  if (a.size() <= sample_size) {
    auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    return {*lo, *hi, true};
  }
  std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
  K lo = a[pick(rng)];
  K hi = lo;
  for (std::size_t i = 1; i < sample_size; ++i) {
    const K x = a[pick(rng)];
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi, true};
}

template <SortKey K>
Candidate<K> local_median(std::span<const K> a, bool sorted, std::size_t sample_size, Rng& rng) {
  if (a.empty()) return {};
  if (sample_size == 0) throw_contract("pivot sample size must be at least 1");
  if (sorted) return {a[a.size() / 2], a[a.size() / 2], true};
  std::vector<K> sample = a.size() <= sample_size ? std::vector<K>(a.begin(), a.end())
                                                  : draw_sample(a, sample_size, rng);
  auto mid = sample.begin() + static_cast<std::ptrdiff_t>(sample.size() / 2);
  std::nth_element(sample.begin(), mid, sample.end());
  return {*mid, *mid, true};
}

template <SortKey K>
Candidate<K> local_candidate(std::span<const K> a, bool sorted, const PivotStrategy& strategy, Rng& rng) {
  return strategy.kind == PivotKind::interpolation ? local_minmax(a, sorted, strategy.sample_size, rng)
                                                   : local_median(a, sorted, strategy.sample_size, rng);
}

template <SortKey K>
K interpolate(K gmin, K gmax) {
  return std::midpoint(gmin, gmax);
}

template <SortKey K>
PivotVector<K> global_choose(vcomm::Comm& comm, std::span<const Candidate<K>> locals,
                             const PivotStrategy& strategy) {
  PivotVector<K> pv;
  pv.values.assign(locals.size(), K{0});
  pv.empty.assign(locals.size(), true);
  if (strategy.kind == PivotKind::interpolation) {
    auto global = vcomm::allreduce_minmax(comm, locals);
    for (std::size_t t = 0; t < global.size(); ++t) {
      if (!global[t].valid) continue;
      pv.values[t] = interpolate(global[t].min, global[t].max);
      pv.empty[t] = false;
    }
  } else {
    std::vector<std::optional<K>> medians(locals.size());
    for (std::size_t t = 0; t < locals.size(); ++t) {
      if (locals[t].valid) medians[t] = locals[t].min;
    }
    auto mean = vcomm::allreduce_mean(comm, std::span<const std::optional<K>>(medians));
    for (std::size_t t = 0; t < mean.size(); ++t) {
      if (!mean[t]) continue;
      pv.values[t] = *mean[t];
      pv.empty[t] = false;
    }
  }
  return pv;
}

#define XSORT_INSTANTIATE_PIVOTS(K)                                                                \
  template Candidate<K> local_minmax<K>(std::span<const K>, bool, std::size_t, Rng&);              \
  template Candidate<K> local_median<K>(std::span<const K>, bool, std::size_t, Rng&);              \
  template Candidate<K> local_candidate<K>(std::span<const K>, bool, const PivotStrategy&, Rng&);  \
  template K interpolate<K>(K, K);                                                                 \
  template PivotVector<K> global_choose<K>(vcomm::Comm&, std::span<const Candidate<K>>,            \
                                           const PivotStrategy&);

XSORT_INSTANTIATE_PIVOTS(std::int64_t)
XSORT_INSTANTIATE_PIVOTS(double)

}  // namespace xsort

#include "xsort/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace xsort {

std::string VerifyReport::describe() const {
  std::string s;
  s += sorted_ok ? "sorted" : "UNSORTED";
  s += boundary_ok ? " boundaries-ok" : " BOUNDARY-VIOLATION";
  s += multiset_ok ? " multiset-ok" : " MULTISET-MISMATCH";
  s += " imbalance=" + std::to_string(imbalance);
  return s;
}

template <SortKey K>
std::vector<K> concat(std::span<const std::vector<K>> blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  std::vector<K> out;
  out.reserve(total);
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <SortKey K>
VerifyReport verify(std::span<const std::vector<K>> inputs, std::span<const std::vector<K>> outputs) {
  VerifyReport report;
  std::optional<K> last;
  for (const auto& block : outputs) {
    if (!std::is_sorted(block.begin(), block.end())) report.sorted_ok = false;
    if (block.empty()) continue;
    if (last && block.front() < *last) report.boundary_ok = false;
    last = block.back();
  }

  auto expected = concat(inputs);
  auto got = concat(outputs);
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  report.multiset_ok = expected == got;

  if (!outputs.empty()) {
    const double ideal = static_cast<double>(expected.size()) / static_cast<double>(outputs.size());
    for (const auto& block : outputs) {
      report.imbalance = std::max(report.imbalance, std::abs(static_cast<double>(block.size()) - ideal));
    }
  }
  return report;
}

template VerifyReport verify<std::int64_t>(std::span<const std::vector<std::int64_t>>,
                                           std::span<const std::vector<std::int64_t>>);
template VerifyReport verify<double>(std::span<const std::vector<double>>, std::span<const std::vector<double>>);
template std::vector<std::int64_t> concat<std::int64_t>(std::span<const std::vector<std::int64_t>>);
template std::vector<double> concat<double>(std::span<const std::vector<double>>);

}  // namespace xsort

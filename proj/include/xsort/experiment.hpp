#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xsort/inputs.hpp"
#include "xsort/pivots.hpp"
#include "xsort/trace.hpp"
#include "xsort/variants.hpp"
#include "xsort/vcomm.hpp"
#include "xsort/verify.hpp"

namespace xsort {

struct RunConfig {
  Variant variant = Variant::xfree_qsort;
  int p = 1;
  std::uint64_t n = 0;
  InputKind input = InputKind::perm;
  /// Upper bound (exclusive) of uniform keys; 0 means n.
  double key_range = 0.0;
  std::uint64_t seed = 1;
  int repeats = 43;
  int warmups = 5;
  PivotStrategy pivot;
  double c = 1500.0;
  EstimateMode estimate_mode = EstimateMode::static_estimate;
  std::uint32_t element_byte_weight = 8;
  bool debug_asserts = debug_asserts_from_env();
  vcomm::FabricOptions fabric;

  double effective_key_range() const;
  CombinedPolicy combined_policy() const;
  SortOptions sort_options() const;
};

/// Throws ConfigError unless p is a power of two, repeats >= 1, warmups >= 0,
/// sample size >= 1 and c >= 0.
void validate(const RunConfig& config);

struct RunRecord {
  RunConfig config;
  double best_ms = 0.0;      // best over repeats of the slowest rank's time
  double baseline_ms = 0.0;  // single-process local sort of the same keys
  double speedup = 0.0;
  double efficiency = 0.0;
  VerifyReport verification;
  TraceStats totals;
  std::vector<TraceStats> per_rank;
  std::optional<int> switch_group_size;

  bool ok() const { return verification.ok(); }
  std::uint64_t element_bytes_moved() const;
};

/// Run every rank of `variant` over `inputs` on a fresh fabric. Rank r draws
/// its pivot samples from an engine seeded with (seed, r).
template <SortKey K>
vcomm::SpmdRun<SortOutcome<K>> run_sort(Variant variant, std::vector<std::vector<K>> inputs,
                                        const CombinedPolicy& policy, const SortOptions& opts,
                                        std::uint64_t seed, vcomm::FabricOptions fabric = {});

/// Warm-ups, timed repeats, verification of the last repeat, sequential baseline.
RunRecord run_experiment(const RunConfig& config);

enum class SweepMode { strong, weak };

SweepMode parse_sweep_mode(std::string_view text);

struct SweepConfig {
  SweepMode mode = SweepMode::strong;
  std::vector<Variant> variants;
  RunConfig base;
  /// strong: rank counts at fixed base.n.
  std::vector<int> p_list;
  /// weak: elements per rank at fixed base.p.
  std::vector<std::uint64_t> per_rank_list;
};

/// Configurations in execution order.
std::vector<RunConfig> expand_sweep(const SweepConfig& sweep);

std::string csv_header();
std::string csv_row(const RunRecord& record);

/// Append one row, writing the header first when the file is new or empty.
void append_csv(const std::filesystem::path& path, const RunRecord& record);

nlohmann::json trace_json(const RunRecord& record);

}  // namespace xsort

#include "xsort/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xsort/error.hpp"
#include "xsort/localcore.hpp"

namespace xsort {

namespace {

constexpr int kMaxBaselineRepeats = 5;

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

template <SortKey K>
RunRecord run_typed(const RunConfig& config) {
  RunRecord record;
  record.config = config;
  const auto inputs = gen_input<K>(config.input, config.n, config.p, config.effective_key_range(), config.seed);
  const auto policy = config.combined_policy();
  const auto opts = config.sort_options();

  double best = std::numeric_limits<double>::infinity();
  std::optional<vcomm::SpmdRun<SortOutcome<K>>> last;
  const int total = config.warmups + config.repeats;
  for (int i = 0; i < total; ++i) {
    auto run = run_sort<K>(config.variant, inputs, policy, opts, config.seed, config.fabric);
    if (i >= config.warmups) best = std::min(best, run.slowest_seconds());
    if (i == total - 1) last = std::move(run);
  }

  std::vector<std::vector<K>> outputs;
  outputs.reserve(last->outputs.size());
  for (auto& o : last->outputs) {
    if (o.switched_at) {
      record.switch_group_size = std::max(record.switch_group_size.value_or(0), *o.switched_at);
    }
    outputs.push_back(std::move(o.local_output));
  }
  record.verification = verify(std::span<const std::vector<K>>(inputs), std::span<const std::vector<K>>(outputs));
  record.totals = last->totals();
  record.per_rank = std::move(last->traces);

  const auto keys = concat(std::span<const std::vector<K>>(inputs));
  double baseline = std::numeric_limits<double>::infinity();
  for (int i = 0; i < std::min(config.repeats, kMaxBaselineRepeats); ++i) {
    auto copy = keys;
    const auto t0 = std::chrono::steady_clock::now();
    local_sort(std::span<K>(copy));
    baseline = std::min(baseline, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  record.best_ms = best * 1e3;
  record.baseline_ms = baseline * 1e3;
  record.speedup = best > 0.0 ? baseline / best : 0.0;
  record.efficiency = record.speedup / config.p;
  return record;
}

}  // namespace

double RunConfig::effective_key_range() const {
  return key_range > 0.0 ? key_range : std::max(1.0, static_cast<double>(n));
}

CombinedPolicy RunConfig::combined_policy() const {
  CombinedPolicy policy;
  policy.c = c;
  policy.estimate_mode = estimate_mode;
  const auto up = static_cast<std::uint64_t>(std::max(p, 1));
  policy.per_rank_estimate = (n + up - 1) / up;
  return policy;
}

SortOptions RunConfig::sort_options() const {
  SortOptions opts;
  opts.pivot = pivot;
  opts.debug_asserts = debug_asserts;
  return opts;
}

void validate(const RunConfig& config) {
  if (config.p < 1 || !is_power_of_two(static_cast<std::uint64_t>(config.p))) {
    throw ConfigError("p must be a power of two, got " + std::to_string(config.p));
  }
  if (config.repeats < 1) throw ConfigError("repeats must be at least 1");
  if (config.warmups < 0) throw ConfigError("warmups must be non-negative");
  if (config.pivot.sample_size < 1) throw ConfigError("sample size must be at least 1");
  if (!(config.c >= 0.0)) throw ConfigError("c must be non-negative");
}

std::uint64_t RunRecord::element_bytes_moved() const {
  return (totals.element_units_sent + totals.element_units_alltoallv) * config.element_byte_weight;
}

template <SortKey K>
vcomm::SpmdRun<SortOutcome<K>> run_sort(Variant variant, std::vector<std::vector<K>> inputs,
                                        const CombinedPolicy& policy, const SortOptions& opts,
                                        std::uint64_t seed, vcomm::FabricOptions fabric) {
  const int p = static_cast<int>(inputs.size());
  return vcomm::spawn_spmd(
      p, std::move(inputs),
      [&](vcomm::Comm& comm, std::vector<K> local) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(comm.rank())};
        Rng rng(seq);
        return run_variant(variant, comm, std::move(local), policy, opts, rng);
      },
      fabric);
}

template vcomm::SpmdRun<SortOutcome<std::int64_t>> run_sort<std::int64_t>(Variant, std::vector<std::vector<std::int64_t>>,
                                                                         const CombinedPolicy&, const SortOptions&,
                                                                         std::uint64_t, vcomm::FabricOptions);
template vcomm::SpmdRun<SortOutcome<double>> run_sort<double>(Variant, std::vector<std::vector<double>>,
                                                             const CombinedPolicy&, const SortOptions&,
                                                             std::uint64_t, vcomm::FabricOptions);

RunRecord run_experiment(const RunConfig& config) {
  validate(config);
  return uses_double_keys(config.input) ? run_typed<double>(config) : run_typed<std::int64_t>(config);
}

SweepMode parse_sweep_mode(std::string_view text) {
  if (text == "strong") return SweepMode::strong;
  if (text == "weak") return SweepMode::weak;
  throw ConfigError("unknown sweep mode '" + std::string(text) + "' (expected strong|weak)");
}

std::vector<RunConfig> expand_sweep(const SweepConfig& sweep) {
  std::vector<RunConfig> out;
  if (sweep.mode == SweepMode::strong) {
    for (int p : sweep.p_list) {
      for (auto v : sweep.variants) {
        RunConfig c = sweep.base;
        c.variant = v;
        c.p = p;
        out.push_back(c);
      }
    }
  } else {
    for (auto per_rank : sweep.per_rank_list) {
      for (auto v : sweep.variants) {
        RunConfig c = sweep.base;
        c.variant = v;
        c.n = per_rank * static_cast<std::uint64_t>(c.p);
        out.push_back(c);
      }
    }
  }
  return out;
}

std::string csv_header() {
  return "variant,p,n,input,seed,rep_best_ms,baseline_ms,speedup,efficiency,imbalance,"
         "elem_exchange_units,elem_alltoallv_units,pivot_units,switch_group_size";
}

std::string csv_row(const RunRecord& r) {
  const auto& c = r.config;
  std::ostringstream os;
  os << to_string(c.variant) << ',' << c.p << ',' << c.n << ',' << to_string(c.input) << ',' << c.seed << ',';
  if (r.ok()) {
    os << fixed(r.best_ms, 3) << ',' << fixed(r.baseline_ms, 3) << ',' << fixed(r.speedup, 4) << ','
       << fixed(r.efficiency, 4) << ',';
  } else {
    os << "FAIL,FAIL,FAIL,FAIL,";
  }
  os << fixed(r.verification.imbalance, 3) << ',' << r.totals.element_units_sent << ','
     << r.totals.element_units_alltoallv << ',' << r.totals.pivot_units << ',' << r.switch_group_size.value_or(0);
  return os.str();
}

void append_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("cannot open CSV file " + path.string());
  if (fresh) out << csv_header() << '\n';
  out << csv_row(record) << '\n';
}

nlohmann::json trace_json(const RunRecord& record) {
  return trace_to_json(to_string(record.config.variant), static_cast<std::size_t>(record.config.p), record.config.n,
                       record.per_rank);
}

}  // namespace xsort

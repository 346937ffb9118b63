// xsort: run, sweep and self-check the distributed Quicksort variants on the
// virtual SPMD fabric.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xsort/error.hpp"
#include "xsort/experiment.hpp"

namespace {

struct CommonArgs {
  std::string input = "perm";
  std::uint64_t seed = 1;
  int repeats = 43;
  int warmups = 5;
  std::size_t sample_size = 20;
  double c = 1500.0;
  std::string pivot = "interp";
  std::string estimate = "static";
  double key_range = 0.0;
  std::uint32_t byte_weight = 8;
  long timeout_ms = 120000;
  std::string csv;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--input", a.input, "perm | uniform-int | uniform-double")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Input and sampling seed")->capture_default_str();
  cmd->add_option("--repeats", a.repeats, "Timed repetitions")->capture_default_str();
  cmd->add_option("--warmups", a.warmups, "Untimed warm-up repetitions")->capture_default_str();
  cmd->add_option("--sample-size", a.sample_size, "Pivot sample per unsorted segment")->capture_default_str();
  cmd->add_option("--c", a.c, "Combined-variant switch constant")->capture_default_str();
  cmd->add_option("--pivot", a.pivot, "interp | median")->capture_default_str();
  cmd->add_option("--estimate", a.estimate, "Combined estimate: static | allreduce")->capture_default_str();
  cmd->add_option("--key-range", a.key_range, "Exclusive upper bound of uniform keys (default n)");
  cmd->add_option("--byte-weight", a.byte_weight, "Bytes per element for volume reports")->capture_default_str();
  cmd->add_option("--timeout-ms", a.timeout_ms, "Fabric deadlock timeout")->capture_default_str();
  cmd->add_option("--csv", a.csv, "Append result rows to this CSV file");
}

xsort::RunConfig to_config(const CommonArgs& a) {
  xsort::RunConfig cfg;
  cfg.input = xsort::parse_input_kind(a.input);
  cfg.seed = a.seed;
  cfg.repeats = a.repeats;
  cfg.warmups = a.warmups;
  cfg.pivot.kind = xsort::parse_pivot_kind(a.pivot);
  cfg.pivot.sample_size = a.sample_size;
  cfg.c = a.c;
  if (a.estimate == "static") {
    cfg.estimate_mode = xsort::EstimateMode::static_estimate;
  } else if (a.estimate == "allreduce") {
    cfg.estimate_mode = xsort::EstimateMode::allreduce_max;
  } else {
    throw xsort::ConfigError("unknown estimate mode '" + a.estimate + "' (expected static|allreduce)");
  }
  cfg.key_range = a.key_range;
  cfg.element_byte_weight = a.byte_weight;
  cfg.fabric.deadlock_timeout = std::chrono::milliseconds(a.timeout_ms);
  return cfg;
}

void emit(const xsort::RunRecord& rec, const std::string& csv) {
  if (csv.empty()) {
    std::cout << xsort::csv_row(rec) << '\n';
  } else {
    xsort::append_csv(csv, rec);
  }
  if (!rec.ok()) {
    std::cerr << "verification failed: " << xsort::to_string(rec.config.variant) << " p=" << rec.config.p
              << " n=" << rec.config.n << ": " << rec.verification.describe() << '\n';
  }
}

int cmd_run(const std::string& variant, int p, std::uint64_t n, const CommonArgs& a, const std::string& trace_path) {
  auto cfg = to_config(a);
  cfg.variant = xsort::parse_variant(variant);
  cfg.p = p;
  cfg.n = n;
  const auto rec = xsort::run_experiment(cfg);
  if (a.csv.empty()) std::cout << xsort::csv_header() << '\n';
  emit(rec, a.csv);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw xsort::ConfigError("cannot open " + trace_path);
    out << xsort::trace_json(rec).dump(2) << '\n';
  }
  std::cerr << xsort::to_string(cfg.variant) << " p=" << p << " n=" << n << ": " << rec.verification.describe()
            << ", best " << rec.best_ms << " ms, " << rec.element_bytes_moved() << " element bytes moved\n";
  return rec.ok() ? 0 : 1;
}

int cmd_sweep(const std::string& mode, const std::vector<std::string>& variants, int p, std::uint64_t n,
              const std::vector<int>& p_list, const std::vector<std::uint64_t>& npp_list, const CommonArgs& a) {
  xsort::SweepConfig sweep;
  sweep.mode = xsort::parse_sweep_mode(mode);
  for (const auto& v : variants) sweep.variants.push_back(xsort::parse_variant(v));
  sweep.base = to_config(a);
  sweep.base.p = p;
  sweep.base.n = n;
  sweep.p_list = p_list;
  sweep.per_rank_list = npp_list;
  if (a.csv.empty()) std::cout << xsort::csv_header() << '\n';
  bool all_ok = true;
  for (const auto& cfg : xsort::expand_sweep(sweep)) {
    const auto rec = xsort::run_experiment(cfg);
    emit(rec, a.csv);
    all_ok = all_ok && rec.ok();
  }
  return all_ok ? 0 : 1;
}

// Seeded fuzz over every variant with per-iteration assertions switched on.
int cmd_selftest(int seeds) {
  int runs = 0;
  int failures = 0;
  for (auto v : xsort::all_variants()) {
    for (int p : {1, 2, 4, 8, 16}) {
      for (std::uint64_t n : {0ULL, 1ULL, 7ULL, 100ULL, 1000ULL}) {
        for (auto kind : {xsort::InputKind::perm, xsort::InputKind::uniform_int, xsort::InputKind::uniform_double}) {
          for (int s = 1; s <= seeds; ++s) {
            xsort::RunConfig cfg;
            cfg.variant = v;
            cfg.p = p;
            cfg.n = n;
            cfg.input = kind;
            cfg.key_range = kind == xsort::InputKind::uniform_int ? 16.0 : 0.0;
            cfg.seed = static_cast<std::uint64_t>(s);
            cfg.repeats = 1;
            cfg.warmups = 0;
            cfg.debug_asserts = true;
            ++runs;
            bool ok = false;
            std::string why;
            try {
              const auto rec = xsort::run_experiment(cfg);
              ok = rec.ok();
              why = rec.verification.describe();
              if (ok && xsort::is_exchange_free(v)) {
                ok = rec.totals.element_units_sent == 0 && rec.totals.element_units_alltoallv <= n;
                why = "exchange-free volume bound violated";
              }
            } catch (const std::exception& e) {
              why = e.what();
            }
            if (!ok) {
              ++failures;
              std::cout << "FAIL " << xsort::to_string(v) << " p=" << p << " n=" << n << " input="
                        << xsort::to_string(kind) << " seed=" << s << ": " << why << '\n';
            }
          }
        }
      }
    }
  }
  std::cout << (failures == 0 ? "PASS" : "FAIL") << " invariant suite: " << runs - failures << "/" << runs
            << " runs ok\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Quicksort variants on a virtual SPMD fabric"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_variant;
  int run_p = 1;
  std::uint64_t run_n = 0;
  std::string trace_path;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("--variant", run_variant,
                  "qsort | hyper | xfree-qsort | xfree-hyper | combined-qsort | combined-hyper")
      ->required();
  run->add_option("--p", run_p, "Number of ranks (power of two)")->required();
  run->add_option("--n", run_n, "Total number of elements")->required();
  run->add_option("--trace-json", trace_path, "Write per-rank transfer counters as JSON");
  add_common(run, run_args);

  CommonArgs sweep_args;
  std::string sweep_mode;
  std::vector<std::string> sweep_variants{"qsort", "hyper", "xfree-qsort", "xfree-hyper", "combined-qsort",
                                          "combined-hyper"};
  int sweep_p = 64;
  std::uint64_t sweep_n = 1'000'000;
  std::vector<int> p_list{1, 2, 4, 8, 16, 32, 64};
  std::vector<std::uint64_t> npp_list{10'000, 20'000, 40'000, 80'000, 160'000, 320'000, 640'000};
  auto* sweep = app.add_subcommand("sweep", "Strong (fixed n) or weak (fixed p) scaling sweep");
  sweep->add_option("--mode", sweep_mode, "strong | weak")->required();
  sweep->add_option("--variants", sweep_variants, "Variants to run")->delimiter(',')->capture_default_str();
  sweep->add_option("--p", sweep_p, "Rank count for weak sweeps")->capture_default_str();
  sweep->add_option("--n", sweep_n, "Total elements for strong sweeps")->capture_default_str();
  sweep->add_option("--p-list", p_list, "Rank counts for strong sweeps")->delimiter(',')->capture_default_str();
  sweep->add_option("--npp-list", npp_list, "Elements per rank for weak sweeps")
      ->delimiter(',')
      ->capture_default_str();
  add_common(sweep, sweep_args);

  int selftest_seeds = 3;
  auto* selftest = app.add_subcommand("verify-selftest", "Run the seeded invariant suite");
  selftest->add_option("--seeds", selftest_seeds, "Seeds per configuration")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_variant, run_p, run_n, run_args, trace_path);
    if (*sweep) return cmd_sweep(sweep_mode, sweep_variants, sweep_p, sweep_n, p_list, npp_list, sweep_args);
    if (*selftest) return cmd_selftest(selftest_seeds);
  } catch (const xsort::Error& e) {
    std::cerr << "xsort: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

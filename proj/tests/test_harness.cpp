#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "xsort/error.hpp"
#include "xsort/experiment.hpp"
#include "xsort/inputs.hpp"
#include "xsort/verify.hpp"

using namespace xsort;
using I64 = std::int64_t;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

// Columns that do not depend on wall-clock time.
std::vector<std::string> stable_columns(const std::string& row) {
  auto cells = split_csv(row);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i >= 5 && i <= 8) continue;
    out.push_back(cells[i]);
  }
  return out;
}

RunConfig quick(Variant v, int p, std::uint64_t n) {
  RunConfig cfg;
  cfg.variant = v;
  cfg.p = p;
  cfg.n = n;
  cfg.repeats = 1;
  cfg.warmups = 0;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("input kinds round-trip") {
  for (auto k : {InputKind::perm, InputKind::uniform_int, InputKind::uniform_double}) {
    CHECK(parse_input_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_input_kind("gaussian"), ConfigError);
  CHECK_THROWS_AS(gen_input<I64>(InputKind::uniform_double, 4, 1, 1.0, 1), ConfigError);
}

TEST_CASE("block sizes differ by at most one") {
  CHECK(block_sizes(10, 4) == std::vector<std::size_t>{3, 3, 2, 2});
  CHECK(block_sizes(0, 2) == std::vector<std::size_t>{0, 0});
  CHECK(block_sizes(8, 8) == std::vector<std::size_t>(8, 1));
}

TEST_CASE("gen_input examples") {
  const auto none = gen_input<I64>(InputKind::perm, 0, 4, 0, 1);
  REQUIRE(none.size() == 4);
  for (const auto& b : none) CHECK(b.empty());

  const auto perm = gen_input<I64>(InputKind::perm, 8, 2, 0, 1);
  REQUIRE(perm.size() == 2);
  CHECK(perm[0].size() == 4);
  CHECK(oracle::sorted_concat(perm) == std::vector<I64>{0, 1, 2, 3, 4, 5, 6, 7});

  CHECK(gen_input<I64>(InputKind::perm, 100, 4, 0, 9) == gen_input<I64>(InputKind::perm, 100, 4, 0, 9));
  CHECK(oracle::concat(gen_input<I64>(InputKind::perm, 100, 4, 0, 9)) ==
        oracle::concat(gen_input<I64>(InputKind::perm, 100, 8, 0, 9)));
  CHECK(gen_input<I64>(InputKind::perm, 100, 4, 0, 9) != gen_input<I64>(InputKind::perm, 100, 4, 0, 10));
}

TEST_CASE("uniform doubles fill the range evenly") {
  constexpr std::uint64_t n = 1'000'000;
  constexpr double range = 1e8;
  const auto blocks = gen_input<double>(InputKind::uniform_double, n, 4, range, 17);
  std::size_t quartile[4] = {0, 0, 0, 0};
  std::size_t total = 0;
  for (const auto& b : blocks) {
    for (double x : b) {
      REQUIRE(x >= 0.0);
      REQUIRE(x < range);
      ++quartile[static_cast<int>(x / (range / 4))];
      ++total;
    }
  }
  CHECK(total == n);
  for (auto q : quartile) CHECK(std::abs(static_cast<double>(q) - n / 4.0) <= 0.01 * n);
}

TEST_CASE("uniform ints stay below the key range") {
  const auto blocks = gen_input<I64>(InputKind::uniform_int, 10000, 2, 10, 3);
  std::set<I64> seen;
  for (const auto& b : blocks) seen.insert(b.begin(), b.end());
  CHECK(seen == std::set<I64>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("verify examples") {
  const std::vector<std::vector<I64>> inputs{{4, 1, 3}, {0, 5, 2}};
  const std::vector<std::vector<I64>> good{{0, 1, 2}, {3, 4, 5}};
  auto ok = verify<I64>(inputs, good);
  CHECK(ok.ok());
  CHECK(ok.imbalance == 0.0);

  const std::vector<std::vector<I64>> swapped{{0, 1, 3}, {2, 4, 5}};
  auto bad = verify<I64>(inputs, swapped);
  CHECK(bad.sorted_ok);
  CHECK_FALSE(bad.boundary_ok);
  CHECK(bad.multiset_ok);
  CHECK_FALSE(bad.ok());

  const std::vector<std::vector<I64>> lost{{0, 1, 2}, {3, 4}};
  auto missing = verify<I64>(inputs, lost);
  CHECK_FALSE(missing.multiset_ok);
  CHECK(missing.imbalance == 1.0);

  const std::vector<std::vector<I64>> unsorted{{1, 0, 2}, {3, 4, 5}};
  CHECK_FALSE(verify<I64>(inputs, unsorted).sorted_ok);

  const std::vector<std::vector<I64>> skewed{{0, 1, 2, 3, 4, 5}, {}};
  auto lopsided = verify<I64>(inputs, skewed);
  CHECK(lopsided.ok());
  CHECK(lopsided.imbalance == 3.0);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_experiment(quick(Variant::qsort, 3, 10)), ConfigError);
  auto cfg = quick(Variant::qsort, 2, 10);
  cfg.repeats = 0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg = quick(Variant::qsort, 2, 10);
  cfg.warmups = -1;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg = quick(Variant::qsort, 2, 10);
  cfg.pivot.sample_size = 0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("single-rank speedup is near one") {
  auto cfg = quick(Variant::qsort, 1, 200000);
  cfg.repeats = 3;
  cfg.input = InputKind::uniform_double;
  const auto rec = run_experiment(cfg);
  CHECK(rec.ok());
  CHECK(rec.speedup > 0.3);
  CHECK(rec.speedup < 3.0);
  CHECK(rec.efficiency == doctest::Approx(rec.speedup));
}

TEST_CASE("run records carry verification, totals and byte weight") {
  auto cfg = quick(Variant::xfree_qsort, 8, 10000);
  const auto rec = run_experiment(cfg);
  CHECK(rec.ok());
  CHECK(rec.per_rank.size() == 8);
  CHECK(rec.totals.element_units_sent == 0);
  CHECK(rec.totals.element_units_alltoallv <= 10000);
  CHECK(rec.element_bytes_moved() == rec.totals.element_units_alltoallv * 8);
  cfg.element_byte_weight = 100;
  CHECK(run_experiment(cfg).element_bytes_moved() == rec.totals.element_units_alltoallv * 100);
}

TEST_CASE("CSV header and rows") {
  CHECK(csv_header() ==
        "variant,p,n,input,seed,rep_best_ms,baseline_ms,speedup,efficiency,imbalance,"
        "elem_exchange_units,elem_alltoallv_units,pivot_units,switch_group_size");
  auto cfg = quick(Variant::combined_qsort, 4, 100000);
  cfg.seed = 7;
  const auto rec = run_experiment(cfg);
  const auto cells = split_csv(csv_row(rec));
  REQUIRE(cells.size() == split_csv(csv_header()).size());
  CHECK(cells[0] == "combined-qsort");
  CHECK(cells[1] == "4");
  CHECK(cells[2] == "100000");
  CHECK(cells[3] == "perm");
  CHECK(cells[4] == "7");
  CHECK(cells[13] == std::to_string(rec.switch_group_size.value_or(0)));
  CHECK(cells[10] == std::to_string(rec.totals.element_units_sent));

  RunRecord failed = rec;
  failed.verification.multiset_ok = false;
  const auto fail_cells = split_csv(csv_row(failed));
  CHECK(fail_cells[5] == "FAIL");
  CHECK(fail_cells[8] == "FAIL");
}

TEST_CASE("identical configs give identical non-timing CSV columns") {
  for (auto v : all_variants()) {
    auto cfg = quick(v, 8, 20000);
    cfg.input = InputKind::uniform_double;
    cfg.seed = 12;
    CHECK(stable_columns(csv_row(run_experiment(cfg))) == stable_columns(csv_row(run_experiment(cfg))));
  }
}

TEST_CASE("append_csv writes the header once") {
  const auto path = std::filesystem::temp_directory_path() / "xsort_append_test.csv";
  std::filesystem::remove(path);
  const auto rec = run_experiment(quick(Variant::hyper, 2, 100));
  append_csv(path, rec);
  append_csv(path, rec);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == csv_header());
  CHECK(lines[1] == csv_row(rec));
  CHECK(lines[2] == lines[1]);
  std::filesystem::remove(path);
}

TEST_CASE("trace JSON mirrors the per-rank counters") {
  const auto rec = run_experiment(quick(Variant::qsort, 4, 1000));
  const auto j = trace_json(rec);
  CHECK(j["variant"] == "qsort");
  CHECK(j["p"] == 4);
  CHECK(j["n"] == 1000);
  REQUIRE(j["per_rank"].size() == 4);
  std::uint64_t sent = 0;
  for (const auto& r : j["per_rank"]) {
    sent += r["element_units_sent"].get<std::uint64_t>();
    CHECK(r["collectives"]["exchange"] == 2);
  }
  CHECK(sent == rec.totals.element_units_sent);
}

TEST_CASE("sweep expansion") {
  SweepConfig strong;
  strong.mode = SweepMode::strong;
  strong.variants = {Variant::qsort, Variant::xfree_qsort};
  strong.base.n = 1000;
  strong.p_list = {1, 2, 4};
  const auto s = expand_sweep(strong);
  REQUIRE(s.size() == 6);
  CHECK(s[3].p == 2);
  CHECK(s[3].variant == Variant::xfree_qsort);
  CHECK(s[5].n == 1000);

  SweepConfig weak;
  weak.mode = SweepMode::weak;
  weak.variants = all_variants();
  weak.base.p = 8;
  weak.per_rank_list = {10000, 20000, 40000, 80000, 160000, 320000, 640000};
  const auto w = expand_sweep(weak);
  REQUIRE(w.size() == 42);
  CHECK(w.back().n == 640000ULL * 8);
  CHECK(w.front().p == 8);

  CHECK(parse_sweep_mode("weak") == SweepMode::weak);
  CHECK_THROWS_AS(parse_sweep_mode("medium"), ConfigError);
}

TEST_CASE("strong sweep keeps exchange-free volume within n") {
  constexpr std::uint64_t n = 100000;
  SweepConfig sweep;
  sweep.mode = SweepMode::strong;
  sweep.variants = {Variant::xfree_qsort, Variant::xfree_hyper};
  sweep.base = quick(Variant::xfree_qsort, 1, n);
  sweep.base.input = InputKind::uniform_double;
  sweep.p_list = {2, 4, 8, 16, 32, 64};
  for (const auto& cfg : expand_sweep(sweep)) {
    const auto rec = run_experiment(cfg);
    CHECK(rec.ok());
    CHECK(rec.totals.element_units_sent == 0);
    CHECK(rec.totals.element_units_alltoallv <= n);
    // Each element leaves its rank unless it already sits in its destination block.
    const double expected = n * (1.0 - 1.0 / cfg.p);
    CHECK(std::abs(static_cast<double>(rec.totals.element_units_alltoallv) - expected) <= 0.05 * n);
  }
}

}  // TEST_SUITE

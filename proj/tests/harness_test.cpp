#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "irsim/harness.hpp"

using namespace irsim;

namespace {

ExperimentConfig sweep_config() {
  ExperimentConfig cfg;
  cfg.M = 4;
  cfg.N = 16;
  cfg.groupEdge = 2;
  cfg.L = 2;
  cfg.K = 1;
  cfg.userDistance = 30.0;
  cfg.sinrTargetsLow = RealVector::Constant(2, 4.0);
  cfg.sinrTargetHigh = 1.0;
  cfg.seed = 9;
  cfg.validate();
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("sweep grids are inclusive with half-step tolerance") {
  CHECK(sweep_grid(0.0, 1.0, 0.25) ==
        std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  // Stop lands within half a step of the last point due to rounding.
  const auto grid = sweep_grid(0.1, 0.4, 0.1);
  REQUIRE(grid.size() == 4);
  CHECK(grid.back() == doctest::Approx(0.4));
  // Degenerate single-point grid.
  CHECK(sweep_grid(5.0, 5.0, 0.0) == std::vector<double>{5.0});
  CHECK_THROWS_AS(sweep_grid(5.0, 2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(sweep_grid(0.0, 1.0, -1.0), InvalidInput);
}

TEST_CASE("dBm and watts round-trip") {
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0));
  for (double dbm : {-85.0, -10.0, 0.0, 17.5, 46.0})
    CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm));
}

TEST_CASE("sweep kinds parse by name") {
  CHECK(parse_sweep_kind("distance") == SweepKind::Distance);
  CHECK(parse_sweep_kind("sinrTarget") == SweepKind::SinrTarget);
  CHECK(parse_sweep_kind("irsElements") == SweepKind::IrsElements);
  CHECK(parse_sweep_kind("power") == SweepKind::Power);
  CHECK_THROWS_AS(parse_sweep_kind("bogus"), InvalidInput);
  for (SweepKind k : {SweepKind::Distance, SweepKind::SinrTarget,
                      SweepKind::IrsElements, SweepKind::Power})
    CHECK(parse_sweep_kind(sweep_kind_name(k)) == k);
}

TEST_CASE("CSV layout") {
  ExperimentResult result;
  result.experimentId = "power-sweep";
  result.seed = 7;
  CHECK(to_csv(result) ==
        "experiment,sweep,scheme,metric,value,trials,stderr,seed\n");

  result.rows.push_back({2.0, "B", "x", 1.5, 3, 0.1});
  result.rows.push_back({1.0, "A", "x", 2.5, 3, 0.2});
  const auto lines = lines_of(to_csv(result));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "experiment,sweep,scheme,metric,value,trials,stderr,seed");
  CHECK(lines[1].substr(0, 12) == "power-sweep,");
  // Every row carries the experiment id and the seed.
  for (size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].find("power-sweep,") == 0);
    CHECK(lines[i].rfind(",7") == lines[i].size() - 2);
  }

  CHECK_THROWS_AS(emit_csv(result, "/nonexistent-dir/out.csv"), IoError);
}

TEST_CASE("power sweep is deterministic and thread-invariant") {
  const ExperimentConfig cfg = sweep_config();
  const std::vector<double> grid = {6.0, 10.0};
  const std::vector<SchemeId> schemes = {SchemeId::RandomPhase_MMSE,
                                         SchemeId::NoIrs_MMSE};
  HarnessOptions one;
  one.trials = 12;
  one.threads = 1;
  HarnessOptions four = one;
  four.threads = 4;

  const ExperimentResult a =
      run_power_sweep(cfg, SweepKind::SinrTarget, grid, schemes, one);
  const ExperimentResult b =
      run_power_sweep(cfg, SweepKind::SinrTarget, grid, schemes, four);
  const ExperimentResult c =
      run_power_sweep(cfg, SweepKind::SinrTarget, grid, schemes, one);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(to_csv(a) == to_csv(c));
  CHECK(!infeasible_everywhere(a));

  // Rows are ordered by sweep value, then scheme, then metric.
  for (size_t i = 1; i < a.rows.size(); ++i) {
    const auto& p = a.rows[i - 1];
    const auto& q = a.rows[i];
    CHECK((p.sweepValue < q.sweepValue ||
           (p.sweepValue == q.sweepValue &&
            (p.scheme < q.scheme ||
             (p.scheme == q.scheme && p.metric <= q.metric)))));
  }
  // One power row and one infeasible-count row per (point, scheme).
  CHECK(a.rows.size() == grid.size() * schemes.size() * 2);
}

TEST_CASE("standard error shrinks with the trial count") {
  const ExperimentConfig cfg = sweep_config();
  const std::vector<double> grid = {8.0};
  const std::vector<SchemeId> schemes = {SchemeId::RandomPhase_MMSE};
  HarnessOptions small;
  small.trials = 60;
  HarnessOptions large;
  large.trials = 240;

  const ExperimentResult a =
      run_power_sweep(cfg, SweepKind::SinrTarget, grid, schemes, small);
  const ExperimentResult b =
      run_power_sweep(cfg, SweepKind::SinrTarget, grid, schemes, large);
  double seSmall = -1.0, seLarge = -1.0;
  for (const auto& row : a.rows)
    if (row.metric == "txPowerDbm") seSmall = row.stderrValue;
  for (const auto& row : b.rows)
    if (row.metric == "txPowerDbm") seLarge = row.stderrValue;
  REQUIRE(seSmall > 0.0);
  REQUIRE(seLarge > 0.0);
  // Quadrupling the trials should halve the standard error, up to noise.
  CHECK(seLarge < seSmall * 0.75);
  CHECK(seLarge > seSmall * 0.25);
}

TEST_CASE("infeasible targets everywhere are reported, not hidden") {
  ExperimentConfig cfg = sweep_config();
  cfg.sinrTargetsLow.setConstant(1e12);  // unreachable
  cfg.validate();
  HarnessOptions options;
  options.trials = 4;
  const ExperimentResult result = run_power_sweep(
      cfg, SweepKind::SinrTarget, {1e12}, {SchemeId::NoIrs_MMSE}, options);
  CHECK(infeasible_everywhere(result));
  long infeasibleDrops = -1;
  for (const auto& row : result.rows)
    if (row.metric == "infeasibleDrops")
      infeasibleDrops = static_cast<long>(row.value);
  CHECK(infeasibleDrops == 4);
}

TEST_CASE("convergence run emits one monotone trace per scheme") {
  const ExperimentConfig cfg = sweep_config();
  HarnessOptions options;
  const ExperimentResult result = run_convergence(cfg, options);
  CHECK(result.experimentId == "convergence");
  REQUIRE(!result.rows.empty());
  double prevMmse = std::numeric_limits<double>::infinity();
  double prevZf = std::numeric_limits<double>::infinity();
  for (const auto& row : result.rows) {
    CHECK(row.metric == "totalPowerDbm");
    CHECK(row.trials == 1);
    double& prev =
        row.scheme == scheme_name(SchemeId::ProposedAO_MMSE) ? prevMmse
                                                             : prevZf;
    CHECK(row.value <= prev + 1e-9);
    prev = row.value;
  }
}

TEST_CASE("SER sweep rows carry binomial uncertainty") {
  const ExperimentConfig cfg = sweep_config();
  HarnessOptions options;
  options.trials = 2;
  options.pairsPerPoint = 500;
  const ExperimentResult result = run_ser_sweep(
      cfg, {0.0, 10.0}, {SchemeId::NullSpaceNoIrs}, options);
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.metric == "ser");
    CHECK(row.value >= 0.0);
    CHECK(row.value <= 1.0);
    const double n = 2.0 * 500.0 * 2.0;
    CHECK(row.stderrValue ==
          doctest::Approx(std::sqrt(row.value * (1.0 - row.value) / n)));
  }
}

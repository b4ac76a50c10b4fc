#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsim/benchmarks.hpp"
#include "irsim/channel.hpp"

namespace irsim {

struct ResultRow {
  double sweepValue = 0.0;
  std::string scheme;
  std::string metric;
  double value = 0.0;
  long trials = 0;
  double stderrValue = 0.0;
};

struct ExperimentResult {
  std::string experimentId;
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
  ExperimentConfig config;
};

struct HarnessOptions {
  int trials = 100;        // Monte Carlo drops per grid point
  int threads = 1;
  int pairsPerPoint = 2000;  // coded pairs per drop per SER point
  AoSettings ao;
};

enum class SweepKind { Distance, SinrTarget, IrsElements, Power };

SweepKind parse_sweep_kind(const std::string& name);
std::string sweep_kind_name(SweepKind kind);
// Inclusive grid start, start+step, ... up to stop (within half a step).
std::vector<double> sweep_grid(double start, double stop, double step);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Per-iteration total power of the AO schemes on one feasible drop.
ExperimentResult run_convergence(const ExperimentConfig& cfg,
                                 const HarnessOptions& options);

// Converged transmit power averaged over drops, per scheme per grid point.
// sweep is Distance, SinrTarget, or IrsElements.
ExperimentResult run_power_sweep(const ExperimentConfig& cfg, SweepKind sweep,
                                 const std::vector<double>& grid,
                                 const std::vector<SchemeId>& schemes,
                                 const HarnessOptions& options);

// Monte Carlo SER per scheme over a transmit-power grid in dBm.
ExperimentResult run_ser_sweep(const ExperimentConfig& cfg,
                               const std::vector<double>& powerGridDbm,
                               const std::vector<SchemeId>& schemes,
                               const HarnessOptions& options);

std::string to_csv(const ExperimentResult& result);
void emit_csv(const ExperimentResult& result, const std::string& path);

// True when the result carries no successful measurement rows at all.
bool infeasible_everywhere(const ExperimentResult& result);

}  // namespace irsim

#include "irsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

namespace irsim {

namespace {

// Deterministic stream key: experiment lane, grid point, drop, sub-lane.
std::uint64_t stream_key(std::uint64_t experiment, std::uint64_t grid,
                         std::uint64_t drop, std::uint64_t lane) {
  return ((experiment * 1000003ULL + grid) * 1000003ULL + drop) * 64ULL + lane;
}

constexpr std::uint64_t kChannelLane = 63;

void parallel_for(long n, int threads, const std::function<void(long)>& body);

}  // namespace

SweepKind parse_sweep_kind(const std::string& name) {
  if (name == "distance") return SweepKind::Distance;
  if (name == "sinrTarget") return SweepKind::SinrTarget;
  if (name == "irsElements") return SweepKind::IrsElements;
  if (name == "power") return SweepKind::Power;
  throw InvalidInput("unknown sweep: " + name);
}

std::string sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::Distance: return "distance";
    case SweepKind::SinrTarget: return "sinrTarget";
    case SweepKind::IrsElements: return "irsElements";
    case SweepKind::Power: return "power";
  }
  throw InvalidInput("unknown sweep kind");
}

std::vector<double> sweep_grid(double start, double stop, double step) {
  if (step <= 0.0 && stop > start)
    throw InvalidInput("sweep_grid: step must be positive");
  std::vector<double> grid;
  if (step <= 0.0) {
    grid.push_back(start);
    return grid;
  }
  for (double v = start; v <= stop + 0.5 * step; v += step)
    grid.push_back(v);
  if (grid.empty()) throw InvalidInput("sweep_grid: empty grid");
  return grid;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) {
  return 10.0 * std::log10(watts) + 30.0;
}

namespace {

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<long>(threads, n));
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

ExperimentConfig apply_sweep(const ExperimentConfig& base, SweepKind kind,
                             double value) {
  ExperimentConfig cfg = base;
  switch (kind) {
    case SweepKind::Distance:
      cfg.userDistance = value;
      break;
    case SweepKind::SinrTarget:
      cfg.sinrTargetsLow.setConstant(value);
      break;
    case SweepKind::IrsElements:
      cfg.N = static_cast<int>(std::lround(value));
      break;
    case SweepKind::Power:
      throw InvalidInput("power sweep applies to SER experiments only");
  }
  cfg.validate();
  return cfg;
}

// Converged total transmit power in watts; NaN marks an infeasible drop.
double scheme_power(const ExperimentConfig& cfg, const SystemGeometry& geom,
                    const ChannelSet& channels, SchemeId scheme,
                    const HarnessOptions& options, Rng& rng) {
  try {
    switch (scheme) {
      case SchemeId::ProposedAO_MMSE:
      case SchemeId::ProposedAO_ZF: {
        AoSettings settings = options.ao;
        settings.transmitMethod = scheme == SchemeId::ProposedAO_MMSE
                                      ? TransmitMethod::MMSE
                                      : TransmitMethod::ZF;
        const AoResult result =
            alternating_optimize(cfg, channels, geom, settings, rng);
        if (result.trace.status == AoStatus::Infeasible)
          return std::numeric_limits<double>::quiet_NaN();
        return total_power(result.precoders);
      }
      case SchemeId::RandomPhase_MMSE:
        return total_power(random_phase_scheme(cfg, channels, geom, rng).first);
      case SchemeId::DftCodebook_MMSE:
        return total_power(dft_codebook_scheme(cfg, channels, geom).first);
      case SchemeId::NoIrs_MMSE:
        return total_power(no_irs_scheme(cfg, channels, TransmitMethod::MMSE));
      case SchemeId::NoIrs_ZF:
        return total_power(no_irs_scheme(cfg, channels, TransmitMethod::ZF));
      default:
        throw InvalidInput("scheme_power: not a precoding scheme");
    }
  } catch (const InfeasibleTargets&) {
  } catch (const DualNotConverged&) {
  } catch (const RankDeficient&) {
  } catch (const EmptyNullSpace&) {
  } catch (const IllConditioned&) {
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.sweepValue != b.sweepValue)
                       return a.sweepValue < b.sweepValue;
                     if (a.scheme != b.scheme) return a.scheme < b.scheme;
                     return a.metric < b.metric;
                   });
}

}  // namespace

ExperimentResult run_convergence(const ExperimentConfig& cfg,
                                 const HarnessOptions& options) {
  ExperimentResult result;
  result.experimentId = "convergence";
  result.seed = cfg.seed;
  result.config = cfg;

  const std::vector<std::pair<SchemeId, TransmitMethod>> variants = {
      {SchemeId::ProposedAO_MMSE, TransmitMethod::MMSE},
      {SchemeId::ProposedAO_ZF, TransmitMethod::ZF},
  };

  for (int drop = 0; drop < std::max(1, options.trials); ++drop) {
    Rng chanRng =
        Rng::stream(cfg.seed, stream_key(1, 0, static_cast<std::uint64_t>(drop),
                                         kChannelLane));
    const SystemGeometry geom = build_geometry(cfg, chanRng);
    const ChannelSet channels = realize_channels(cfg, geom, chanRng);

    std::vector<ResultRow> rows;
    bool feasible = true;
    for (const auto& [scheme, method] : variants) {
      AoSettings settings = options.ao;
      settings.transmitMethod = method;
      Rng rng = Rng::stream(
          cfg.seed, stream_key(1, 0, static_cast<std::uint64_t>(drop),
                               static_cast<std::uint64_t>(scheme)));
      const AoResult ao =
          alternating_optimize(cfg, channels, geom, settings, rng);
      if (ao.trace.status == AoStatus::Infeasible ||
          ao.trace.perIteration.empty()) {
        feasible = false;
        break;
      }
      for (size_t i = 0; i < ao.trace.perIteration.size(); ++i) {
        ResultRow row;
        row.sweepValue = static_cast<double>(i);
        row.scheme = scheme_name(scheme);
        row.metric = "totalPowerDbm";
        row.value = watts_to_dbm(ao.trace.perIteration[i].totalPower);
        row.trials = 1;
        rows.push_back(std::move(row));
      }
    }
    if (feasible) {
      result.rows = std::move(rows);
      break;
    }
  }
  sort_rows(result.rows);
  return result;
}

ExperimentResult run_power_sweep(const ExperimentConfig& cfg, SweepKind sweep,
                                 const std::vector<double>& grid,
                                 const std::vector<SchemeId>& schemes,
                                 const HarnessOptions& options) {
  if (grid.empty()) throw InvalidInput("run_power_sweep: empty grid");
  if (schemes.empty()) throw InvalidInput("run_power_sweep: no schemes");
  ExperimentResult result;
  result.experimentId = "power-sweep";
  result.seed = cfg.seed;
  result.config = cfg;

  const long trials = std::max(1, options.trials);
  const long points = static_cast<long>(grid.size());
  // powers[point][scheme][drop], NaN for infeasible drops.
  std::vector<std::vector<std::vector<double>>> powers(
      static_cast<size_t>(points),
      std::vector<std::vector<double>>(
          schemes.size(), std::vector<double>(static_cast<size_t>(trials))));

  parallel_for(points * trials, options.threads, [&](long task) {
    const long g = task / trials;
    const long t = task % trials;
    const ExperimentConfig pointCfg =
        apply_sweep(cfg, sweep, grid[static_cast<size_t>(g)]);
    Rng chanRng = Rng::stream(
        cfg.seed, stream_key(2, static_cast<std::uint64_t>(g),
                             static_cast<std::uint64_t>(t), kChannelLane));
    const SystemGeometry geom = build_geometry(pointCfg, chanRng);
    const ChannelSet channels = realize_channels(pointCfg, geom, chanRng);
    for (size_t s = 0; s < schemes.size(); ++s) {
      Rng rng = Rng::stream(
          cfg.seed,
          stream_key(2, static_cast<std::uint64_t>(g),
                     static_cast<std::uint64_t>(t),
                     static_cast<std::uint64_t>(schemes[s])));
      powers[static_cast<size_t>(g)][s][static_cast<size_t>(t)] =
          scheme_power(pointCfg, geom, channels, schemes[s], options, rng);
    }
  });

  for (long g = 0; g < points; ++g) {
    for (size_t s = 0; s < schemes.size(); ++s) {
      const auto& drops = powers[static_cast<size_t>(g)][s];
      double sum = 0.0, sumSq = 0.0;
      long feasible = 0;
      for (double w : drops) {
        if (std::isnan(w)) continue;
        sum += w;
        sumSq += w * w;
        ++feasible;
      }
      const double sweepValue = grid[static_cast<size_t>(g)];
      const std::string tag = scheme_name(schemes[s]);
      if (feasible > 0) {
        const double mean = sum / static_cast<double>(feasible);
        double se = 0.0;
        if (feasible > 1) {
          const double var =
              std::max(0.0, (sumSq - sum * mean) /
                                static_cast<double>(feasible - 1));
          se = std::sqrt(var / static_cast<double>(feasible));
        }
        ResultRow row;
        row.sweepValue = sweepValue;
        row.scheme = tag;
        row.metric = "txPowerDbm";
        row.value = watts_to_dbm(mean);
        row.trials = feasible;
        // Delta-method conversion of the linear-power standard error to dB.
        row.stderrValue = 10.0 / std::log(10.0) * se / mean;
        result.rows.push_back(std::move(row));
      }
      ResultRow inf;
      inf.sweepValue = sweepValue;
      inf.scheme = tag;
      inf.metric = "infeasibleDrops";
      inf.value = static_cast<double>(trials - feasible);
      inf.trials = trials;
      result.rows.push_back(std::move(inf));
    }
  }
  sort_rows(result.rows);
  return result;
}

ExperimentResult run_ser_sweep(const ExperimentConfig& cfg,
                               const std::vector<double>& powerGridDbm,
                               const std::vector<SchemeId>& schemes,
                               const HarnessOptions& options) {
  if (powerGridDbm.empty()) throw InvalidInput("run_ser_sweep: empty grid");
  if (schemes.empty()) throw InvalidInput("run_ser_sweep: no schemes");
  for (SchemeId s : schemes)
    if (!is_ser_scheme(s))
      throw InvalidInput("run_ser_sweep: " + scheme_name(s) +
                         " is not a SER scheme");
  ExperimentResult result;
  result.experimentId = "ser-sweep";
  result.seed = cfg.seed;
  result.config = cfg;

  const long trials = std::max(1, options.trials);
  const long points = static_cast<long>(powerGridDbm.size());
  const int pairs = std::max(1, options.pairsPerPoint);
  std::vector<std::vector<std::vector<double>>> sers(
      static_cast<size_t>(points),
      std::vector<std::vector<double>>(
          schemes.size(), std::vector<double>(static_cast<size_t>(trials))));

  parallel_for(points * trials, options.threads, [&](long task) {
    const long g = task / trials;
    const long t = task % trials;
    const double watts = dbm_to_watts(powerGridDbm[static_cast<size_t>(g)]);
    Rng chanRng = Rng::stream(
        cfg.seed, stream_key(3, static_cast<std::uint64_t>(g),
                             static_cast<std::uint64_t>(t), kChannelLane));
    const SystemGeometry geom = build_geometry(cfg, chanRng);
    const ChannelSet channels = realize_channels(cfg, geom, chanRng);
    for (size_t s = 0; s < schemes.size(); ++s) {
      Rng rng = Rng::stream(
          cfg.seed,
          stream_key(3, static_cast<std::uint64_t>(g),
                     static_cast<std::uint64_t>(t),
                     static_cast<std::uint64_t>(schemes[s])));
      sers[static_cast<size_t>(g)][s][static_cast<size_t>(t)] =
          simulate_ser(cfg, channels, schemes[s], watts, pairs, 8, rng);
    }
  });

  for (long g = 0; g < points; ++g) {
    for (size_t s = 0; s < schemes.size(); ++s) {
      const auto& drops = sers[static_cast<size_t>(g)][s];
      double sum = 0.0;
      for (double v : drops) sum += v;
      const double ser = sum / static_cast<double>(trials);
      const double symbols =
          2.0 * static_cast<double>(pairs) * static_cast<double>(trials);
      ResultRow row;
      row.sweepValue = powerGridDbm[static_cast<size_t>(g)];
      row.scheme = scheme_name(schemes[s]);
      row.metric = "ser";
      row.value = ser;
      row.trials = trials;
      row.stderrValue = std::sqrt(std::max(0.0, ser * (1.0 - ser)) / symbols);
      result.rows.push_back(std::move(row));
    }
  }
  sort_rows(result.rows);
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const ExperimentResult& result) {
  std::string out = "experiment,sweep,scheme,metric,value,trials,stderr,seed\n";
  for (const ResultRow& row : result.rows) {
    out += result.experimentId;
    out += ',';
    out += format_double(row.sweepValue);
    out += ',';
    out += row.scheme;
    out += ',';
    out += row.metric;
    out += ',';
    out += format_double(row.value);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += format_double(row.stderrValue);
    out += ',';
    out += std::to_string(result.seed);
    out += '\n';
  }
  return out;
}

void emit_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  const std::string body = to_csv(result);
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file) throw IoError("write failed: " + path);
}

bool infeasible_everywhere(const ExperimentResult& result) {
  for (const ResultRow& row : result.rows)
    if (row.metric != "infeasibleDrops") return false;
  return true;
}

}  // namespace irsim

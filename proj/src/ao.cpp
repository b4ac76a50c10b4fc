#include "irsim/ao.hpp"

#include <cmath>
#include <limits>

namespace irsim {

double total_power(const PrecoderSet& p) {
  double sum = 0.0;
  for (const auto& w : p.lowBeams) sum += w.squaredNorm();
  if (p.highBeam.size() > 0) sum += p.highBeam.squaredNorm();
  return sum;
}

namespace {

RealVector stacked_targets(const ExperimentConfig& cfg) {
  const bool high = cfg.K > 0;
  RealVector t(cfg.L + (high ? 1 : 0));
  t.head(cfg.L) = cfg.sinrTargetsLow;
  if (high) t(cfg.L) = cfg.sinrTargetHigh;
  return t;
}

struct Subproblem {
  std::vector<ComplexVector> effectiveChannels;
  CorrelationSet corr;
  RealVector targets;
};

Subproblem make_subproblem(const ExperimentConfig& cfg,
                           const ChannelSet& channels,
                           const ComplexVector& elementPhases) {
  Subproblem sub;
  for (int l = 0; l < cfg.L; ++l)
    sub.effectiveChannels.push_back(
        effective_low_channel(channels.directLow[static_cast<size_t>(l)],
                              channels.irsLow[static_cast<size_t>(l)],
                              elementPhases, channels.bsIrs, 0.0));
  const RealVector distances =
      RealVector::Constant(cfg.K, cfg.userDistance);
  sub.corr = build_correlations(sub.effectiveChannels, channels.bsIrs,
                                cfg.noisePower, distances, cfg.alphaUser,
                                cfg.beta);
  sub.targets = stacked_targets(cfg);
  return sub;
}

double min_margin(const Subproblem& sub, const PrecoderSet& set) {
  if (sub.targets.size() == 0) return 1.0;
  const RealVector s = achieved_sinrs(set, sub.corr, sub.effectiveChannels);
  return (s.array() / sub.targets.array()).minCoeff();
}

}  // namespace

PrecoderSet transmit_precode(const ExperimentConfig& cfg,
                             const ChannelSet& channels,
                             const ComplexVector& groupPhases,
                             const std::vector<int>& groupIndex,
                             TransmitMethod method) {
  ReflectState state;
  state.groupPhases = groupPhases;
  const ComplexVector element = state.elementPhases(groupIndex);
  const Subproblem sub = make_subproblem(cfg, channels, element);
  if (method == TransmitMethod::MMSE)
    return mmse_precode(sub.corr, sub.effectiveChannels, sub.targets);
  return zf_with_null_space(sub.effectiveChannels, channels.bsIrs, sub.targets,
                            cfg.noisePower, sub.corr.sigmaBarSq, cfg.K > 0);
}

namespace {

AoResult single_start_optimize(const ExperimentConfig& cfg,
                               const ChannelSet& channels,
                               const SystemGeometry& geom,
                               const AoSettings& settings, Rng& rng,
                               const ComplexVector& initialPhases) {
  AoResult result;
  ReflectState state;
  state.groupPhases = initialPhases;
  state.commonPhase = 0.0;

  auto solve_tx = [&](const ComplexVector& phases) {
    return transmit_precode(cfg, channels, phases, geom.groupIndex,
                            settings.transmitMethod);
  };

  try {
    result.precoders = solve_tx(state.groupPhases);
  } catch (const std::runtime_error&) {
    result.trace.status = AoStatus::Infeasible;
    return result;
  }
  result.reflectState = state;

  auto record = [&](const PrecoderSet& set, const ReflectState& st) {
    const Subproblem sub =
        make_subproblem(cfg, channels, st.elementPhases(geom.groupIndex));
    AoIterate it;
    it.totalPower = total_power(set);
    it.minSinrMargin = min_margin(sub, set);
    it.reflectState = st;
    it.beamPowers = set.powers;
    result.trace.perIteration.push_back(std::move(it));
  };
  record(result.precoders, state);

  result.trace.status = AoStatus::MaxIterations;
  int stalls = 0;  // consecutive rounds without a meaningful decrease
  for (int i = 0; i < settings.maxIterations; ++i) {
    if (cfg.L == 0) {  // no reflect subproblem exists
      result.trace.status = AoStatus::Converged;
      break;
    }
    const double prevPower = total_power(result.precoders);

    const SdrInstance inst = build_sdr(
        result.precoders, channels.directLow, channels.irsLow, channels.bsIrs,
        geom.groupIndex, cfg.groupCount(), 0.0, cfg.sinrTargetsLow,
        cfg.noisePower);
    const SdpSolution sdp = solve_reflect(inst);
    if (sdp.status != SdpStatus::Optimal) {
      result.trace.status = AoStatus::Converged;
      break;
    }
    // The best SINR margin is only a proxy for the re-solved power, so draw
    // several independent candidate batches and score each by the transmit
    // power it actually achieves.
    const int batches = 5;
    const int perBatch =
        std::max(1, settings.randomizationCount / batches);
    ReflectState cand;
    PrecoderSet candSet;
    bool accepted = false;
    double candPowerBest = std::numeric_limits<double>::infinity();
    for (int b = 0; b < batches; ++b) {
      const ReflectState proposal = gaussian_randomize(sdp, inst, perBatch, rng);
      try {
        PrecoderSet proposalSet = solve_tx(proposal.groupPhases);
        const double p = total_power(proposalSet);
        if (p <= prevPower && p < candPowerBest) {
          candPowerBest = p;
          cand = proposal;
          candSet = std::move(proposalSet);
          accepted = true;
        }
      } catch (const std::runtime_error&) {
        // Infeasible candidate: ignore this batch.
      }
    }
    if (accepted) {
      const double candPower = total_power(candSet);
      result.precoders = std::move(candSet);
      result.reflectState = cand;
      record(result.precoders, cand);
      // The randomization is stochastic, so one small step does not mean the
      // reflect direction is exhausted; convergence needs persistence.
      if (prevPower - candPower >= settings.threshold * prevPower) {
        stalls = 0;
        continue;
      }
    }
    if (++stalls >= 3) {
      result.trace.status = AoStatus::Converged;
      break;
    }
  }

  // The stochastic search can stop a fraction of a dB short of the nearest
  // local optimum, so finish with deterministic coordinate descent on the
  // group phases, scored by the re-solved transmit power.
  if (cfg.L > 0 && result.trace.status != AoStatus::Infeasible) {
    static constexpr double kOffsets[] = {
        M_PI,       M_PI / 2.0,  -M_PI / 2.0,  M_PI / 4.0,  -M_PI / 4.0,
        M_PI / 8.0, -M_PI / 8.0, M_PI / 16.0,  -M_PI / 16.0};
    for (int sweep = 0; sweep < 4; ++sweep) {
      bool improved = false;
      for (int g = 0; g < cfg.groupCount(); ++g) {
        double bestPower = total_power(result.precoders);
        ComplexVector bestPhases;
        PrecoderSet bestSet;
        bool found = false;
        for (const double off : kOffsets) {
          ComplexVector cand = result.reflectState.groupPhases;
          cand(g) *= std::exp(kImag * off);
          try {
            PrecoderSet set = solve_tx(cand);
            const double p = total_power(set);
            if (p < bestPower * (1.0 - 1e-12)) {
              bestPower = p;
              bestPhases = std::move(cand);
              bestSet = std::move(set);
              found = true;
            }
          } catch (const std::runtime_error&) {
            // Infeasible phase candidate: skip.
          }
        }
        if (found) {
          result.reflectState.groupPhases = std::move(bestPhases);
          result.precoders = std::move(bestSet);
          improved = true;
        }
      }
      if (improved)
        record(result.precoders, result.reflectState);
      else
        break;
    }
  }
  return result;
}

}  // namespace

AoResult alternating_optimize(const ExperimentConfig& cfg,
                              const ChannelSet& channels,
                              const SystemGeometry& geom,
                              const AoSettings& settings, Rng& rng) {
  if (settings.threshold <= 0.0 || settings.maxIterations < 1 ||
      settings.restarts < 1)
    throw InvalidInput("alternating_optimize: bad settings");

  AoResult best;
  bool haveBest = false;
  for (int run = 0; run < settings.restarts; ++run) {
    ComplexVector init(cfg.groupCount());
    if (run == 0) {
      init.setOnes();
    } else {
      for (Eigen::Index g = 0; g < init.size(); ++g)
        init(g) = std::exp(kImag * rng.uniform(0.0, 2.0 * M_PI));
    }
    AoResult result =
        single_start_optimize(cfg, channels, geom, settings, rng, init);
    if (result.trace.status == AoStatus::Infeasible) {
      if (!haveBest) best = std::move(result);
      continue;
    }
    if (!haveBest || best.trace.status == AoStatus::Infeasible ||
        total_power(result.precoders) < total_power(best.precoders)) {
      best = std::move(result);
      haveBest = true;
    }
  }
  return best;
}

}  // namespace irsim

#pragma once

#include <vector>

#include "irsim/channel.hpp"
#include "irsim/reflect.hpp"
#include "irsim/txprecode.hpp"

namespace irsim {

enum class TransmitMethod { MMSE, ZF };

struct AoSettings {
  double threshold = 1e-4;  // relative objective-decrease stop
  int maxIterations = 30;
  TransmitMethod transmitMethod = TransmitMethod::MMSE;
  int randomizationCount = 1000;
  // Independent runs of the alternating loop; the first starts from the
  // all-ones reflect state, later ones from random phases. Best run wins.
  int restarts = 1;
};

enum class AoStatus { Converged, MaxIterations, Infeasible };

struct AoIterate {
  double totalPower = 0.0;
  double minSinrMargin = 0.0;
  ReflectState reflectState;
  RealVector beamPowers;
};

struct AoTrace {
  std::vector<AoIterate> perIteration;
  AoStatus status = AoStatus::Infeasible;
};

struct AoResult {
  PrecoderSet precoders;
  ReflectState reflectState;
  AoTrace trace;
};

double total_power(const PrecoderSet& p);

// Solves the transmit subproblem for a fixed reflect state.
PrecoderSet transmit_precode(const ExperimentConfig& cfg,
                             const ChannelSet& channels,
                             const ComplexVector& groupPhases,
                             const std::vector<int>& groupIndex,
                             TransmitMethod method);

// Alternating optimization of transmit and reflect precoding, starting from
// the all-ones reflect state. A new reflect state is accepted only when the
// subsequent transmit re-solve does not increase total power.
AoResult alternating_optimize(const ExperimentConfig& cfg,
                              const ChannelSet& channels,
                              const SystemGeometry& geom,
                              const AoSettings& settings, Rng& rng);

}  // namespace irsim

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsim/rng.hpp"
#include "irsim/types.hpp"

namespace irsim {

struct ExperimentConfig {
  int M = 8;              // BS antennas
  int N = 400;            // IRS elements (perfect square)
  int groupEdge = 5;      // elements per subsurface edge
  int L = 3;              // low-mobility users
  int K = 3;              // high-mobility users
  double beta = 1e-3;     // reference path gain at 1 m, linear
  double alphaBsIrs = 2.0;
  double alphaUser = 2.5;
  double userDistance = 50.0;     // m
  double ricianFactorDb = 5.0;    // dB
  double noisePower = 3.1622776601683794e-12;  // W (-85 dBm)
  double wavelength = 0.05;       // m
  double elementSpacing = 0.025;  // m
  RealVector sinrTargetsLow;      // linear, length L
  double sinrTargetHigh = 1.0;    // linear
  std::uint64_t seed = 1;
  Vector3 bsCenter{0.0, 0.5, 4.0};
  Vector3 irsCenter{0.0, 0.0, 4.0};

  int sqrtN() const;
  int groupsPerEdge() const;  // sqrtN / groupEdge
  int groupCount() const;     // N / groupEdge^2
  // Per-entry channel variances at the configured user distance.
  double directVariance(double distance) const;
  double irsVariance(double distance) const;  // carries the half-space factor 2
  void validate() const;  // throws InvalidInput on a broken config
};

// Flat key = value file, '#' comments. Distances in meters, powers in dBm,
// SINR targets linear, path gains in dB. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct SystemGeometry {
  std::vector<Vector3> bsAntennaPositions;
  std::vector<Vector3> irsElementPositions;
  std::vector<Vector3> userPositions;  // L low-mobility first, then K high
  std::vector<int> groupIndex;         // per IRS element
};

struct ChannelSet {
  ComplexMatrix bsIrs;                   // N x M (R)
  std::vector<ComplexVector> directLow;  // L vectors of length M
  std::vector<ComplexVector> irsLow;     // L vectors of length N
  std::vector<ComplexVector> directHigh; // K vectors of length M
  std::vector<ComplexVector> irsHigh;    // K vectors of length N
};

// BS: uniform linear array along y at half-wavelength pitch; IRS: square grid
// in the x-z plane; users: uniform azimuth within (-80, 80) degrees of the
// IRS boresight (+y) at the configured distance in the x-y plane.
SystemGeometry build_geometry(const ExperimentConfig& cfg, Rng& rng);

// Near-field LoS: entry (n, m) = sqrt(beta / d^alphaBsIrs) exp(-i 2 pi d / lambda)
// with d the element-antenna distance. Deterministic given the geometry.
ComplexMatrix gen_bs_irs_channel(const SystemGeometry& geom,
                                 const ExperimentConfig& cfg);

// Rayleigh fading for high-mobility users.
void gen_high_mobility_channels(const ExperimentConfig& cfg, Rng& rng,
                                std::vector<ComplexVector>& direct,
                                std::vector<ComplexVector>& irsSide);

// Rician fading (LoS from the drop geometry) for low-mobility users.
void gen_low_mobility_channels(const ExperimentConfig& cfg,
                               const SystemGeometry& geom, Rng& rng,
                               std::vector<ComplexVector>& direct,
                               std::vector<ComplexVector>& irsSide);

// One full drop: geometry + all channels, sharing a single stream.
ChannelSet realize_channels(const ExperimentConfig& cfg,
                            const SystemGeometry& geom, Rng& rng);

}  // namespace irsim

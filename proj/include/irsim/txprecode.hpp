#pragma once

#include <vector>

#include "irsim/types.hpp"

namespace irsim {

struct PrecoderSet {
  std::vector<ComplexVector> lowBeams;  // w_1..w_L, sqrt(power) * direction
  ComplexVector highBeam;               // w_{L+1}; empty when no high users
  RealVector powers;                    // per-beam powers, low beams first
};

struct DualVariables {
  RealVector lambdas;  // L entries, plus one for the high-mobility beam
};

struct CorrelationSet {
  std::vector<ComplexMatrix> lowCorrelations;  // Q_l = hbar_l hbar_l' / sigma2
  ComplexMatrix highCorrelation;               // Q_{L+1} = (I + 2 R'R) / sigmaBarSq
  double sigmaBarSq = 0.0;                     // max_k d_k^alpha sigma2 / beta
  double sigma2 = 0.0;
  bool hasHighUser = false;
};

// Superimposed BS -> low-mobility-user channel for a fixed reflect state:
// hbar' = h' + e^{i phi} g' diag(thetaBar) R. thetaBar is element-level (length N).
ComplexVector effective_low_channel(const ComplexVector& h,
                                    const ComplexVector& g,
                                    const ComplexVector& thetaBar,
                                    const ComplexMatrix& bsIrs, double phi);

// distances: per high-mobility-user path distances (empty when K = 0).
CorrelationSet build_correlations(
    const std::vector<ComplexVector>& effectiveChannels,
    const ComplexMatrix& bsIrs, double sigma2, const RealVector& distances,
    double alphaUser, double beta);

// Dual uplink powers from the fixed-point equations. targets holds the L
// low-mobility targets followed by the high-mobility target when present.
DualVariables mmse_fixed_point(const CorrelationSet& corr,
                               const RealVector& targets);

// Unit-norm precoding directions for the given dual variables.
std::vector<ComplexVector> mmse_directions(
    const CorrelationSet& corr, const DualVariables& duals,
    const std::vector<ComplexVector>& effectiveChannels);

// Solves the power linear system Qbar p = 1 and assembles the precoders.
PrecoderSet mmse_power_allocation(
    const std::vector<ComplexVector>& directions, const CorrelationSet& corr,
    const std::vector<ComplexVector>& effectiveChannels,
    const RealVector& targets);

// Full MMSE pipeline: fixed point, directions, powers.
PrecoderSet mmse_precode(const CorrelationSet& corr,
                         const std::vector<ComplexVector>& effectiveChannels,
                         const RealVector& targets);

// ZF low-mobility beams: W = Hbar (Hbar' Hbar)^-1 diag(sqrt(gamma_l sigma2)).
std::vector<ComplexVector> zf_precode(
    const std::vector<ComplexVector>& effectiveChannels,
    const RealVector& targetsLow, double sigma2);

// High-mobility beam in the null space of the stacked low-user channels:
// scaled principal eigenvector of F'(I + 2 R'R)F with power meeting the
// average-SINR constraint with equality.
std::pair<ComplexVector, double> null_space_high_beam(
    const ComplexMatrix& nullBasis, const ComplexMatrix& bsIrs,
    const std::vector<ComplexVector>& zfBeams, double gammaHigh,
    double sigmaBarSq);

// ZF + null-space pipeline producing a full PrecoderSet.
PrecoderSet zf_with_null_space(
    const std::vector<ComplexVector>& effectiveChannels,
    const ComplexMatrix& bsIrs, const RealVector& targets, double sigma2,
    double sigmaBarSq, bool hasHighUser);

// Achieved per-user SINRs for verification: low-mobility instantaneous plus
// the Rayleigh-averaged high-mobility value (last entry when present).
RealVector achieved_sinrs(const PrecoderSet& set, const CorrelationSet& corr,
                          const std::vector<ComplexVector>& effectiveChannels);

}  // namespace irsim

#pragma once

#include <vector>

#include "irsim/rng.hpp"
#include "irsim/sdp.hpp"
#include "irsim/txprecode.hpp"
#include "irsim/types.hpp"

namespace irsim {

struct ReflectState {
  ComplexVector groupPhases;  // unit modulus, length N / groupEdge^2
  double commonPhase = 0.0;
  bool feasible = true;  // min SINR margin >= 1 at the recovering step

  // Expands group phases to the element-level reflection vector.
  ComplexVector elementPhases(const std::vector<int>& groupIndex) const;
};

// Coefficients of the quadratic SINR forms after lifting:
// |b_{l,j}' thetaBar + conj(a_{l,j})|^2 at group granularity.
struct SdrInstance {
  Eigen::Index groups = 0;
  std::vector<std::vector<Complex>> aCoeffs;        // [l][j], j over L (+1)
  std::vector<std::vector<ComplexVector>> bVectors; // [l][j], length groups
  RealVector targets;                               // gamma_l
  double sigma2 = 0.0;

  ComplexMatrix liftedMatrix(Eigen::Index l, Eigen::Index j) const;  // B_{l,j}
  // Achieved low-mobility SINRs for a group phase vector.
  RealVector sinrs(const ComplexVector& groupPhases) const;
  double minMargin(const ComplexVector& groupPhases) const;
};

// Sums element-level coefficients within each group so the reduced model is
// exactly the full model under shared phases. coeffs has length N.
ComplexVector group_lift(const ComplexVector& coeffs,
                         const std::vector<int>& groupIndex, int groupCount);

SdrInstance build_sdr(const PrecoderSet& precoders,
                      const std::vector<ComplexVector>& directLow,
                      const std::vector<ComplexVector>& irsLow,
                      const ComplexMatrix& bsIrs,
                      const std::vector<int>& groupIndex, int groupCount,
                      double phi, const RealVector& targetsLow, double sigma2);

// Builds and solves the slack-maximization SDP for the instance.
SdpSolution solve_reflect(const SdrInstance& instance);

// Recovers a unit-modulus group phase vector from the relaxed solution,
// scoring candidates by the minimum SINR margin min_l SINR_l / gamma_l.
ReflectState gaussian_randomize(const SdpSolution& sol,
                                const SdrInstance& instance, int count,
                                Rng& rng);

}  // namespace irsim

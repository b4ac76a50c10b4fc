#pragma once

#include <vector>

#include "irsim/types.hpp"

namespace irsim {

enum class SdpStatus { Optimal, Infeasible, MaxIterations };

enum class ConstraintSense { Ge, Le, Eq };

// One affine constraint: tr(matrix * Theta) + slackCoeffs' c + offset <sense> 0,
// with Theta the Hermitian matrix variable and c >= 0 the slack vector.
struct SdpConstraint {
  ComplexMatrix matrix;    // Hermitian, dimension x dimension
  RealVector slackCoeffs;  // length = slack count (may be empty)
  double offset = 0.0;
  ConstraintSense sense = ConstraintSense::Ge;
};

// maximize objectiveWeights' c
// s.t.     every SdpConstraint, Theta >= 0 (PSD), c >= 0,
//          [Theta]_nn = 1 for all n when unitDiagonal is set.
struct SdpProblem {
  Eigen::Index dimension = 0;
  RealVector objectiveWeights;  // over the slack variables
  std::vector<SdpConstraint> constraints;
  bool unitDiagonal = true;
};

struct SdpSolution {
  ComplexMatrix matrix;  // Hermitian PSD to tolerance on Optimal
  RealVector slacks;
  double primalObjective = 0.0;  // objectiveWeights' slacks
  double dualObjective = 0.0;    // upper bound; primal <= dual on Optimal
  double dualityGap = 0.0;
  SdpStatus status = SdpStatus::MaxIterations;
  int iterations = 0;
};

// Dense primal-dual interior-point solve. Deterministic for a fixed problem.
// The complex Hermitian variable is embedded into a real symmetric matrix of
// twice the dimension; slacks and inequality residuals form an LP block.
SdpSolution solve_sdp(const SdpProblem& p);

}  // namespace irsim

#include "irsim/reflect.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "irsim/numerics.hpp"

namespace irsim {

ComplexVector ReflectState::elementPhases(
    const std::vector<int>& groupIndex) const {
  ComplexVector out(static_cast<Eigen::Index>(groupIndex.size()));
  for (Eigen::Index n = 0; n < out.size(); ++n)
    out(n) = groupPhases(groupIndex[static_cast<size_t>(n)]);
  return out;
}

ComplexVector group_lift(const ComplexVector& coeffs,
                         const std::vector<int>& groupIndex, int groupCount) {
  if (coeffs.size() != static_cast<Eigen::Index>(groupIndex.size()))
    throw InvalidInput("group_lift: grouping inconsistent with coefficients");
  ComplexVector out = ComplexVector::Zero(groupCount);
  for (Eigen::Index n = 0; n < coeffs.size(); ++n)
    out(groupIndex[static_cast<size_t>(n)]) += coeffs(n);
  return out;
}

ComplexMatrix SdrInstance::liftedMatrix(Eigen::Index l, Eigen::Index j) const {
  const ComplexVector& b = bVectors[static_cast<size_t>(l)][static_cast<size_t>(j)];
  const Complex a = aCoeffs[static_cast<size_t>(l)][static_cast<size_t>(j)];
  ComplexMatrix m(groups + 1, groups + 1);
  m.topLeftCorner(groups, groups) = b * b.adjoint();
  m.topRightCorner(groups, 1) = std::conj(a) * b;
  m.bottomLeftCorner(1, groups) = a * b.adjoint();
  m(groups, groups) = 0.0;
  return m;
}

RealVector SdrInstance::sinrs(const ComplexVector& groupPhases) const {
  const auto nl = static_cast<Eigen::Index>(aCoeffs.size());
  RealVector out(nl);
  for (Eigen::Index l = 0; l < nl; ++l) {
    const auto& bl = bVectors[static_cast<size_t>(l)];
    const auto& al = aCoeffs[static_cast<size_t>(l)];
    double signal = 0.0, interference = sigma2;
    for (size_t j = 0; j < al.size(); ++j) {
      const double term =
          std::norm(bl[j].dot(groupPhases) + std::conj(al[j]));
      if (static_cast<Eigen::Index>(j) == l) signal = term;
      else interference += term;
    }
    out(l) = signal / interference;
  }
  return out;
}

double SdrInstance::minMargin(const ComplexVector& groupPhases) const {
  const RealVector s = sinrs(groupPhases);
  return (s.array() / targets.array()).minCoeff();
}

SdrInstance build_sdr(const PrecoderSet& precoders,
                      const std::vector<ComplexVector>& directLow,
                      const std::vector<ComplexVector>& irsLow,
                      const ComplexMatrix& bsIrs,
                      const std::vector<int>& groupIndex, int groupCount,
                      double phi, const RealVector& targetsLow, double sigma2) {
  const auto nl = static_cast<Eigen::Index>(directLow.size());
  if (nl < 1) throw InvalidInput("build_sdr: needs at least one low user");

  std::vector<ComplexVector> beams = precoders.lowBeams;
  if (precoders.highBeam.size() > 0) beams.push_back(precoders.highBeam);

  SdrInstance inst;
  inst.groups = groupCount;
  inst.targets = targetsLow;
  inst.sigma2 = sigma2;
  inst.aCoeffs.resize(static_cast<size_t>(nl));
  inst.bVectors.resize(static_cast<size_t>(nl));
  const Complex rot = std::exp(kImag * phi);
  for (Eigen::Index l = 0; l < nl; ++l) {
    for (const auto& w : beams) {
      // conj(a_{l,j}) = h_l' w_j; b_{l,j}' = e^{i phi} g_l' diag(R w_j)
      inst.aCoeffs[static_cast<size_t>(l)].push_back(
          std::conj(directLow[static_cast<size_t>(l)].dot(w)));
      const ComplexVector rw = bsIrs * w;
      const ComplexVector rowCoeffs =
          rot * (irsLow[static_cast<size_t>(l)].conjugate().array() * rw.array())
                    .matrix();
      // Store b itself (conjugate of the row coefficients).
      inst.bVectors[static_cast<size_t>(l)].push_back(
          group_lift(rowCoeffs, groupIndex, groupCount).conjugate());
    }
  }
  return inst;
}

SdpSolution solve_reflect(const SdrInstance& inst) {
  const auto nl = static_cast<Eigen::Index>(inst.aCoeffs.size());
  SdpProblem prob;
  prob.dimension = inst.groups + 1;
  prob.unitDiagonal = true;
  prob.objectiveWeights = RealVector::Ones(nl);
  for (Eigen::Index l = 0; l < nl; ++l) {
    const double gamma = inst.targets(l);
    ComplexMatrix a = inst.liftedMatrix(l, l);
    double offset = std::norm(inst.aCoeffs[static_cast<size_t>(l)][static_cast<size_t>(l)]);
    const auto nj = static_cast<Eigen::Index>(inst.aCoeffs[static_cast<size_t>(l)].size());
    for (Eigen::Index j = 0; j < nj; ++j) {
      if (j == l) continue;
      a -= gamma * inst.liftedMatrix(l, j);
      offset -= gamma *
                std::norm(inst.aCoeffs[static_cast<size_t>(l)][static_cast<size_t>(j)]);
    }
    offset -= gamma * inst.sigma2;
    SdpConstraint con;
    con.matrix = std::move(a);
    con.slackCoeffs = RealVector::Zero(nl);
    con.slackCoeffs(l) = -1.0;
    con.offset = offset;
    con.sense = ConstraintSense::Ge;
    prob.constraints.push_back(std::move(con));
  }
  return solve_sdp(prob);
}

namespace {

ComplexVector project_unit_modulus(const ComplexVector& v) {
  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    out(i) = mag > 0.0 ? v(i) / mag : Complex(1.0, 0.0);
  }
  return out;
}

// De-rotate by the auxiliary entry and drop it.
ComplexVector derotate(const ComplexVector& lifted) {
  const Eigen::Index ng = lifted.size() - 1;
  const Complex t = lifted(ng);
  return project_unit_modulus(lifted.head(ng) * std::conj(t));
}

}  // namespace

ReflectState gaussian_randomize(const SdpSolution& sol,
                                const SdrInstance& inst, int count, Rng& rng) {
  const Eigen::Index dim = inst.groups + 1;
  if (sol.matrix.rows() != dim)
    throw InvalidInput("gaussian_randomize: dimension mismatch");

  const EigResult eig = hermitian_eig(sol.matrix);
  ReflectState best;
  best.commonPhase = 0.0;

  if (eig.eigenvalues.size() == 1 ||
      std::abs(eig.eigenvalues(1)) <= 1e-8 * std::abs(eig.eigenvalues(0))) {
    // Rank-one relaxation: the factor itself is the exact solution.
    best.groupPhases = derotate(eig.eigenvectors.col(0));
    best.feasible = inst.minMargin(best.groupPhases) >= 1.0 - 1e-9;
    return best;
  }

  // Square-root factor for sampling with covariance sol.matrix.
  ComplexMatrix half = eig.eigenvectors;
  for (Eigen::Index i = 0; i < dim; ++i)
    half.col(i) *= std::sqrt(std::max(0.0, eig.eigenvalues(i)));

  double bestMargin = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < count; ++c) {
    const ComplexVector cand = derotate(half * rng.cnormal_vector(dim));
    const double margin = inst.minMargin(cand);
    if (margin > bestMargin) {
      bestMargin = margin;
      best.groupPhases = cand;
    }
  }
  if (count <= 0) {
    // Fallback: principal eigenvector of the relaxed solution.
    best.groupPhases = derotate(eig.eigenvectors.col(0));
    bestMargin = inst.minMargin(best.groupPhases);
  }
  best.feasible = bestMargin >= 1.0 - 1e-9;
  return best;
}

}  // namespace irsim

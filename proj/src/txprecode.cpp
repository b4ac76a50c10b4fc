#include "irsim/txprecode.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "irsim/numerics.hpp"

namespace irsim {

namespace {

// M(lambda) = I + sum_l (lambda_l / sigma2) hbar_l hbar_l' + lambda_{L+1} Q_{L+1}
ComplexMatrix dual_matrix(const CorrelationSet& corr,
                          const std::vector<ComplexVector>& channels,
                          const RealVector& lambdas) {
  const Eigen::Index m = channels.empty() ? corr.highCorrelation.rows()
                                          : channels[0].size();
  ComplexMatrix out = ComplexMatrix::Identity(m, m);
  for (size_t l = 0; l < channels.size(); ++l)
    out += (lambdas(static_cast<Eigen::Index>(l)) / corr.sigma2) *
           (channels[l] * channels[l].adjoint());
  if (corr.hasHighUser)
    out += lambdas(lambdas.size() - 1) * corr.highCorrelation;
  return out;
}

Eigen::Index beam_count(const CorrelationSet& corr) {
  return static_cast<Eigen::Index>(corr.lowCorrelations.size()) +
         (corr.hasHighUser ? 1 : 0);
}

}  // namespace

ComplexVector effective_low_channel(const ComplexVector& h,
                                    const ComplexVector& g,
                                    const ComplexVector& thetaBar,
                                    const ComplexMatrix& bsIrs, double phi) {
  // hbar' = h' + e^{i phi} g' diag(thetaBar) R  =>  column form below.
  const ComplexVector weighted =
      (g.conjugate().array() * thetaBar.array()).matrix();
  const ComplexVector reflectedRow = bsIrs.transpose() * weighted;  // (g'DR)^T
  return h + std::exp(-kImag * phi) * reflectedRow.conjugate();
}

CorrelationSet build_correlations(
    const std::vector<ComplexVector>& effectiveChannels,
    const ComplexMatrix& bsIrs, double sigma2, const RealVector& distances,
    double alphaUser, double beta) {
  CorrelationSet corr;
  corr.sigma2 = sigma2;
  corr.hasHighUser = distances.size() > 0;
  for (const auto& h : effectiveChannels)
    corr.lowCorrelations.push_back((h * h.adjoint()) / sigma2);
  if (corr.hasHighUser) {
    corr.sigmaBarSq =
        (distances.array().pow(alphaUser) * (sigma2 / beta)).maxCoeff();
    const Eigen::Index m = bsIrs.cols();
    corr.highCorrelation =
        (ComplexMatrix::Identity(m, m) + 2.0 * bsIrs.adjoint() * bsIrs) /
        corr.sigmaBarSq;
  }
  return corr;
}

DualVariables mmse_fixed_point(const CorrelationSet& corr,
                               const RealVector& targets) {
  const Eigen::Index nl = static_cast<Eigen::Index>(corr.lowCorrelations.size());
  const Eigen::Index n = beam_count(corr);
  if (targets.size() != n)
    throw InvalidInput("mmse_fixed_point: target count mismatch");
  if ((targets.array() <= 0.0).any())
    throw InvalidInput("mmse_fixed_point: targets must be positive");

  // Recover hbar_l (up to phase) from Q_l for the quadratic forms; callers
  // normally hold them, but the fixed point only needs the rank-one factor.
  std::vector<ComplexVector> channels;
  for (const auto& q : corr.lowCorrelations) {
    const EigResult eig = hermitian_eig(q);
    channels.push_back(std::sqrt(std::max(0.0, eig.eigenvalues(0) * corr.sigma2)) *
                       eig.eigenvectors.col(0));
  }

  RealVector lambdas = RealVector::Ones(n);
  const int max_sweeps = 10000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_rel_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const ComplexMatrix m = dual_matrix(corr, channels, lambdas);
      Eigen::LLT<ComplexMatrix> llt(m);
      double next;
      if (j < nl) {
        const ComplexVector& h = channels[static_cast<size_t>(j)];
        const double quad =
            std::real(h.dot(llt.solve(h))) / corr.sigma2;  // h' M^-1 h / sigma2
        next = 1.0 / ((1.0 + 1.0 / targets(j)) * quad);
      } else {
        const double lmax =
            principal_generalized_eig(corr.highCorrelation, m).first;
        next = 1.0 / ((1.0 + 1.0 / targets(j)) * lmax);
      }
      max_rel_change = std::max(max_rel_change,
                                std::abs(next - lambdas(j)) /
                                    std::max(1e-300, std::abs(next)));
      lambdas(j) = next;
    }
    if (max_rel_change <= 1e-10) break;
    if (sweep == max_sweeps - 1)
      throw DualNotConverged("mmse_fixed_point: sweep cap reached");
  }

  // Residual check against both displayed fixed-point rows.
  const ComplexMatrix m = dual_matrix(corr, channels, lambdas);
  Eigen::LLT<ComplexMatrix> llt(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    double rhs;
    if (j < nl) {
      const ComplexVector& h = channels[static_cast<size_t>(j)];
      rhs = 1.0 / ((1.0 + 1.0 / targets(j)) *
                   (std::real(h.dot(llt.solve(h))) / corr.sigma2));
    } else {
      rhs = 1.0 / ((1.0 + 1.0 / targets(j)) *
                   principal_generalized_eig(corr.highCorrelation, m).first);
    }
    if (std::abs(lambdas(j) - rhs) > 1e-8 * std::max(1e-300, std::abs(rhs)))
      throw DualNotConverged("mmse_fixed_point: residual above tolerance");
  }

  DualVariables duals;
  duals.lambdas = lambdas;
  return duals;
}

std::vector<ComplexVector> mmse_directions(
    const CorrelationSet& corr, const DualVariables& duals,
    const std::vector<ComplexVector>& effectiveChannels) {
  if (!duals.lambdas.allFinite())
    throw InvalidInput("mmse_directions: non-finite duals");
  const ComplexMatrix m = dual_matrix(corr, effectiveChannels, duals.lambdas);
  Eigen::LLT<ComplexMatrix> llt(m);
  std::vector<ComplexVector> dirs;
  for (const auto& h : effectiveChannels) {
    ComplexVector w = llt.solve(h);
    w.normalize();
    dirs.push_back(phase_normalize(w));
  }
  if (corr.hasHighUser)
    dirs.push_back(principal_generalized_eig(corr.highCorrelation, m).second);
  return dirs;
}

PrecoderSet mmse_power_allocation(
    const std::vector<ComplexVector>& directions, const CorrelationSet& corr,
    const std::vector<ComplexVector>& effectiveChannels,
    const RealVector& targets) {
  const Eigen::Index nl = static_cast<Eigen::Index>(effectiveChannels.size());
  const Eigen::Index n = beam_count(corr);

  ComplexMatrix qbar = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const ComplexVector& h = effectiveChannels[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gain = std::norm(h.dot(directions[static_cast<size_t>(j)]));
      qbar(i, j) = (i == j) ? gain / (corr.sigma2 * targets(i))
                            : -gain / corr.sigma2;
    }
  }
  if (corr.hasHighUser) {
    const Eigen::Index hi = n - 1;
    for (Eigen::Index j = 0; j < n; ++j) {
      const ComplexVector& w = directions[static_cast<size_t>(j)];
      const double quad = std::real(w.dot(corr.highCorrelation * w));
      qbar(hi, j) = (j == hi) ? quad / targets(hi) : -quad;
    }
  }

  RealVector powers;
  try {
    powers = solve_linear(qbar, ComplexVector::Ones(n)).real();
  } catch (const IllConditioned&) {
    throw InfeasibleTargets("mmse_power_allocation: singular power system");
  }
  if ((powers.array() <= 0.0).any())
    throw InfeasibleTargets("mmse_power_allocation: nonpositive power");

  PrecoderSet set;
  for (Eigen::Index l = 0; l < nl; ++l)
    set.lowBeams.push_back(std::sqrt(powers(l)) *
                           directions[static_cast<size_t>(l)]);
  if (corr.hasHighUser)
    set.highBeam = std::sqrt(powers(n - 1)) * directions[static_cast<size_t>(n - 1)];
  set.powers = powers;
  return set;
}

PrecoderSet mmse_precode(const CorrelationSet& corr,
                         const std::vector<ComplexVector>& effectiveChannels,
                         const RealVector& targets) {
  const DualVariables duals = mmse_fixed_point(corr, targets);
  const auto dirs = mmse_directions(corr, duals, effectiveChannels);
  return mmse_power_allocation(dirs, corr, effectiveChannels, targets);
}

std::vector<ComplexVector> zf_precode(
    const std::vector<ComplexVector>& effectiveChannels,
    const RealVector& targetsLow, double sigma2) {
  const auto nl = static_cast<Eigen::Index>(effectiveChannels.size());
  if (nl < 1) throw InvalidInput("zf_precode: needs at least one user");
  const Eigen::Index m = effectiveChannels[0].size();
  ComplexMatrix hbar(m, nl);
  for (Eigen::Index l = 0; l < nl; ++l)
    hbar.col(l) = effectiveChannels[static_cast<size_t>(l)];

  const ComplexMatrix gram = hbar.adjoint() * hbar;
  Eigen::JacobiSVD<ComplexMatrix> svd(gram);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw RankDeficient("zf_precode: stacked channels are rank deficient");

  const ComplexMatrix pseudo = gram.llt().solve(hbar.adjoint()).adjoint();
  std::vector<ComplexVector> beams;
  for (Eigen::Index l = 0; l < nl; ++l)
    beams.push_back(std::sqrt(targetsLow(l) * sigma2) * pseudo.col(l));
  return beams;
}

std::pair<ComplexVector, double> null_space_high_beam(
    const ComplexMatrix& nullBasis, const ComplexMatrix& bsIrs,
    const std::vector<ComplexVector>& zfBeams, double gammaHigh,
    double sigmaBarSq) {
  if (nullBasis.cols() == 0)
    throw EmptyNullSpace("null_space_high_beam: empty basis");
  const Eigen::Index m = nullBasis.rows();
  const ComplexMatrix a =
      ComplexMatrix::Identity(m, m) + 2.0 * bsIrs.adjoint() * bsIrs;
  const ComplexMatrix restricted = nullBasis.adjoint() * a * nullBasis;
  const EigResult eig = hermitian_eig(restricted);
  const ComplexVector vbar = eig.eigenvectors.col(0);

  double interference = sigmaBarSq;
  for (const auto& w : zfBeams) interference += std::real(w.dot(a * w));
  const double gain = std::real(vbar.dot(restricted * vbar));
  const double power = gammaHigh * interference / gain;
  return {std::sqrt(power) * (nullBasis * vbar), power};
}

PrecoderSet zf_with_null_space(
    const std::vector<ComplexVector>& effectiveChannels,
    const ComplexMatrix& bsIrs, const RealVector& targets, double sigma2,
    double sigmaBarSq, bool hasHighUser) {
  const auto nl = static_cast<Eigen::Index>(effectiveChannels.size());
  PrecoderSet set;
  set.lowBeams = zf_precode(effectiveChannels, targets.head(nl), sigma2);
  set.powers.resize(nl + (hasHighUser ? 1 : 0));
  for (Eigen::Index l = 0; l < nl; ++l)
    set.powers(l) = set.lowBeams[static_cast<size_t>(l)].squaredNorm();
  if (hasHighUser) {
    ComplexMatrix stacked(nl, effectiveChannels[0].size());
    for (Eigen::Index l = 0; l < nl; ++l)
      stacked.row(l) = effectiveChannels[static_cast<size_t>(l)].adjoint();
    const ComplexMatrix basis = null_space_basis(stacked);
    auto [beam, power] = null_space_high_beam(basis, bsIrs, set.lowBeams,
                                              targets(targets.size() - 1),
                                              sigmaBarSq);
    set.highBeam = beam;
    set.powers(nl) = power;
  }
  return set;
}

RealVector achieved_sinrs(const PrecoderSet& set, const CorrelationSet& corr,
                          const std::vector<ComplexVector>& effectiveChannels) {
  const auto nl = static_cast<Eigen::Index>(effectiveChannels.size());
  const Eigen::Index n = nl + (corr.hasHighUser ? 1 : 0);
  RealVector out(n);

  std::vector<ComplexVector> all = set.lowBeams;
  if (corr.hasHighUser) all.push_back(set.highBeam);

  for (Eigen::Index l = 0; l < nl; ++l) {
    const ComplexVector& h = effectiveChannels[static_cast<size_t>(l)];
    double signal = 0.0, interference = corr.sigma2;
    for (size_t j = 0; j < all.size(); ++j) {
      const double gain = std::norm(h.dot(all[j]));
      if (static_cast<Eigen::Index>(j) == l) signal = gain;
      else interference += gain;
    }
    out(l) = signal / interference;
  }
  if (corr.hasHighUser) {
    double den = 1.0;  // sigmaBarSq folded into Q_{L+1}
    for (const auto& w : set.lowBeams)
      den += std::real(w.dot(corr.highCorrelation * w));
    out(n - 1) = std::real(set.highBeam.dot(corr.highCorrelation * set.highBeam)) / den;
  }
  return out;
}

}  // namespace irsim

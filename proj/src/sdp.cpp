#include "irsim/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace irsim {

namespace {

// [[Re A, -Im A], [Im A, Re A]] is symmetric for Hermitian A and PSD iff A is.
RealMatrix embed(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  RealMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = a.real();
  r.bottomRightCorner(n, n) = a.real();
  r.topRightCorner(n, n) = -a.imag();
  r.bottomLeftCorner(n, n) = a.imag();
  return r;
}

ComplexMatrix unembed(const RealMatrix& x, Eigen::Index n) {
  // Averages over the embedding symmetry so the result is exactly Hermitian.
  RealMatrix re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  RealMatrix im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  ComplexMatrix out = re.cast<Complex>() + kImag * im.cast<Complex>();
  return hermitize(out);
}

double inner(const RealMatrix& a, const RealMatrix& b) {
  return (a.array() * b.array()).sum();
}

// Largest alpha in (0, 1] with x + alpha * dx staying PSD, given x = L L'.
double max_step_sdp(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& dx) {
  const RealMatrix t = llt.matrixL().solve(dx);
  const RealMatrix s = llt.matrixL().solve(t.transpose());
  const double lmin =
      Eigen::SelfAdjointEigenSolver<RealMatrix>(0.5 * (s + s.transpose()),
                                                Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

double max_step_lp(const RealVector& x, const RealVector& dx) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

struct Lowered {
  // min <0, X> + g'u  s.t.  <A_i, X> + a_i'u = b_i,  X >= 0,  u >= 0
  Eigen::Index ns = 0;  // real symmetric block size (2 * complex dim)
  Eigen::Index nl = 0;  // LP block size
  Eigen::Index nc = 0;  // user slack count (prefix of the LP block)
  std::vector<RealMatrix> A;
  std::vector<RealVector> a;
  RealVector b;
  RealVector g;
  RealVector colScale;   // u_original = u / colScale (over user slacks)
  double objScale = 1.0; // original objective = -(g'u) * objScale
};

Lowered lower(const SdpProblem& p) {
  const Eigen::Index n = p.dimension;
  const Eigen::Index nc = p.objectiveWeights.size();
  Eigen::Index ni = 0;
  for (const auto& c : p.constraints)
    if (c.sense != ConstraintSense::Eq) ++ni;

  Lowered lo;
  lo.ns = 2 * n;
  lo.nc = nc;
  lo.nl = nc + ni;

  const Eigen::Index m =
      static_cast<Eigen::Index>(p.constraints.size()) + (p.unitDiagonal ? n : 0);
  lo.A.reserve(m);
  lo.a.reserve(m);
  lo.b.resize(m);

  Eigen::Index slack = nc;
  Eigen::Index row = 0;
  for (const auto& c : p.constraints) {
    RealMatrix ar = 0.5 * embed(hermitize(c.matrix));
    RealVector al = RealVector::Zero(lo.nl);
    if (c.slackCoeffs.size() > 0) al.head(nc) = c.slackCoeffs;
    if (c.sense == ConstraintSense::Ge) al(slack++) = -1.0;
    if (c.sense == ConstraintSense::Le) al(slack++) = 1.0;
    lo.A.push_back(std::move(ar));
    lo.a.push_back(std::move(al));
    lo.b(row++) = -c.offset;
  }
  if (p.unitDiagonal) {
    for (Eigen::Index k = 0; k < n; ++k) {
      RealMatrix ar = RealMatrix::Zero(lo.ns, lo.ns);
      ar(k, k) = 0.5;
      ar(n + k, n + k) = 0.5;
      lo.A.push_back(std::move(ar));
      lo.a.push_back(RealVector::Zero(lo.nl));
      lo.b(row++) = 1.0;
    }
  }

  // Row equilibration.
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = std::max({lo.A[i].cwiseAbs().maxCoeff(),
                         lo.nl > 0 ? lo.a[i].cwiseAbs().maxCoeff() : 0.0,
                         std::abs(lo.b(i))});
    if (s <= 0.0) s = 1.0;
    lo.A[i] /= s;
    lo.a[i] /= s;
    lo.b(i) /= s;
  }

  // Column equilibration of the LP block.
  lo.colScale = RealVector::Ones(lo.nl);
  for (Eigen::Index j = 0; j < lo.nl; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) s = std::max(s, std::abs(lo.a[i](j)));
    if (s <= 0.0) s = 1.0;
    lo.colScale(j) = s;
    for (Eigen::Index i = 0; i < m; ++i) lo.a[i](j) /= s;
  }

  lo.g = RealVector::Zero(lo.nl);
  for (Eigen::Index j = 0; j < nc; ++j)
    lo.g(j) = -p.objectiveWeights(j) / lo.colScale(j);
  lo.objScale = std::max(lo.nl > 0 ? lo.g.cwiseAbs().maxCoeff() : 0.0, 1e-300);
  lo.g /= lo.objScale;
  return lo;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p) {
  const Eigen::Index n = p.dimension;
  if (n <= 0 || n > 200) throw InvalidInput("solve_sdp: dimension out of range");
  for (const auto& c : p.constraints) {
    if (c.matrix.rows() != n || c.matrix.cols() != n)
      throw InvalidInput("solve_sdp: constraint matrix dimension mismatch");
    if (!all_finite(c.matrix) || !std::isfinite(c.offset))
      throw InvalidInput("solve_sdp: non-finite constraint data");
    if (c.slackCoeffs.size() != 0 &&
        c.slackCoeffs.size() != p.objectiveWeights.size())
      throw InvalidInput("solve_sdp: slack coefficient length mismatch");
  }

  const Lowered lo = lower(p);
  const Eigen::Index m = lo.b.size();
  const Eigen::Index ns = lo.ns;
  const Eigen::Index nl = lo.nl;

  const double xi_p = std::max(10.0, lo.b.size() > 0 ? lo.b.cwiseAbs().maxCoeff() : 1.0);
  const double xi_d = std::max(10.0, nl > 0 ? lo.g.cwiseAbs().maxCoeff() : 1.0);

  RealMatrix X = xi_p * RealMatrix::Identity(ns, ns);
  RealMatrix Z = xi_d * RealMatrix::Identity(ns, ns);
  RealVector u = RealVector::Constant(nl, xi_p);
  RealVector zl = RealVector::Constant(nl, xi_d);
  RealVector y = RealVector::Zero(m);

  const double tol = 1e-9;
  const int max_iter = 200;
  double bestGap = std::numeric_limits<double>::infinity();
  int sinceImprove = 0;  // iterations without meaningful gap reduction

  auto finalize = [&](SdpStatus status, int iters) {
    SdpSolution sol;
    sol.matrix = unembed(X, n);
    sol.slacks = RealVector::Zero(lo.nc);
    for (Eigen::Index j = 0; j < lo.nc; ++j) sol.slacks(j) = u(j) / lo.colScale(j);
    sol.primalObjective =
        lo.nc > 0 ? p.objectiveWeights.dot(sol.slacks) : 0.0;
    sol.dualObjective = -lo.b.dot(y) * lo.objScale;
    sol.dualityGap = std::max(0.0, sol.dualObjective - sol.primalObjective);
    sol.status = status;
    sol.iterations = iters;
    return sol;
  };

  for (int it = 0; it < max_iter; ++it) {
    // Residuals.
    RealVector rp = lo.b;
    for (Eigen::Index i = 0; i < m; ++i)
      rp(i) -= inner(lo.A[i], X) + lo.a[i].dot(u);
    RealMatrix Rd = -Z;  // C = 0 in the matrix block
    for (Eigen::Index i = 0; i < m; ++i) Rd -= y(i) * lo.A[i];
    RealVector rdl = lo.g - zl;
    for (Eigen::Index i = 0; i < m; ++i) rdl -= y(i) * lo.a[i];

    const double gap = inner(X, Z) + u.dot(zl);
    const double mu = gap / static_cast<double>(ns + nl);
    const double pobj = lo.g.dot(u);
    const double dobj = lo.b.dot(y);
    const double rp_rel = (m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0) /
                          (1.0 + lo.b.cwiseAbs().maxCoeff());
    const double rd_rel =
        std::max(Rd.cwiseAbs().maxCoeff(),
                 nl > 0 ? rdl.cwiseAbs().maxCoeff() : 0.0) /
        (1.0 + (nl > 0 ? lo.g.cwiseAbs().maxCoeff() : 0.0));
    const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (rp_rel <= tol && rd_rel <= tol && relgap <= tol)
      return finalize(SdpStatus::Optimal, it);

    // Accept a numerically stagnant but essentially converged iterate rather
    // than burning the full iteration budget at the floating-point floor.
    if (relgap < 0.9 * bestGap) {
      bestGap = relgap;
      sinceImprove = 0;
    } else if (++sinceImprove >= 25) {
      return finalize(rp_rel <= 1e-7 && rd_rel <= 1e-7 && relgap <= 1e-6
                          ? SdpStatus::Optimal
                          : SdpStatus::MaxIterations,
                      it);
    }

    // Dual objective running away with near-feasible duals certifies primal
    // infeasibility (unbounded dual ray).
    if (rd_rel <= 1e-7 && dobj > 1e8 * (1.0 + std::abs(pobj)))
      return finalize(SdpStatus::Infeasible, it);
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > 1e10)
      return finalize(SdpStatus::Infeasible, it);

    // Near the optimum an iterate can brush the cone boundary within
    // roundoff; nudge it back inside before factorizing.
    auto robust_llt = [&](RealMatrix& s) {
      Eigen::LLT<RealMatrix> llt(s);
      for (double shift = 1e-14; llt.info() != Eigen::Success && shift <= 1e-8;
           shift *= 100.0) {
        s.diagonal().array() += shift * (1.0 + s.trace() / s.rows());
        llt.compute(s);
      }
      return llt;
    };
    Eigen::LLT<RealMatrix> lltX = robust_llt(X);
    Eigen::LLT<RealMatrix> lltZ = robust_llt(Z);
    if (lltX.info() != Eigen::Success || lltZ.info() != Eigen::Success)
      return finalize(rp_rel <= 1e-7 && rd_rel <= 1e-7 && relgap <= 1e-7
                          ? SdpStatus::Optimal
                          : SdpStatus::MaxIterations,
                      it);

    RealMatrix Zinv = lltZ.solve(RealMatrix::Identity(ns, ns));

    // Schur complement M_ij = <A_i, Zinv A_j X> + sum_k a_ik (u_k/z_k) a_jk.
    RealVector uz = nl > 0 ? (u.array() / zl.array()).matrix() : RealVector();
    std::vector<RealMatrix> G(m);
    for (Eigen::Index j = 0; j < m; ++j) G[j] = Zinv * lo.A[j] * X;
    RealMatrix M(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        double v = inner(lo.A[i], G[j]);
        if (nl > 0) v += (lo.a[i].array() * uz.array() * lo.a[j].array()).sum();
        M(i, j) = v;
      }
    M.diagonal().array() += 1e-13 * (1.0 + M.cwiseAbs().maxCoeff());
    Eigen::PartialPivLU<RealMatrix> lu(M);

    const RealMatrix ZinvRdX = Zinv * Rd * X;
    auto solve_direction = [&](double nu, const RealMatrix& corrS,
                               const RealVector& corrL, RealMatrix& dX,
                               RealMatrix& dZ, RealVector& du, RealVector& dz) {
      // corrS / corrL carry the Mehrotra second-order terms (zero on the
      // predictor pass).
      RealVector rhs = rp;
      for (Eigen::Index i = 0; i < m; ++i) {
        double v = inner(lo.A[i], nu * Zinv - X - ZinvRdX - corrS);
        if (nl > 0) {
          RealVector lp_term = (nu * zl.cwiseInverse() - u -
                                (uz.array() * rdl.array()).matrix() - corrL);
          v += lo.a[i].dot(lp_term);
        }
        rhs(i) -= v;
      }
      RealVector dy = lu.solve(rhs);
      auto expand = [&](const RealVector& dyv) {
        dZ = Rd;
        for (Eigen::Index i = 0; i < m; ++i) dZ -= dyv(i) * lo.A[i];
        dX = nu * Zinv - X - Zinv * dZ * X - corrS;
        dX = RealMatrix(0.5 * (dX + dX.transpose()));
        if (nl > 0) {
          dz = rdl;
          for (Eigen::Index i = 0; i < m; ++i) dz -= dyv(i) * lo.a[i];
          du = (nu * zl.cwiseInverse() - u -
                (uz.array() * dz.array()).matrix() - corrL);
        }
      };
      expand(dy);
      // Iterative refinement: the explicit Zinv products lose digits once Z
      // is nearly singular near the optimum.
      const double rpScale = 1.0 + (m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0);
      for (int round = 0; round < 4; ++round) {
        RealVector err(m);
        for (Eigen::Index i = 0; i < m; ++i)
          err(i) = rp(i) - inner(lo.A[i], dX) -
                   (nl > 0 ? lo.a[i].dot(du) : 0.0);
        if (err.cwiseAbs().maxCoeff() <= 1e-13 * rpScale) break;
        dy += lu.solve(err);
        expand(dy);
      }
      return dy;
    };

    // Predictor.
    RealMatrix dX, dZ;
    RealVector du(nl), dz(nl);
    solve_direction(0.0, RealMatrix::Zero(ns, ns), RealVector::Zero(nl), dX, dZ,
                    du, dz);
    double ap = max_step_sdp(lltX, dX);
    double ad = max_step_sdp(lltZ, dZ);
    if (nl > 0) {
      ap = std::min(ap, max_step_lp(u, du));
      ad = std::min(ad, max_step_lp(zl, dz));
    }
    const double gap_aff =
        inner(X + ap * dX, Z + ad * dZ) +
        (nl > 0 ? (u + ap * du).dot(zl + ad * dz) : 0.0);
    double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 0.99);

    // Corrector with second-order terms.
    RealMatrix corrS = Zinv * dZ * dX;
    corrS = RealMatrix(0.5 * (corrS + corrS.transpose()));
    RealVector corrL =
        nl > 0 ? RealVector((du.array() * dz.array() / zl.array()).matrix())
               : RealVector();
    RealVector dy = solve_direction(sigma * mu, corrS, corrL, dX, dZ, du, dz);
    ap = 0.98 * max_step_sdp(lltX, dX);
    ad = 0.98 * max_step_sdp(lltZ, dZ);
    if (nl > 0) {
      ap = std::min(ap, 0.98 * max_step_lp(u, du));
      ad = std::min(ad, 0.98 * max_step_lp(zl, dz));
    }
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    if (ap < 1e-12 && ad < 1e-12)
      return finalize(rp_rel <= 1e-7 && rd_rel <= 1e-7 && relgap <= 1e-7
                          ? SdpStatus::Optimal
                          : SdpStatus::MaxIterations,
                      it);

    X += ap * dX;
    Z += ad * dZ;
    y += ad * dy;
    if (nl > 0) {
      u += ap * du;
      zl += ad * dz;
    }
  }
  return finalize(SdpStatus::MaxIterations, max_iter);
}

}  // namespace irsim

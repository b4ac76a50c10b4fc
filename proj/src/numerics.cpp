#include "irsim/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

namespace irsim {

ComplexVector phase_normalize(const ComplexVector& v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best + 1e-15) {  // strict improvement keeps the smallest index on ties
      best = mag;
      pivot = i;
    }
  }
  if (best <= 0.0) return v;
  const Complex rot = std::conj(v(pivot)) / std::abs(v(pivot));
  return v * rot;
}

EigResult hermitian_eig(const ComplexMatrix& m) {
  if (!all_finite(m)) throw InvalidInput("hermitian_eig: non-finite input");
  if (m.rows() != m.cols()) throw InvalidInput("hermitian_eig: not square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  if (es.info() != Eigen::Success)
    throw InvalidInput("hermitian_eig: decomposition failed");

  const Eigen::Index n = m.rows();
  // Eigen returns ascending order; flip to descending.
  EigResult out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.eigenvectors.col(i) = phase_normalize(es.eigenvectors().col(n - 1 - i));
  return out;
}

ComplexMatrix null_space_basis(const ComplexMatrix& m) {
  if (!all_finite(m)) throw InvalidInput("null_space_basis: non-finite input");
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows > cols)
    throw InvalidInput("null_space_basis: more rows than columns");

  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * smax) ++rank;
  const Eigen::Index t = cols - rank;
  if (t == 0) throw EmptyNullSpace("null_space_basis: full column rank");
  return svd.matrixV().rightCols(t);
}

ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() != a.cols()) throw InvalidInput("solve_linear: not square");
  if (a.rows() != b.size()) throw InvalidInput("solve_linear: size mismatch");
  if (!all_finite(a) || !all_finite(b))
    throw InvalidInput("solve_linear: non-finite input");

  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw IllConditioned("solve_linear: condition estimate above 1e12");
  return svd.solve(b);
}

std::pair<double, ComplexVector> principal_generalized_eig(
    const ComplexMatrix& q, const ComplexMatrix& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<ComplexMatrix> ges(hermitize(q),
                                                              hermitize(m));
  if (ges.info() != Eigen::Success)
    throw InvalidInput("principal_generalized_eig: pencil solve failed");
  const Eigen::Index n = q.rows();
  // Generalized eigenvectors are M-orthonormal; renormalize in Euclidean norm.
  ComplexVector v = ges.eigenvectors().col(n - 1);
  v.normalize();
  return {ges.eigenvalues()(n - 1), phase_normalize(v)};
}

}  // namespace irsim

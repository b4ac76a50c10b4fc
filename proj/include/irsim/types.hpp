#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vector3 = Eigen::Vector3d;

inline constexpr Complex kImag{0.0, 1.0};

// Error taxonomy shared by all modules.
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyNullSpace : std::runtime_error {
  explicit EmptyNullSpace(const std::string& what) : std::runtime_error(what) {}
};
struct IllConditioned : std::runtime_error {
  explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateGeometry : std::runtime_error {
  explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};
struct DualNotConverged : std::runtime_error {
  explicit DualNotConverged(const std::string& what) : std::runtime_error(what) {}
};
struct InfeasibleTargets : std::runtime_error {
  explicit InfeasibleTargets(const std::string& what) : std::runtime_error(what) {}
};
struct RankDeficient : std::runtime_error {
  explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

// Enforces conjugate symmetry; input must already be Hermitian to tolerance.
inline ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

}  // namespace irsim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irsim/numerics.hpp"
#include "irsim/rng.hpp"

using namespace irsim;

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.cnormal();
  return hermitize(a);
}

ComplexMatrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  ComplexMatrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = rng.cnormal();
  return a;
}

}  // namespace

TEST_CASE("hermitian_eig identity") {
  const EigResult r = hermitian_eig(ComplexMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(r.eigenvalues(i) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig diagonal") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = -1.0;
  const EigResult r = hermitian_eig(m);
  CHECK(r.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(r.eigenvalues(1) == doctest::Approx(-1.0));
  CHECK(std::abs(r.eigenvectors(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(r.eigenvectors(1, 1) - 1.0) < 1e-14);
}

TEST_CASE("hermitian_eig reconstruction on random 4x4") {
  Rng rng(1);
  const ComplexMatrix m = random_hermitian(4, rng);
  const EigResult r = hermitian_eig(m);
  const ComplexMatrix rec = r.eigenvectors *
                            r.eigenvalues.asDiagonal().toDenseMatrix() *
                            r.eigenvectors.adjoint();
  CHECK((rec - m).norm() < 1e-10 * m.norm());
}

TEST_CASE("hermitian_eig non-finite input rejected") {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  m(1, 0) = std::conj(m(0, 1));
  CHECK_THROWS_AS(hermitian_eig(m), InvalidInput);
}

TEST_CASE("hermitian_eig property sweep") {
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.raw() % 32);
    const ComplexMatrix m = random_hermitian(n, rng);
    const EigResult r = hermitian_eig(m);
    // Descending order.
    for (Eigen::Index i = 1; i < n; ++i)
      CHECK(r.eigenvalues(i - 1) >= r.eigenvalues(i) - 1e-12);
    // Orthonormal columns.
    CHECK((r.eigenvectors.adjoint() * r.eigenvectors -
           ComplexMatrix::Identity(n, n))
              .norm() < 1e-10);
    // Reconstruction.
    const ComplexMatrix rec = r.eigenvectors *
                              r.eigenvalues.asDiagonal().toDenseMatrix() *
                              r.eigenvectors.adjoint();
    CHECK((rec - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
    // Phase normalization: largest-magnitude entry real nonnegative.
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Index arg = 0;
      r.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(std::abs(std::arg(r.eigenvectors(arg, c) +
                              Complex(1e-300, 0.0))) < 1e-8);
    }
  }
}

TEST_CASE("null_space_basis of [1,0,0]") {
  ComplexMatrix m = ComplexMatrix::Zero(1, 3);
  m(0, 0) = 1.0;
  const ComplexMatrix f = null_space_basis(m);
  REQUIRE(f.cols() == 2);
  CHECK((m * f).norm() < 1e-12);
  for (Eigen::Index c = 0; c < 2; ++c) CHECK(std::abs(f(0, c)) < 1e-12);
}

TEST_CASE("null_space_basis of random 2x4") {
  Rng rng(3);
  const ComplexMatrix m = random_matrix(2, 4, rng);
  const ComplexMatrix f = null_space_basis(m);
  REQUIRE(f.cols() == 2);
  CHECK((m * f).norm() <= 1e-10 * m.norm());
  CHECK((f.adjoint() * f - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("null_space_basis of zero matrix") {
  const ComplexMatrix f = null_space_basis(ComplexMatrix::Zero(1, 3));
  REQUIRE(f.cols() == 3);
  CHECK((f.adjoint() * f - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("null_space_basis throws on full row rank square") {
  Rng rng(4);
  ComplexMatrix m = random_matrix(3, 3, rng);
  m += 3.0 * ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(null_space_basis(m), EmptyNullSpace);
}

TEST_CASE("null_space residual property") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.raw() % 4);
    const Eigen::Index cols = rows + 1 + static_cast<Eigen::Index>(rng.raw() % 4);
    const ComplexMatrix m = random_matrix(rows, cols, rng);
    const ComplexMatrix f = null_space_basis(m);
    CHECK((m * f).norm() <= 1e-10 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("solve_linear identity and diagonal") {
  ComplexVector b(2);
  b << Complex(1.0, 2.0), Complex(-3.0, 0.5);
  CHECK((solve_linear(ComplexMatrix::Identity(2, 2), b) - b).norm() < 1e-14);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const ComplexVector x = solve_linear(d, ComplexVector::Ones(2));
  CHECK(std::abs(x(0) - 0.5) < 1e-14);
  CHECK(std::abs(x(1) - 0.25) < 1e-14);
}

TEST_CASE("solve_linear random residual") {
  Rng rng(9);
  const ComplexMatrix a = random_matrix(5, 5, rng);
  const ComplexVector b = rng.cnormal_vector(5);
  const ComplexVector x = solve_linear(a, b);
  CHECK((a * x - b).norm() <= 1e-9 * (a.norm() * x.norm() + b.norm()));
}

TEST_CASE("solve_linear rejects ill-conditioned") {
  ComplexMatrix a = ComplexMatrix::Identity(3, 3);
  a(2, 2) = 1e-14;
  CHECK_THROWS_AS(solve_linear(a, ComplexVector::Ones(3)), IllConditioned);
}

TEST_CASE("principal_generalized_eig matches direct pencil") {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.raw() % 6);
    const ComplexMatrix q = random_hermitian(n, rng);
    ComplexMatrix m = random_hermitian(n, rng);
    m = hermitize(m * m.adjoint()) + ComplexMatrix::Identity(n, n);
    const auto [mu, v] = principal_generalized_eig(q, m);
    // Pencil residual q v = mu m v.
    CHECK((q * v - mu * (m * v)).norm() < 1e-8 * (q.norm() + std::abs(mu) * m.norm()));
    CHECK(v.norm() == doctest::Approx(1.0));
    // mu is the max generalized Rayleigh quotient among random probes.
    for (int p = 0; p < 20; ++p) {
      const ComplexVector u = rng.cnormal_vector(n);
      const double quot = (u.dot(q * u)).real() / (u.dot(m * u)).real();
      CHECK(quot <= mu + 1e-9 * (1.0 + std::abs(mu)));
    }
  }
}

TEST_CASE("phase_normalize deterministic and idempotent") {
  Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const ComplexVector v = rng.cnormal_vector(6);
    const ComplexVector a = phase_normalize(v);
    const Complex rot = std::exp(kImag * rng.uniform(0.0, 6.28));
    const ComplexVector b = phase_normalize((rot * v).eval());
    CHECK((a - b).norm() < 1e-10);
    CHECK((phase_normalize(a) - a).norm() < 1e-14);
  }
}

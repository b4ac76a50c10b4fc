#pragma once

#include <utility>

#include "irsim/types.hpp"

namespace irsim {

struct EigResult {
  RealVector eigenvalues;     // descending
  ComplexMatrix eigenvectors; // columns, orthonormal, phase-normalized
};

// Eigendecomposition of a Hermitian matrix. Eigenvalues descending; every
// eigenvector is rotated so its largest-magnitude entry (smallest index on
// ties) is real nonnegative, making downstream precoders deterministic.
EigResult hermitian_eig(const ComplexMatrix& m);

// Orthonormal basis F (M x T) for the null space of an L x M matrix,
// T = M - rank. Rank counts singular values above 1e-10 * sigma_max.
// Throws EmptyNullSpace when the null space is trivial.
ComplexMatrix null_space_basis(const ComplexMatrix& m);

// Solves a x = b for square a; throws IllConditioned when the condition
// number estimate exceeds 1e12.
ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b);

// Largest eigenvalue and its eigenvector of inv(m) * q for Hermitian q and
// Hermitian positive definite m (solved as the pencil q v = mu m v).
std::pair<double, ComplexVector> principal_generalized_eig(
    const ComplexMatrix& q, const ComplexMatrix& m);

// Phase convention used by hermitian_eig, exposed for reuse: rotates v so
// its largest-magnitude entry is real nonnegative.
ComplexVector phase_normalize(const ComplexVector& v);

}  // namespace irsim

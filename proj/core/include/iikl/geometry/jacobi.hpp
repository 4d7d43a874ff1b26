#pragma once

#include "iikl/types.hpp"

namespace iikl::geometry {

inline constexpr double kDefaultEigenTolerance = 1e-12;

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// `tol` (relative to the matrix norm when that exceeds one). Input must be
// symmetric within 1e-12 or an InputError is thrown.
EigenDecomposition symmetric_eigen(const Matrix& a, double tol = kDefaultEigenTolerance);

/// Eigenvalues only, ascending.
Vector symmetric_eigenvalues(const Matrix& a, double tol = kDefaultEigenTolerance);

}  // namespace iikl::geometry

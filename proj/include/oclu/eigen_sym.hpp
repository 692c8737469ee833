#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oclu {

struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // n x n row-major; column j pairs with values[j]
  int sweeps = 0;               // Jacobi only

  double vector(std::size_t row, std::size_t col) const { return vectors[row * n + col]; }
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// `tol` times the matrix norm. `a` is n x n row-major and symmetric.
SymmetricEigen jacobi_eigen(std::span<const double> a, std::size_t n, double tol = 1e-12,
                            int max_sweeps = 100);

// Householder tridiagonalization + implicit QR (Eigen's self-adjoint solver).
SymmetricEigen tridiagonal_eigen(std::span<const double> a, std::size_t n);

}  // namespace oclu

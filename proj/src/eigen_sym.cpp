#include "oclu/eigen_sym.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oclu {

namespace {

void check_square(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("eigen: matrix is not n x n");
}

// Reorders eigenpairs so the eigenvalues ascend.
void sort_ascending(SymmetricEigen& e) {
  const std::size_t n = e.n;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return e.values[a] < e.values[b]; });
  std::vector<double> values(n), vectors(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = e.values[idx[j]];
    for (std::size_t i = 0; i < n; ++i) vectors[i * n + j] = e.vectors[i * n + idx[j]];
  }
  e.values = std::move(values);
  e.vectors = std::move(vectors);
}

}  // namespace

SymmetricEigen jacobi_eigen(std::span<const double> a_in, std::size_t n, double tol,
                            int max_sweeps) {
  check_square(a_in, n);
  std::vector<double> a(a_in.begin(), a_in.end());
  SymmetricEigen e;
  e.n = n;
  e.vectors.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e.vectors[i * n + i] = 1.0;

  double total = 0.0;
  for (double v : a) total += v * v;
  const double threshold = tol * tol * std::max(total, 1e-300);

  auto off_norm2 = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p * n + q] * a[p * n + q];
    }
    return s;
  };

  for (e.sweeps = 0; e.sweeps < max_sweeps && off_norm2() > threshold; ++e.sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        // Rotation angle that annihilates a[p][q].
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = e.vectors[k * n + p], vkq = e.vectors[k * n + q];
          e.vectors[k * n + p] = c * vkp - s * vkq;
          e.vectors[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  e.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = a[i * n + i];
  sort_ascending(e);
  return e;
}

SymmetricEigen tridiagonal_eigen(std::span<const double> a, std::size_t n) {
  check_square(a, n);
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMatrix> m(a.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen: solver did not converge");
  SymmetricEigen e;
  e.n = n;
  e.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  e.vectors.resize(n * n);
  Eigen::Map<RowMatrix>(e.vectors.data(), static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(n)) = solver.eigenvectors();
  return e;
}

}  // namespace oclu

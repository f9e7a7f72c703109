#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "geopg/random.hpp"
#include "geopg/sparse.hpp"

namespace geopg {

struct SyntheticData {
  SparseDesign design;
  Vector planted;  // the sparse ground-truth coefficients
};

namespace detail {

inline Matrix gaussian_matrix(int p, int n, Rng& rng) {
  Matrix A(p, n);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  return A;
}

// ceil(0.1*n) entries at uniform positions, values 3*N(0,1)
inline Vector planted_coefficients(int n, Rng& rng) {
  int k = (int)std::ceil(0.1 * n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    int j = i + (int)rng.uniform_below((std::uint64_t)(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::sort(idx.begin(), idx.begin() + k);
  Vector x = Vector::Zero(n);
  for (int i = 0; i < k; ++i) x[idx[i]] = 3.0 * rng.normal();
  return x;
}

inline Vector gaussian_vector(int p, Rng& rng) {
  Vector v(p);
  for (int i = 0; i < p; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace detail

/* Least-squares instance: A standard Gaussian, planted coefficients with 10%
 * nonzeros, b = A*xbar + 0.01*N(0,1).  For p > n the smallest eigenvalue of
 * A^T A is truncated to zero (projecting out the lowest right-singular
 * direction), so the data term contributes no strong convexity and the ridge
 * alpha is the exact modulus.  Deterministic in (p, n, seed); draw order is
 * A (row-major), support, values, noise. */
inline SyntheticData gen_synthetic_ls(int p, int n, std::uint64_t seed) {
  if (p <= 0 || n <= 0) throw std::invalid_argument("gen_synthetic_ls: bad shape");
  Rng rng(seed);
  Matrix A = detail::gaussian_matrix(p, n, rng);
  Vector xbar = detail::planted_coefficients(n, rng);
  if (p > n) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
    Vector v = es.eigenvectors().col(0);  // eigenvalues ascending
    A -= (A * v) * v.transpose();
  }
  Vector b = A * xbar + 0.01 * detail::gaussian_vector(p, rng);
  return {from_dense(A, b), std::move(xbar)};
}

/* Logistic instance: same A/xbar/noise recipe (no eigenvalue truncation);
 * scores l = A*xbar + 0.01*N(0,1) and labels b_i in {+-1} drawn Bernoulli with
 * P(b_i = +1) = 1/(1+exp(l_i)).  `planted_override` substitutes the ground
 * truth (e.g. the zero vector) while keeping the rest of the stream fixed. */
inline SyntheticData gen_synthetic_logistic(int p, int n, std::uint64_t seed,
                                            std::optional<Vector> planted_override = {}) {
  if (p <= 0 || n <= 0) throw std::invalid_argument("gen_synthetic_logistic: bad shape");
  Rng rng(seed);
  Matrix A = detail::gaussian_matrix(p, n, rng);
  Vector xbar = detail::planted_coefficients(n, rng);
  if (planted_override) {
    if (planted_override->size() != n)
      throw std::invalid_argument("gen_synthetic_logistic: planted override size");
    xbar = *planted_override;
  }
  Vector scores = A * xbar + 0.01 * detail::gaussian_vector(p, rng);
  Vector b(p);
  for (int i = 0; i < p; ++i) {
    double prob_pos = 1.0 / (1.0 + std::exp(scores[i]));
    b[i] = rng.uniform01() < prob_pos ? 1.0 : -1.0;
  }
  return {from_dense(A, b), std::move(xbar)};
}

}  // namespace geopg

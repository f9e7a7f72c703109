#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace geopg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/* Work counters owned by a single solver run.  Conventions:
 *   f_ev  - evaluations of the smooth part f (F = f + h evaluations count once),
 *   g_ev  - gradient evaluations,
 *   p_ev  - proximal-map evaluations,
 *   mvm   - matrix-vector products with A or A^T (counted inside matvec). */
struct EvalCounters {
  std::uint64_t f_ev = 0;
  std::uint64_t g_ev = 0;
  std::uint64_t p_ev = 0;
  std::uint64_t mvm = 0;
};

/* Row-sparse design matrix A (p x n, CSR layout) plus the response vector b.
 * Column indices are 0-based internally and strictly increasing within a row. */
struct SparseDesign {
  int p = 0;  // rows (samples)
  int n = 0;  // cols (features)
  std::vector<std::int64_t> row_start;  // size p+1
  std::vector<int> col;
  std::vector<double> val;
  Vector b;
};

inline void validate(const SparseDesign& d) {
  if (d.p < 0 || d.n < 0) throw std::invalid_argument("sparse design: negative shape");
  if ((int)d.row_start.size() != d.p + 1)
    throw std::invalid_argument("sparse design: row_start size mismatch");
  if (d.col.size() != d.val.size())
    throw std::invalid_argument("sparse design: col/val size mismatch");
  if (d.row_start.front() != 0 || d.row_start.back() != (std::int64_t)d.col.size())
    throw std::invalid_argument("sparse design: row_start bounds");
  for (int i = 0; i < d.p; ++i) {
    int prev = -1;
    for (std::int64_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k) {
      if (d.col[k] < 0 || d.col[k] >= d.n)
        throw std::invalid_argument("sparse design: column index out of range");
      if (d.col[k] <= prev)
        throw std::invalid_argument("sparse design: non-increasing column index");
      prev = d.col[k];
    }
  }
  if (d.b.size() != d.p) throw std::invalid_argument("sparse design: b size mismatch");
}

/* y = A v (transpose=false, v in R^n) or y = A^T v (transpose=true, v in R^p).
 * Each call counts as one matrix-vector product. */
inline Vector matvec(const SparseDesign& d, const Vector& v, bool transpose,
                     EvalCounters& counters) {
  counters.mvm += 1;
  if (!transpose) {
    if (v.size() != d.n) throw std::invalid_argument("matvec: expected length-n vector");
    Vector y = Vector::Zero(d.p);
    for (int i = 0; i < d.p; ++i) {
      double acc = 0.0;
      for (std::int64_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k)
        acc += d.val[k] * v[d.col[k]];
      y[i] = acc;
    }
    return y;
  }
  if (v.size() != d.p) throw std::invalid_argument("matvec: expected length-p vector");
  Vector y = Vector::Zero(d.n);
  for (int i = 0; i < d.p; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::int64_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k)
      y[d.col[k]] += d.val[k] * vi;
  }
  return y;
}

inline Matrix to_dense(const SparseDesign& d) {
  Matrix A = Matrix::Zero(d.p, d.n);
  for (int i = 0; i < d.p; ++i)
    for (std::int64_t k = d.row_start[i]; k < d.row_start[i + 1]; ++k)
      A(i, d.col[k]) = d.val[k];
  return A;
}

inline SparseDesign from_dense(const Matrix& A, const Vector& b) {
  SparseDesign d;
  d.p = (int)A.rows();
  d.n = (int)A.cols();
  d.row_start.assign(d.p + 1, 0);
  d.col.reserve((size_t)d.p * d.n);
  d.val.reserve((size_t)d.p * d.n);
  for (int i = 0; i < d.p; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (A(i, j) != 0.0) {
        d.col.push_back(j);
        d.val.push_back(A(i, j));
      }
    }
    d.row_start[i + 1] = (std::int64_t)d.col.size();
  }
  d.b = b;
  return d;
}

}  // namespace geopg

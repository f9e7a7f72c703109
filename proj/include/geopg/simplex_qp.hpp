#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geopg/ball.hpp"
#include "geopg/sparse.hpp"

namespace geopg {

/* Convex weights over a set of balls; entries sum to one. */
struct SimplexWeights {
  Vector lambda;
};

/* Euclidean projection onto the probability simplex (sort-based, exact). */
inline Vector project_to_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    cum += u[j];
    double cand = (1.0 - cum) / (double)(j + 1);
    if (u[j] + cand > 0.0) {
      rho = (int)(j + 1);
      tau = cand;
    }
  }
  (void)rho;
  Vector x(m);
  for (Eigen::Index i = 0; i < m; ++i) x[i] = std::max(v[i] + tau, 0.0);
  return x;
}

struct RccResult {
  SimplexWeights weights;
  Ball ball;          // center = C lambda, r_sq = dual objective value
  bool meb_guarantee; // true when the ball is certified minimal (m < n, or m <= 2)
  int iterations = 0;
};

/* Enclosing ball of an intersection of m balls via the simplex-constrained
 * dual
 *   min_{lambda in simplex} ||C lambda||^2 - sum_i lambda_i ||c_i||^2
 *                            + sum_i lambda_i r_i^2,
 * solved by accelerated projected gradient with restarts and the exact
 * simplex projection.  For any feasible lambda the ball
 * B(C lambda, q(lambda)) contains the intersection; it is the minimum
 * enclosing ball when m < n (and always for m <= 2).  A nonpositive optimal
 * value certifies an empty intersection and is returned as-is. */
inline RccResult rcc_dual_solve(const Matrix& centers, const Vector& radii_sq,
                                double pg_tol = 1e-12, int max_iter = 100000) {
  const Eigen::Index n = centers.rows(), m = centers.cols();
  if (m < 1 || radii_sq.size() != m)
    throw std::invalid_argument("rcc_dual_solve: bad inputs");
  const bool guarantee = (m < n) || (m <= 2);
  if (m == 1)
    return {SimplexWeights{Vector::Ones(1)}, Ball{centers.col(0), radii_sq[0]}, guarantee, 0};

  const Matrix G = centers.transpose() * centers;  // m x m Gram
  Vector w(m);
  for (Eigen::Index i = 0; i < m; ++i) w[i] = G(i, i) - radii_sq[i];
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const double L = std::max(2.0 * es.eigenvalues().maxCoeff(), 1e-12);
  /* Stopping is relative to the gradient magnitude over the simplex; an
   * absolute threshold is unreachable when the centers carry the 1/alpha
   * amplification of the forward-squeeze points. */
  const double tol = pg_tol * (1.0 + w.lpNorm<Eigen::Infinity>() + 2.0 * G.cwiseAbs().maxCoeff());

  auto grad = [&](const Vector& lam) { return (2.0 * (G * lam) - w).eval(); };
  auto value = [&](const Vector& lam) { return lam.dot(G * lam) - lam.dot(w); };
  auto pg_norm = [&](const Vector& lam) {
    return (lam - project_to_simplex(lam - grad(lam))).norm();
  };

  /* Active-set polish: equality-constrained KKT solve on a candidate support,
   * dropping negative weights and admitting violated coordinates.  Nearly
   * coincident centers make G singular and stall projected gradient in a
   * sublinear tail; the polish closes those instances finitely.  The full
   * projected-gradient test is the sole acceptance judge, so the tiny
   * Tikhonov term cannot bias an accepted result beyond the threshold. */
  auto try_polish = [&](const Vector& seed) -> std::optional<Vector> {
    std::vector<Eigen::Index> S;
    for (Eigen::Index i = 0; i < m; ++i)
      if (seed[i] > 1e-10) S.push_back(i);
    if (S.empty()) S.push_back(0);
    const double delta = 1e-13 * (1.0 + G.trace() / (double)m);
    for (int round = 0; round < 3 * (int)m + 5; ++round) {
      const Eigen::Index k = (Eigen::Index)S.size();
      Matrix K = Matrix::Zero(k + 1, k + 1);
      Vector rhs(k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) K(a, b) = 2.0 * G(S[a], S[b]);
        K(a, a) += delta;
        K(a, k) = K(k, a) = 1.0;
        rhs[a] = w[S[a]];
      }
      rhs[k] = 1.0;
      Vector sol = Eigen::FullPivLU<Matrix>(K).solve(rhs);
      Eigen::Index worst = 0;
      for (Eigen::Index a = 1; a < k; ++a)
        if (sol[a] < sol[worst]) worst = a;
      if (k > 1 && sol[worst] < -1e-12) {
        S.erase(S.begin() + worst);
        continue;
      }
      Vector full = Vector::Zero(m);
      for (Eigen::Index a = 0; a < k; ++a) full[S[a]] = std::max(sol[a], 0.0);
      double mass = full.sum();
      if (!(mass > 0.0) || !full.allFinite()) return std::nullopt;
      full /= mass;
      if (pg_norm(full) <= tol) return full;
      Vector g = grad(full);
      double nu = std::numeric_limits<double>::infinity();
      for (Eigen::Index j : S) nu = std::min(nu, g[j]);
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < m; ++j)
        if (full[j] == 0.0 && g[j] < nu && (enter < 0 || g[j] < g[enter])) enter = j;
      if (enter < 0) return std::nullopt;
      S.push_back(enter);
    }
    return std::nullopt;
  };

  Vector lam = Vector::Constant(m, 1.0 / (double)m);
  Vector y = lam;
  double theta = 1.0;
  int it = 0;
  bool done = false;
  for (; it < max_iter; ++it) {
    if (it % 300 == 0) {
      if (auto polished = try_polish(lam)) {
        lam = *polished;
        done = true;
        break;
      }
    }
    if (pg_norm(lam) <= tol) {
      done = true;
      break;
    }
    Vector lam_next = project_to_simplex(y - grad(y) / L);
    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    Vector y_next = lam_next + ((theta - 1.0) / theta_next) * (lam_next - lam);
    if ((y - lam_next).dot(lam_next - lam) > 0.0) {  // adaptive restart
      theta_next = 1.0;
      y_next = lam_next;
    }
    lam = lam_next;
    y = y_next;
    theta = theta_next;
  }
  if (!done && pg_norm(lam) > tol)
    throw std::runtime_error("rcc_dual_solve: projected gradient did not converge");
  return {SimplexWeights{lam}, Ball{centers * lam, value(lam)}, guarantee, it};
}

}  // namespace geopg

#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "geopg/problem.hpp"
#include "geopg/sparse.hpp"

namespace geopg {

namespace detail {

inline double stable_sigmoid(double z) {  // 1/(1+exp(-z))
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) {  // log(1+exp(z))
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline Vector l1_prox_jvp(const Vector& v, double theta, const Vector& dir) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = std::abs(v[i]) > theta ? dir[i] : 0.0;  // kinks |v_i| = theta get 0
  return out;
}

}  // namespace detail

/* lambda_max(A^T A), exact via a dense eigensolve for moderate n, power
 * iteration (padded slightly upward so derived step sizes stay on the safe
 * side) for larger problems. */
inline double lambda_max_ata(const SparseDesign& d, int dense_limit = 2000) {
  if (d.n == 0 || d.p == 0) return 0.0;
  if (d.n <= dense_limit) {
    Matrix A = to_dense(d);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
    return es.eigenvalues().maxCoeff();
  }
  EvalCounters scratch;
  Vector v = Vector::Ones(d.n) / std::sqrt((double)d.n);
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = matvec(d, matvec(d, v, false, scratch), true, scratch);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    double lam_new = w.dot(matvec(d, matvec(d, w, false, scratch), true, scratch));
    bool done = std::abs(lam_new - lam) <= 1e-12 * std::max(1.0, lam_new);
    lam = lam_new;
    v = w;
    if (done && it > 20) break;
  }
  return lam * (1.0 + 1e-6);
}

// mu = c/p * ||A^T b||_inf
inline double mu_from_scale(const SparseDesign& d, double c) {
  EvalCounters scratch;
  Vector atb = matvec(d, d.b, true, scratch);
  return c / (double)d.p * atb.lpNorm<Eigen::Infinity>();
}

inline double smooth_lipschitz_ls(const SparseDesign& d, double alpha) {
  return lambda_max_ata(d) / (double)d.p + alpha;
}

inline double smooth_lipschitz_logistic(const SparseDesign& d, double alpha) {
  return lambda_max_ata(d) / (4.0 * (double)d.p) + alpha;
}

/* Elastic-net least squares:
 *   f(x) = ||Ax - b||^2/(2p) + (alpha/2)||x||^2,   h(x) = mu ||x||_1.
 * The ridge lives in f so alpha is the certified strong-convexity modulus and
 * h keeps the plain soft-threshold prox.  beta is left unset; fill it with
 * smooth_lipschitz_ls when a fixed-step solver needs it. */
inline CompositeProblem make_elastic_net_ls(std::shared_ptr<const SparseDesign> d, double alpha,
                                            double mu) {
  if (!(alpha > 0.0)) throw std::invalid_argument("make_elastic_net_ls: alpha must be positive");
  if (mu < 0.0) throw std::invalid_argument("make_elastic_net_ls: mu must be nonnegative");
  validate(*d);
  const double p = (double)d->p;
  CompositeProblem prob;
  prob.alpha = alpha;
  prob.f_eval = [d, alpha, p](const Vector& x, EvalCounters& c) {
    Vector r = matvec(*d, x, false, c) - d->b;
    return r.squaredNorm() / (2.0 * p) + 0.5 * alpha * x.squaredNorm();
  };
  prob.grad_f = [d, alpha, p](const Vector& x, EvalCounters& c) {
    Vector r = matvec(*d, x, false, c) - d->b;
    return (matvec(*d, r, true, c) / p + alpha * x).eval();
  };
  prob.hess_vec = [d, alpha, p](const Vector&, const Vector& v, EvalCounters& c) {
    return (matvec(*d, matvec(*d, v, false, c), true, c) / p + alpha * v).eval();
  };
  prob.h_eval = [mu](const Vector& x) { return mu * x.lpNorm<1>(); };
  prob.prox_h = [mu](const Vector& v, double t, EvalCounters&) {
    return soft_threshold(v, t * mu);
  };
  prob.prox_jvp = [mu](const Vector& v, double t, const Vector& dir) {
    return detail::l1_prox_jvp(v, t * mu, dir);
  };
  return prob;
}

/* Elastic-net logistic regression with labels b_i in {+-1}:
 *   f(x) = (1/p) sum_i log(1+exp(-b_i a_i^T x)) + (alpha/2)||x||^2,
 *   h(x) = mu ||x||_1. */
inline CompositeProblem make_elastic_net_logistic(std::shared_ptr<const SparseDesign> d,
                                                  double alpha, double mu) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("make_elastic_net_logistic: alpha must be positive");
  if (mu < 0.0) throw std::invalid_argument("make_elastic_net_logistic: mu must be nonnegative");
  validate(*d);
  const double p = (double)d->p;
  CompositeProblem prob;
  prob.alpha = alpha;
  prob.f_eval = [d, alpha, p](const Vector& x, EvalCounters& c) {
    Vector z = matvec(*d, x, false, c);
    double acc = 0.0;
    for (int i = 0; i < d->p; ++i) acc += detail::softplus(-d->b[i] * z[i]);
    return acc / p + 0.5 * alpha * x.squaredNorm();
  };
  prob.grad_f = [d, alpha, p](const Vector& x, EvalCounters& c) {
    Vector z = matvec(*d, x, false, c);
    Vector w(d->p);
    for (int i = 0; i < d->p; ++i)
      w[i] = -d->b[i] * detail::stable_sigmoid(-d->b[i] * z[i]);
    return (matvec(*d, w, true, c) / p + alpha * x).eval();
  };
  prob.hess_vec = [d, alpha, p](const Vector& x, const Vector& v, EvalCounters& c) {
    Vector z = matvec(*d, x, false, c);
    Vector u = matvec(*d, v, false, c);
    for (int i = 0; i < d->p; ++i) {
      double s = detail::stable_sigmoid(z[i]);
      u[i] *= s * (1.0 - s);
    }
    return (matvec(*d, u, true, c) / p + alpha * v).eval();
  };
  prob.h_eval = [mu](const Vector& x) { return mu * x.lpNorm<1>(); };
  prob.prox_h = [mu](const Vector& v, double t, EvalCounters&) {
    return soft_threshold(v, t * mu);
  };
  prob.prox_jvp = [mu](const Vector& v, double t, const Vector& dir) {
    return detail::l1_prox_jvp(v, t * mu, dir);
  };
  return prob;
}

}  // namespace geopg

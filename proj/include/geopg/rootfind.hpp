#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "geopg/problem.hpp"

namespace geopg {

/* Line probe for one outer iteration: candidate points z(s) = x + s(c - x)
 * with x the previous forward step and c the previous ball center.  The
 * profile
 *   phi(s) = <z(s)^+ - z(s), x - c>
 * is strictly increasing in s, and its root is the point whose forward step
 * is orthogonal to the line. */
struct LineProbe {
  const CompositeProblem& problem;
  Vector x;
  Vector c;
  double t;

  bool valid() const {
    return (x - c).norm() > 1e-14 * (1.0 + x.norm()) && t > 0.0;
  }
};

struct RootResult {
  double s = 0.0;
  StepEval eval;       // proximal-gradient state at the accepted point
  double phi = 0.0;    // profile residual at the accepted point
  int iterations = 0;  // profile evaluations performed by the search
  bool fallback = false;  // bracketed method used because curvature was unavailable
};

namespace detail {

struct ProbeEval {
  double phi;
  StepEval step;
};

inline ProbeEval probe_eval(const LineProbe& pr, double s, EvalCounters& counters) {
  Vector z = pr.x + s * (pr.c - pr.x);
  StepEval e = prox_grad_step_eval(pr.problem, z, pr.t, counters);
  double phi = (e.it.x_plus - e.it.x).dot(pr.x - pr.c);
  return {phi, std::move(e)};
}

/* Generalized derivative of phi along the line:
 *   phi'(s) = <(D (I - t hess_f(z)) - I)(c - x), x - c>
 * with D the generalized Jacobian of the prox at the prox argument. */
inline double probe_derivative(const LineProbe& pr, const ProbeEval& at, EvalCounters& counters) {
  Vector u = pr.c - pr.x;
  Vector v = u - pr.t * pr.problem.eval_hess_vec(at.step.it.x, u, counters);
  Vector Dv = pr.problem.prox_jvp(at.step.prox_arg, pr.t, v);
  return (u - Dv).dot(u);
}

inline double root_scale(const LineProbe& pr) {
  return pr.problem.alpha * pr.t * (pr.x - pr.c).squaredNorm();
}

/* Brent-Dekker on a bracket [a,b] with phi(a) < 0 < phi(b).  Stops when the
 * residual drops below ftol or the bracket collapses to machine width. */
inline RootResult brent_on_bracket(const LineProbe& pr, double a, ProbeEval ea, double b,
                                   ProbeEval eb, double ftol, int evals_so_far,
                                   EvalCounters& counters) {
  const double eps = std::numeric_limits<double>::epsilon();
  double fa = ea.phi, fb = eb.phi;
  double c = a, fc = fa;
  ProbeEval ec = ea;
  double e = b - a, dstep = e;
  int evals = evals_so_far;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; ec = ea;
      e = dstep = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; fa = fb; ea = eb;
      b = c; fb = fc; eb = ec;
      c = a; fc = fa; ec = ea;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 1e-300;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= ftol || fb == 0.0 || std::abs(xm) <= tol1)
      return {b, std::move(eb.step), fb, evals, false};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        double r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = dstep;
        dstep = p / q;
      } else {
        dstep = xm;
        e = xm;
      }
    } else {
      dstep = xm;
      e = xm;
    }
    a = b; fa = fb; ea = eb;
    b += std::abs(dstep) > tol1 ? dstep : (xm > 0.0 ? tol1 : -tol1);
    eb = probe_eval(pr, b, counters);
    fb = eb.phi;
    ++evals;
  }
  throw std::runtime_error("root-finder iteration budget exceeded");
}

}  // namespace detail

inline double phi_bar(const LineProbe& pr, double s, EvalCounters& counters) {
  return detail::probe_eval(pr, s, counters).phi;
}

/* Dispatch shared by both searches.  phi(0) >= 0 keeps the previous forward
 * point; for the bracketed variant phi(1) <= 0 keeps the center.  `anchor`
 * optionally supplies the already-computed step at s = 0 (same t). */
inline RootResult find_xk_brent(const LineProbe& pr, EvalCounters& counters, double tol = 1e-10,
                                const StepEval* anchor = nullptr) {
  if (!pr.valid()) throw std::invalid_argument("find_xk_brent: degenerate line probe");
  const double ftol = tol * detail::root_scale(pr);
  detail::ProbeEval e0;
  int evals = 0;
  if (anchor) {
    e0 = {(anchor->it.x_plus - anchor->it.x).dot(pr.x - pr.c), *anchor};
  } else {
    e0 = detail::probe_eval(pr, 0.0, counters);
    ++evals;
  }
  if (e0.phi >= 0.0) return {0.0, std::move(e0.step), e0.phi, evals, false};
  detail::ProbeEval e1 = detail::probe_eval(pr, 1.0, counters);
  ++evals;
  if (e1.phi <= 0.0) return {1.0, std::move(e1.step), e1.phi, evals, false};
  return detail::brent_on_bracket(pr, 0.0, std::move(e0), 1.0, std::move(e1), ftol, evals,
                                  counters);
}

/* Globalized semi-smooth Newton on s >= 0: expand a bracket by doubling, then
 * take Newton steps safeguarded by bisection (steps leaving the bracket or
 * failing to shrink the residual bisect instead).  Falls back to Brent-Dekker
 * on the expanded bracket when the problem carries no curvature action. */
inline RootResult find_xk_ssn(const LineProbe& pr, EvalCounters& counters, double tol = 1e-10,
                              const StepEval* anchor = nullptr) {
  if (!pr.valid()) throw std::invalid_argument("find_xk_ssn: degenerate line probe");
  const double ftol = tol * detail::root_scale(pr);
  detail::ProbeEval e0;
  int evals = 0;
  if (anchor) {
    e0 = {(anchor->it.x_plus - anchor->it.x).dot(pr.x - pr.c), *anchor};
  } else {
    e0 = detail::probe_eval(pr, 0.0, counters);
    ++evals;
  }
  if (e0.phi >= 0.0) return {0.0, std::move(e0.step), e0.phi, evals, false};

  double lo = 0.0, hi = 1.0;
  detail::ProbeEval elo = std::move(e0);
  detail::ProbeEval ehi = detail::probe_eval(pr, hi, counters);
  ++evals;
  while (ehi.phi <= 0.0) {
    if (std::abs(ehi.phi) <= ftol) return {hi, std::move(ehi.step), ehi.phi, evals, false};
    lo = hi;
    elo = std::move(ehi);
    hi *= 2.0;
    if (hi > 1e18) throw std::runtime_error("find_xk_ssn: bracket expansion failed");
    ehi = detail::probe_eval(pr, hi, counters);
    ++evals;
  }

  const bool have_curvature = pr.problem.has_hess_vec() && pr.problem.has_prox_jvp();
  if (!have_curvature) {
    RootResult r = detail::brent_on_bracket(pr, lo, std::move(elo), hi, std::move(ehi), ftol,
                                            evals, counters);
    r.fallback = true;
    return r;
  }

  const double eps = std::numeric_limits<double>::epsilon();
  // secant start inside the bracket
  double s = hi - ehi.phi * (hi - lo) / (ehi.phi - elo.phi);
  if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
  double prev_abs = std::abs(elo.phi);
  int stalls = 0;
  for (int iter = 0; iter < 100; ++iter) {
    detail::ProbeEval es = detail::probe_eval(pr, s, counters);
    ++evals;
    if (std::abs(es.phi) <= ftol) return {s, std::move(es.step), es.phi, evals, false};
    if (std::abs(es.phi) > 0.5 * prev_abs) ++stalls; else stalls = 0;
    prev_abs = std::abs(es.phi);
    if (es.phi < 0.0) {
      lo = s;
      elo = es;
    } else {
      hi = s;
      ehi = es;
    }
    if (hi - lo <= 4.0 * eps * std::max(1.0, std::abs(hi))) {
      if (std::abs(elo.phi) < std::abs(ehi.phi))
        return {lo, std::move(elo.step), elo.phi, evals, false};
      return {hi, std::move(ehi.step), ehi.phi, evals, false};
    }
    double d = detail::probe_derivative(pr, es, counters);
    double cand = d > 0.0 ? s - es.phi / d : std::numeric_limits<double>::quiet_NaN();
    if (stalls < 2 && std::isfinite(cand) && cand > lo && cand < hi) {
      s = cand;
    } else {
      s = 0.5 * (lo + hi);
      stalls = 0;
    }
  }
  throw std::runtime_error("root-finder iteration budget exceeded");
}

}  // namespace geopg

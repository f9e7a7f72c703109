#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geopg/ball.hpp"
#include "geopg/problem.hpp"
#include "geopg/rootfind.hpp"
#include "geopg/simplex_qp.hpp"

namespace geopg {

enum class Variant { geopg, geopg_b, lgeopg, lgeopg_b, apg_b };
enum class Termination { relgap, gradmap_inf };
enum class RootFinderKind { brent, ssn };
enum class SolveStatus { converged, max_iter, geometric_floor };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::geopg: return "geopg";
    case Variant::geopg_b: return "geopg-b";
    case Variant::lgeopg: return "lgeopg";
    case Variant::lgeopg_b: return "lgeopg-b";
    case Variant::apg_b: return "apg-b";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "geopg") return Variant::geopg;
  if (s == "geopg-b") return Variant::geopg_b;
  if (s == "lgeopg") return Variant::lgeopg;
  if (s == "lgeopg-b") return Variant::lgeopg_b;
  if (s == "apg-b") return Variant::apg_b;
  throw std::invalid_argument("unknown solver variant '" + s + "'");
}

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::geometric_floor: return "converged-geometric-floor";
  }
  return "?";
}

struct SolverConfig {
  Variant variant = Variant::geopg_b;
  double t0 = 1.0;
  double alpha = 0.0;  // > 0 overrides the problem's certified modulus
  double eta = 0.5;    // backtracking shrink factor
  double gamma = 0.9;  // step grows by 1/gamma after an iteration without backtracking
  int memory = 5;      // ball memory of the limited-memory variants
  double tol = 1e-8;
  long max_iter = 100000;
  Termination termination = Termination::gradmap_inf;
  std::optional<double> f_star;  // required by relgap termination
  RootFinderKind rootfinder = RootFinderKind::ssn;
  double root_tol = 1e-12;      // line-search residual tolerance (relative to alpha*t*|x-c|^2)
  double t_growth_cap = 1e6;    // growth stops at t_growth_cap * t0
  bool record_centers = false;  // keep c_k per trace row (ball-tracking solvers only)
};

inline void validate(const SolverConfig& cfg) {
  if (!(cfg.t0 > 0.0)) throw std::invalid_argument("solver config: t0 must be positive");
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
    throw std::invalid_argument("solver config: eta must lie in (0,1)");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw std::invalid_argument("solver config: gamma must lie in (0,1)");
  if (cfg.memory < 0) throw std::invalid_argument("solver config: memory must be nonnegative");
  if (!(cfg.tol >= 0.0)) throw std::invalid_argument("solver config: tol must be nonnegative");
  if (cfg.max_iter < 0) throw std::invalid_argument("solver config: max_iter must be nonnegative");
  if (!(cfg.root_tol > 0.0)) throw std::invalid_argument("solver config: root_tol must be positive");
  if (!(cfg.t_growth_cap >= 1.0))
    throw std::invalid_argument("solver config: t_growth_cap must be at least 1");
  if (cfg.termination == Termination::relgap && !cfg.f_star)
    throw std::invalid_argument("solver config: relgap termination requires f_star");
}

/* One trace row per iteration (plus row 0 for the initial state).  f_value is
 * F at the forward point x_k^+ for the geometric solvers and F(x_k) for the
 * accelerated baseline; r_sq is absent where no ball is tracked. */
struct TraceRecord {
  long iter = 0;
  double time_s = 0.0;
  double f_value = 0.0;
  std::optional<double> rel_gap;
  double gmap_inf = 0.0;
  double t_k = 0.0;
  std::optional<double> r_sq;
  EvalCounters counters;
};

struct SolveResult {
  SolveStatus status = SolveStatus::max_iter;
  Vector x;            // final forward point
  double f_value = 0.0;
  long iterations = 0;
  std::vector<TraceRecord> trace;
  std::vector<Vector> centers;  // c_k per trace row when config.record_centers is set
  EvalCounters counters;
};

namespace detail {

inline std::optional<double> relgap_of(double F, const std::optional<double>& f_star) {
  if (!f_star) return {};
  double denom = std::abs(*f_star);
  if (denom == 0.0) denom = 1.0;  // degenerate F* = 0: fall back to the absolute gap
  return std::max(0.0, (F - *f_star) / denom);
}

inline bool terminated(const SolverConfig& cfg, const TraceRecord& rec) {
  if (cfg.termination == Termination::gradmap_inf) return rec.gmap_inf <= cfg.tol;
  return rec.rel_gap.has_value() && *rec.rel_gap <= cfg.tol;
}

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/* Shared driver for the geometric solvers.  backtracking selects the
 * step-size adaptation of the -B variants; memory > 0 keeps a window of
 * forward-squeeze balls and intersects them through the simplex dual. */
inline SolveResult geopg_engine(const CompositeProblem& problem_in, SolverConfig cfg,
                                const Vector& x0, bool backtracking, int memory) {
  validate(cfg);
  CompositeProblem prob = problem_in;
  if (cfg.alpha > 0.0) prob.alpha = cfg.alpha;
  if (!(prob.alpha > 0.0))
    throw std::invalid_argument("solver: a positive strong-convexity modulus is required");
  const double alpha = prob.alpha;

  double t = cfg.t0;
  if (!backtracking) {
    if (!prob.beta) throw std::invalid_argument("fixed-step variant requires problem.beta");
    if (memory > 0) t = 1.0 / *prob.beta;
    if (!(t > 0.0) || t > (1.0 / *prob.beta) * (1.0 + 1e-12))
      throw std::invalid_argument("fixed-step variant requires t0 in (0, 1/beta]");
  }

  EvalCounters cnt;
  StopWatch watch;
  SolveResult out;
  bool last_backtracked = false;

  StepEval e0 = prox_grad_step_eval(prob, x0, t, cnt);
  double f_fwd;
  if (backtracking) {
    DecreaseCheck dc = sufficient_decrease_check(prob, e0, cnt);
    while (!dc.holds) {
      t *= cfg.eta;
      if (t < 1e-300) throw std::runtime_error("backtracking step underflow");
      last_backtracked = true;
      e0 = prox_grad_step_eval(prob, x0, t, cnt);
      dc = sufficient_decrease_check(prob, e0, cnt);
    }
    f_fwd = dc.f_x_plus;
  } else {
    f_fwd = prob.eval_f(e0.it.x_plus, cnt);
  }

  Vector c = e0.it.x_pp;
  double R2 = e0.it.gmap.squaredNorm() * (1.0 - alpha * t) / (alpha * alpha);
  Vector x_plus = e0.it.x_plus;
  double F_cur = f_fwd + prob.eval_h(x_plus);
  std::deque<Ball> mem;

  // forward-point probe: supplies the termination norm and anchors the next root search
  StepEval term = prox_grad_step_eval(prob, x_plus, t, cnt);
  double anchor_t = t;

  out.trace.push_back({0, watch.seconds(), F_cur, relgap_of(F_cur, cfg.f_star),
                       term.it.gmap.lpNorm<Eigen::Infinity>(), t, R2, cnt});
  if (cfg.record_centers) out.centers.push_back(c);
  if (terminated(cfg, out.trace.back())) {
    out.status = SolveStatus::converged;
  } else {
    for (long k = 1; k <= cfg.max_iter; ++k) {
      if (backtracking && !last_backtracked)
        t = std::min(t / cfg.gamma, cfg.t_growth_cap * cfg.t0);
      bool bt_this = false;

      RootResult root;
      DecreaseCheck dc{true, 0.0, 0.0};
      for (;;) {
        if ((x_plus - c).norm() <= 1e-14 * (1.0 + x_plus.norm())) {
          // probe degenerate (center reached): keep the forward point
          StepEval e = (anchor_t == t) ? term : prox_grad_step_eval(prob, x_plus, t, cnt);
          root = RootResult{0.0, std::move(e), 0.0, 0, false};
        } else {
          LineProbe probe{prob, x_plus, c, t};
          const StepEval* anchor = (anchor_t == t) ? &term : nullptr;
          root = cfg.rootfinder == RootFinderKind::brent
                     ? find_xk_brent(probe, cnt, cfg.root_tol, anchor)
                     : find_xk_ssn(probe, cnt, cfg.root_tol, anchor);
        }
        if (!backtracking) break;
        dc = sufficient_decrease_check(prob, root.eval, cnt);
        if (dc.holds) break;
        t *= cfg.eta;
        if (t < 1e-300) throw std::runtime_error("backtracking step underflow");
        bt_this = true;
      }
      last_backtracked = bt_this;

      const Iterate& it = root.eval.it;
      double R_A2 = it.gmap.squaredNorm() * (1.0 - alpha * t) / (alpha * alpha);
      double F_new =
          (backtracking ? dc.f_x_plus : prob.eval_f(it.x_plus, cnt)) + prob.eval_h(it.x_plus);

      bool floored = false;
      Vector c_new = c;
      double R2_new = R2;
      if (R_A2 <= 0.0) {
        floored = true;
      } else if (memory == 0) {
        double R_B2 = R2 - 2.0 * (F_cur - F_new) / alpha;
        if (R_B2 <= 0.0) {
          floored = true;
        } else {
          try {
            Ball nb = min_enclosing_two_balls(Ball{it.x_pp, R_A2}, Ball{c, R_B2});
            c_new = nb.center;
            R2_new = nb.r_sq;
          } catch (const DisjointBallsError&) {
            floored = true;
          }
        }
      } else {
        mem.push_back(Ball{it.x_pp, R_A2});
        if ((int)mem.size() > memory) mem.pop_front();
        try {
          Ball two = min_enclosing_two_balls(Ball{c, R2}, Ball{it.x_pp, R_A2});
          Matrix centers(c.size(), (Eigen::Index)mem.size() + 1);
          Vector radii((Eigen::Index)mem.size() + 1);
          centers.col(0) = c;
          radii[0] = R2;
          for (size_t j = 0; j < mem.size(); ++j) {
            centers.col((Eigen::Index)j + 1) = mem[j].center;
            radii[(Eigen::Index)j + 1] = mem[j].r_sq;
          }
          RccResult rcc = rcc_dual_solve(centers, radii);
          double cand = std::min(rcc.ball.r_sq, two.r_sq);
          if (cand <= 0.0) {
            floored = true;
          } else {
            c_new = rcc.ball.center;
            R2_new = cand;
          }
        } catch (const DisjointBallsError&) {
          floored = true;
        }
      }

      /* Fixed-step, memory-free runs carry a per-iteration contraction
       * certificate; once rounding erases it the tracked sequence is dead and
       * the run has hit its numerical floor. */
      if (!floored && memory == 0 && !backtracking &&
          R2_new > (1.0 - std::sqrt(alpha * t)) * R2 * (1.0 + 5e-11))
        floored = true;

      if (floored) {
        out.status = SolveStatus::geometric_floor;
        break;  // state and trace stay at the last certified iteration
      }

      c = c_new;
      R2 = R2_new;
      x_plus = it.x_plus;
      F_cur = F_new;
      term = prox_grad_step_eval(prob, x_plus, t, cnt);
      anchor_t = t;
      out.trace.push_back({k, watch.seconds(), F_cur, relgap_of(F_cur, cfg.f_star),
                           term.it.gmap.lpNorm<Eigen::Infinity>(), t, R2, cnt});
      if (cfg.record_centers) out.centers.push_back(c);
      if (terminated(cfg, out.trace.back())) {
        out.status = SolveStatus::converged;
        break;
      }
    }
  }

  out.x = x_plus;
  out.f_value = F_cur;
  out.iterations = out.trace.back().iter;
  out.counters = cnt;
  return out;
}

}  // namespace detail

/* Fixed-step geometric solver; requires problem.beta and t0 in (0, 1/beta]. */
inline SolveResult geopg_run(const CompositeProblem& prob, SolverConfig cfg, const Vector& x0) {
  cfg.variant = Variant::geopg;
  return detail::geopg_engine(prob, cfg, x0, false, 0);
}

/* Backtracking geometric solver; beta-free. */
inline SolveResult geopg_b_run(const CompositeProblem& prob, SolverConfig cfg, const Vector& x0) {
  cfg.variant = Variant::geopg_b;
  return detail::geopg_engine(prob, cfg, x0, true, 0);
}

/* Limited-memory geometric solver (fixed step t = 1/beta). */
inline SolveResult lgeopg_run(const CompositeProblem& prob, SolverConfig cfg, const Vector& x0) {
  cfg.variant = Variant::lgeopg;
  if (cfg.memory < 1)
    throw std::invalid_argument("limited-memory variant requires memory >= 1");
  return detail::geopg_engine(prob, cfg, x0, false, cfg.memory);
}

/* Limited-memory geometric solver with backtracking. */
inline SolveResult lgeopg_b_run(const CompositeProblem& prob, SolverConfig cfg, const Vector& x0) {
  cfg.variant = Variant::lgeopg_b;
  if (cfg.memory < 1)
    throw std::invalid_argument("limited-memory variant requires memory >= 1");
  return detail::geopg_engine(prob, cfg, x0, true, cfg.memory);
}

/* Accelerated proximal gradient baseline for strongly convex composites, with
 * the same backtracking/growth schedule as the geometric solvers.  Momentum
 * follows the theta recursion
 *   theta_{k+1}^2 = (1 - theta_{k+1}) theta_k^2 + q_k theta_{k+1},
 *   q_k = alpha t_k,
 * with beta_k = theta_k (1 - theta_k) / (theta_k^2 + theta_{k+1}) applied to
 * the iterate difference.  The trace's gmap column reports the prox-gradient
 * map measured at the extrapolated point that produced each iterate. */
inline SolveResult apg_b_run(const CompositeProblem& problem_in, SolverConfig cfg,
                             const Vector& x0) {
  cfg.variant = Variant::apg_b;
  validate(cfg);
  CompositeProblem prob = problem_in;
  if (cfg.alpha > 0.0) prob.alpha = cfg.alpha;
  if (!(prob.alpha > 0.0))
    throw std::invalid_argument("solver: a positive strong-convexity modulus is required");
  const double alpha = prob.alpha;

  EvalCounters cnt;
  detail::StopWatch watch;
  SolveResult out;

  double t = cfg.t0;
  Vector y = x0, x_prev = x0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  bool last_backtracked = true;  // the first iteration starts exactly at t0

  StepEval probe0 = prox_grad_step_eval(prob, x0, t, cnt);
  double F_cur = prob.eval_F(x0, cnt);
  out.trace.push_back({0, watch.seconds(), F_cur, detail::relgap_of(F_cur, cfg.f_star),
                       probe0.it.gmap.lpNorm<Eigen::Infinity>(), t, {}, cnt});
  if (detail::terminated(cfg, out.trace.back())) {
    out.status = SolveStatus::converged;
  } else {
    for (long k = 1; k <= cfg.max_iter; ++k) {
      if (!last_backtracked) t = std::min(t / cfg.gamma, cfg.t_growth_cap * cfg.t0);
      last_backtracked = false;
      StepEval e;
      detail::DecreaseCheck dc{true, 0.0, 0.0};
      for (;;) {
        e = prox_grad_step_eval(prob, y, t, cnt);
        dc = detail::sufficient_decrease_check(prob, e, cnt);
        if (dc.holds) break;
        t *= cfg.eta;
        if (t < 1e-300) throw std::runtime_error("backtracking step underflow");
        last_backtracked = true;
      }
      const Vector& x_new = e.it.x_plus;
      double q = std::min(alpha * t, 1.0);
      if (std::isnan(theta)) theta = std::sqrt(q);
      double th2 = theta * theta;
      double theta_next = 0.5 * ((q - th2) + std::sqrt((th2 - q) * (th2 - q) + 4.0 * th2));
      double beta_mom = theta * (1.0 - theta) / (th2 + theta_next);
      y = x_new + beta_mom * (x_new - x_prev);
      x_prev = x_new;
      theta = theta_next;

      F_cur = dc.f_x_plus + prob.eval_h(x_new);
      out.trace.push_back({k, watch.seconds(), F_cur, detail::relgap_of(F_cur, cfg.f_star),
                           e.it.gmap.lpNorm<Eigen::Infinity>(), t, {}, cnt});
      if (detail::terminated(cfg, out.trace.back())) {
        out.status = SolveStatus::converged;
        break;
      }
    }
  }

  out.x = x_prev;
  out.f_value = F_cur;
  out.iterations = out.trace.back().iter;
  out.counters = cnt;
  return out;
}

inline SolveResult solve(const CompositeProblem& prob, const SolverConfig& cfg, const Vector& x0) {
  switch (cfg.variant) {
    case Variant::geopg: return geopg_run(prob, cfg, x0);
    case Variant::geopg_b: return geopg_b_run(prob, cfg, x0);
    case Variant::lgeopg: return lgeopg_run(prob, cfg, x0);
    case Variant::lgeopg_b: return lgeopg_b_run(prob, cfg, x0);
    case Variant::apg_b: return apg_b_run(prob, cfg, x0);
  }
  throw std::invalid_argument("unknown solver variant");
}

}  // namespace geopg

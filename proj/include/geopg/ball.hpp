#pragma once

#include <cmath>
#include <stdexcept>

#include "geopg/sparse.hpp"

namespace geopg {

/* Euclidean ball tracked by squared radius; r_sq <= 0 is used by the solvers
 * to signal an empty/converged localization set. */
struct Ball {
  Vector center;
  double r_sq = 0.0;
};

struct DisjointBallsError : std::runtime_error {
  DisjointBallsError() : std::runtime_error("disjoint balls") {}
};

namespace detail {

/* Exact farthest squared distance from the axis point at coordinate sigma
 * (measured from center A along the A->B axis) to the lens A cap B.  The two
 * spherical caps bounding the lens have axially linear squared-distance
 * profiles, so the maximum is attained at the shared rim or at an apex. */
struct LensAxis {
  double u;      // rim plane coordinate
  double rho_sq; // rim radius squared (clamped at 0)
  double apex_lo, apex_hi;
};

inline double lens_far_sq(const LensAxis& L, double sigma) {
  double rim = (sigma - L.u) * (sigma - L.u) + L.rho_sq;
  double lo = (sigma - L.apex_lo) * (sigma - L.apex_lo);
  double hi = (sigma - L.apex_hi) * (sigma - L.apex_hi);
  return std::max(rim, std::max(lo, hi));
}

// golden-section minimizer of the convex profile above; numerical fallback only
inline std::pair<double, double> lens_axis_minimax(const LensAxis& L, double tol = 1e-12) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = L.apex_lo, b = L.apex_hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = lens_far_sq(L, x1), f2 = lens_far_sq(L, x2);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = lens_far_sq(L, x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = lens_far_sq(L, x2);
    }
  }
  double s = 0.5 * (a + b);
  return {s, lens_far_sq(L, s)};
}

}  // namespace detail

/* Minimum enclosing ball of the intersection of two balls.  Cases, with d the
 * center distance and u = (d^2 + rA^2 - rB^2)/(2d) the rim coordinate:
 *   u <= 0 : the intersection contains a great sphere of A, answer is A;
 *   u >= d : symmetric, answer is B (covers nested balls as well);
 *   else   : the rim (radius^2 = rA^2 - u^2) dominates both apexes, answer is
 *            the rim-centered ball.
 * Intersections empty beyond a 1e-9 relative tolerance raise
 * DisjointBallsError.  Degenerate radii (r_sq = 0) are allowed. */
inline Ball min_enclosing_two_balls(const Ball& A, const Ball& B) {
  if (A.center.size() != B.center.size())
    throw std::invalid_argument("min_enclosing_two_balls: dimension mismatch");
  if (A.r_sq < 0.0 || B.r_sq < 0.0)
    throw std::invalid_argument("min_enclosing_two_balls: negative squared radius");
  const double rA = std::sqrt(A.r_sq), rB = std::sqrt(B.r_sq);
  const double d = (B.center - A.center).norm();
  if (d > rA + rB + 1e-9 * (rA + rB)) throw DisjointBallsError();
  if (d == 0.0) return A.r_sq <= B.r_sq ? A : B;
  const double u = (d * d + A.r_sq - B.r_sq) / (2.0 * d);
  if (u <= 0.0) return A;
  if (u >= d) return B;
  double r_sq = std::max(A.r_sq - u * u, 0.0);
  if (!std::isfinite(r_sq)) {  // defensive: solve the axial minimax numerically
    detail::LensAxis L{u, 0.0, std::max(-rA, d - rB), std::min(rA, d + rB)};
    L.rho_sq = std::max(A.r_sq - u * u, 0.0);
    auto [s, fs] = detail::lens_axis_minimax(L);
    return {A.center + (s / d) * (B.center - A.center), fs};
  }
  return {A.center + (u / d) * (B.center - A.center), r_sq};
}

}  // namespace geopg

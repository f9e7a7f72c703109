#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "geopg/elastic_net.hpp"
#include "geopg/rootfind.hpp"
#include "geopg/synthetic.hpp"

using namespace geopg;

namespace {

// f(z) = 1/2 ||z||^2, h == 0; prox-gradient step contracts toward the origin
CompositeProblem ball_problem() {
  CompositeProblem p;
  p.f_eval = [](const Vector& x, EvalCounters&) { return 0.5 * x.squaredNorm(); };
  p.grad_f = [](const Vector& x, EvalCounters&) { return x; };
  p.hess_vec = [](const Vector&, const Vector& v, EvalCounters&) { return v; };
  p.h_eval = [](const Vector&) { return 0.0; };
  p.prox_h = [](const Vector& v, double, EvalCounters&) { return v; };
  p.prox_jvp = [](const Vector&, double, const Vector& dir) { return dir; };
  p.alpha = 1.0;
  p.beta = 1.0;
  return p;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector rand_vec(Rng& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

double bisect_root(const LineProbe& pr, double lo, double hi, EvalCounters& c) {
  double flo = phi_bar(pr, lo, c);
  for (int i = 0; i < 90; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = phi_bar(pr, mid, c);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct EnProbe {
  std::shared_ptr<const SparseDesign> design;
  CompositeProblem prob;
  double beta;
};

EnProbe en_fixture(std::uint64_t seed, double alpha = 0.1, double mu = 0.2) {
  EnProbe f;
  SyntheticData s = gen_synthetic_ls(40, 25, seed);
  f.design = std::make_shared<const SparseDesign>(std::move(s.design));
  f.prob = make_elastic_net_ls(f.design, alpha, mu);
  f.beta = smooth_lipschitz_ls(*f.design, alpha);
  return f;
}

}  // namespace

TEST_CASE("line profile values on a quadratic") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  LineProbe pr{p, vec2(1, 0), vec2(0, 1), 0.5};
  // z(s) = (1-s, s), z+ = z/2, so phi(s) = 0.5*(2s-1)
  REQUIRE(phi_bar(pr, 0.0, c) == Catch::Approx(-0.5).margin(1e-14));
  REQUIRE(phi_bar(pr, 0.5, c) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(phi_bar(pr, 1.0, c) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("line profile gap and Lipschitz bounds") {
  EnProbe f = en_fixture(201);
  Rng rng(202);
  EvalCounters c;
  for (int rep = 0; rep < 60; ++rep) {
    double t = (0.2 + 0.8 * rng.uniform01()) / f.beta;
    Vector x = rand_vec(rng, 25, 2.0), cc = rand_vec(rng, 25, 2.0);
    LineProbe pr{f.prob, x, cc, t};
    if (!pr.valid()) continue;
    double s1 = 1.5 * rng.uniform01(), s2 = 1.5 * rng.uniform01();
    if (s1 > s2) std::swap(s1, s2);
    double p1 = phi_bar(pr, s1, c), p2 = phi_bar(pr, s2, c);
    double dist_sq = (x - cc).squaredNorm();
    double gap = 0.5 * f.prob.alpha * t * (s2 - s1) * dist_sq;
    REQUIRE(p2 - p1 >= gap - 1e-9 * (1.0 + std::abs(gap)));
    double lip = (2.0 + t * f.beta) * dist_sq * (s2 - s1);
    REQUIRE(std::abs(p2 - p1) <= lip * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("bracketed search finds the interior root") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  LineProbe pr{p, vec2(1, 0), vec2(0, 1), 0.5};
  RootResult r = find_xk_brent(pr, c);
  REQUIRE(r.s == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(r.eval.it.x[0] == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(r.eval.it.x[1] == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(std::abs(r.phi) <= 1e-10 * detail::root_scale(pr));
  REQUIRE_FALSE(r.fallback);
  REQUIRE(r.iterations >= 2);
}

TEST_CASE("search keeps the endpoint when the profile does not change sign") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  // phi(0) = -t<x, x-c> >= 0: previous point already fine
  LineProbe left{p, vec2(1, 0), vec2(3, 0), 0.5};
  RootResult r0 = find_xk_brent(left, c);
  REQUIRE(r0.s == 0.0);
  REQUIRE((r0.eval.it.x.array() == left.x.array()).all());
  REQUIRE(r0.phi >= 0.0);
  // phi(1) <= 0: bracketed variant stops at the center
  LineProbe right{p, vec2(3, 0), vec2(1, 0), 0.5};
  RootResult r1 = find_xk_brent(right, c);
  REQUIRE(r1.s == 1.0);
  REQUIRE((r1.eval.it.x.array() == right.c.array()).all());
  REQUIRE(r1.phi <= 0.0);
}

TEST_CASE("newton search continues past the center") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  // root sits at s = 1.5, beyond the bracketed variant's reach
  LineProbe pr{p, vec2(3, 0), vec2(1, 0), 0.5};
  RootResult r = find_xk_ssn(pr, c);
  REQUIRE(r.s == Catch::Approx(1.5).margin(1e-9));
  REQUIRE(r.eval.it.x.norm() <= 1e-9);
  REQUIRE_FALSE(r.fallback);
}

TEST_CASE("newton search on the interior root uses few evaluations") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  LineProbe pr{p, vec2(1, 0), vec2(0, 1), 0.5};
  RootResult r = find_xk_ssn(pr, c);
  REQUIRE(r.s == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(r.iterations <= 10);
  REQUIRE_FALSE(r.fallback);
}

TEST_CASE("one dimensional elastic net root against bisection") {
  Matrix A(1, 1);
  A << 1;
  Vector b(1);
  b << 2;
  auto d = std::make_shared<const SparseDesign>(from_dense(A, b));
  CompositeProblem p = make_elastic_net_ls(d, 0.5, 0.25);
  EvalCounters c;
  Vector x(1), cc(1);
  x << 0;
  cc << 3;
  LineProbe pr{p, x, cc, 0.5};
  // piecewise-linear profile: phi(s) = 6.75 s - 2.625
  double s_star = 2.625 / 6.75;
  REQUIRE(phi_bar(pr, 0.0, c) == Catch::Approx(-2.625).margin(1e-12));
  REQUIRE(phi_bar(pr, 1.0, c) == Catch::Approx(4.125).margin(1e-12));
  double s_bisect = bisect_root(pr, 0.0, 1.0, c);
  REQUIRE(s_bisect == Catch::Approx(s_star).margin(1e-12));
  RootResult rb = find_xk_brent(pr, c);
  RootResult rn = find_xk_ssn(pr, c);
  REQUIRE(rb.s == Catch::Approx(s_star).margin(1e-9));
  REQUIRE(rn.s == Catch::Approx(s_star).margin(1e-9));
}

TEST_CASE("bracketed and newton searches agree on random probes") {
  EnProbe f = en_fixture(203);
  Rng rng(204);
  EvalCounters c;
  int compared = 0;
  for (int rep = 0; rep < 60; ++rep) {
    double t = (0.3 + 0.7 * rng.uniform01()) / f.beta;
    Vector x = rand_vec(rng, 25, 2.0), cc = rand_vec(rng, 25, 2.0);
    LineProbe pr{f.prob, x, cc, t};
    if (!pr.valid()) continue;
    if (!(phi_bar(pr, 0.0, c) < 0.0 && phi_bar(pr, 1.0, c) > 0.0)) continue;
    RootResult rb = find_xk_brent(pr, c);
    RootResult rn = find_xk_ssn(pr, c);
    REQUIRE(std::abs(rb.s - rn.s) <= 1e-7 * (1.0 + std::abs(rb.s)));
    ++compared;
  }
  REQUIRE(compared > 2);
}

TEST_CASE("accepted points satisfy the orthogonality conditions") {
  EnProbe f = en_fixture(205);
  Rng rng(206);
  EvalCounters c;
  for (int rep = 0; rep < 40; ++rep) {
    double t = (0.2 + 0.8 * rng.uniform01()) / f.beta;
    Vector x = rand_vec(rng, 25, 2.0), cc = rand_vec(rng, 25, 2.0);
    LineProbe pr{f.prob, x, cc, t};
    if (!pr.valid()) continue;
    RootResult r = rep % 2 == 0 ? find_xk_brent(pr, c) : find_xk_ssn(pr, c);
    const Vector& xk = r.eval.it.x;
    Vector delta = r.eval.it.x_plus - xk;
    double slack = 1e-8 * (1.0 + detail::root_scale(pr)) * (1.0 + r.s);
    REQUIRE(delta.dot(pr.x - xk) <= slack);
    REQUIRE(delta.dot(xk - pr.c) >= -slack);
  }
}

TEST_CASE("precomputed anchors are reused without changing the answer") {
  EnProbe f = en_fixture(207);
  Rng rng(208);
  for (int rep = 0; rep < 10; ++rep) {
    double t = 0.7 / f.beta;
    Vector x = rand_vec(rng, 25, 2.0), cc = rand_vec(rng, 25, 2.0);
    LineProbe pr{f.prob, x, cc, t};
    if (!pr.valid()) continue;
    EvalCounters c_plain, c_anchor, scratch;
    StepEval anchor = prox_grad_step_eval(f.prob, x, t, scratch);
    RootResult plain = find_xk_ssn(pr, c_plain);
    RootResult reused = find_xk_ssn(pr, c_anchor, 1e-10, &anchor);
    REQUIRE(plain.s == reused.s);
    REQUIRE((plain.eval.it.x_plus.array() == reused.eval.it.x_plus.array()).all());
    REQUIRE(c_anchor.g_ev + 1 == c_plain.g_ev);
    REQUIRE(c_anchor.p_ev + 1 == c_plain.p_ev);
  }
}

TEST_CASE("anchor satisfied at the start costs no evaluations") {
  CompositeProblem p = ball_problem();
  EvalCounters scratch, c;
  Vector x = vec2(1, 0), cc = vec2(3, 0);
  StepEval anchor = prox_grad_step_eval(p, x, 0.5, scratch);
  LineProbe pr{p, x, cc, 0.5};
  RootResult r = find_xk_ssn(pr, c, 1e-10, &anchor);
  REQUIRE(r.s == 0.0);
  REQUIRE(r.iterations == 0);
  REQUIRE(c.g_ev == 0);
  REQUIRE(c.p_ev == 0);
}

TEST_CASE("newton search falls back to bracketing without curvature") {
  Matrix A(1, 1);
  A << 1;
  Vector b(1);
  b << 2;
  auto d = std::make_shared<const SparseDesign>(from_dense(A, b));
  CompositeProblem p = make_elastic_net_ls(d, 0.5, 0.25);
  p.hess_vec = nullptr;
  p.prox_jvp = nullptr;
  EvalCounters c;
  Vector x(1), cc(1);
  x << 0;
  cc << 3;
  LineProbe pr{p, x, cc, 0.5};
  RootResult r = find_xk_ssn(pr, c);
  REQUIRE(r.fallback);
  REQUIRE(r.s == Catch::Approx(2.625 / 6.75).margin(1e-9));
}

TEST_CASE("degenerate probes are rejected") {
  CompositeProblem p = ball_problem();
  EvalCounters c;
  Vector x = vec2(1, 1);
  LineProbe pr{p, x, x, 0.5};
  REQUIRE_FALSE(pr.valid());
  REQUIRE_THROWS_AS(find_xk_brent(pr, c), std::invalid_argument);
  REQUIRE_THROWS_AS(find_xk_ssn(pr, c), std::invalid_argument);
}

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geopg/elastic_net.hpp"
#include "geopg/solver.hpp"

namespace geopg {

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader =
    "iter,time_s,F,rel_gap,gmap_inf,t_k,Rk_sq,f_ev,g_ev,p_ev,mvm";

inline void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& os) {
  os << kTraceCsvHeader << '\n';
  for (const TraceRecord& r : trace) {
    os << r.iter << ',' << detail::fmt_g17(r.time_s) << ',' << detail::fmt_g17(r.f_value) << ',';
    if (r.rel_gap) os << detail::fmt_g17(*r.rel_gap);
    os << ',' << detail::fmt_g17(r.gmap_inf) << ',' << detail::fmt_g17(r.t_k) << ',';
    if (r.r_sq) os << detail::fmt_g17(*r.r_sq);
    os << ',' << r.counters.f_ev << ',' << r.counters.g_ev << ',' << r.counters.p_ev << ','
       << r.counters.mvm << '\n';
  }
}

inline std::vector<TraceRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trace csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader) throw std::runtime_error("trace csv: unexpected header '" + line + "'");
  std::vector<TraceRecord> out;
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 11)
      throw std::runtime_error("trace csv: wrong field count at line " + std::to_string(lineno));
    TraceRecord r;
    r.iter = std::stol(f[0]);
    r.time_s = std::stod(f[1]);
    r.f_value = std::stod(f[2]);
    if (!f[3].empty()) r.rel_gap = std::stod(f[3]);
    r.gmap_inf = std::stod(f[4]);
    if (!f[5].empty()) r.t_k = std::stod(f[5]);
    if (!f[6].empty()) r.r_sq = std::stod(f[6]);
    r.counters.f_ev = std::stoull(f[7]);
    r.counters.g_ev = std::stoull(f[8]);
    r.counters.p_ev = std::stoull(f[9]);
    r.counters.mvm = std::stoull(f[10]);
    out.push_back(std::move(r));
  }
  return out;
}

struct ReferenceResult {
  double f_star = 0.0;
  Vector x_star;
  bool converged = false;  // false: budget exhausted before the gradmap floor, values best-effort
};

/* High-accuracy reference optimum: run the backtracking geometric solver and
 * the accelerated baseline to a 1e-13 gradient-map floor and keep the smaller
 * objective. */
inline ReferenceResult compute_reference_fstar(const CompositeProblem& prob, const Vector& x0,
                                               long budget = 100000, double gradmap_tol = 1e-13) {
  SolverConfig cfg;
  cfg.termination = Termination::gradmap_inf;
  cfg.tol = gradmap_tol;
  cfg.max_iter = budget;
  SolveResult a = geopg_b_run(prob, cfg, x0);
  SolveResult b = apg_b_run(prob, cfg, x0);
  ReferenceResult ref;
  if (a.f_value <= b.f_value) {
    ref.f_star = a.f_value;
    ref.x_star = a.x;
  } else {
    ref.f_star = b.f_value;
    ref.x_star = b.x;
  }
  ref.converged =
      a.status != SolveStatus::max_iter || b.status != SolveStatus::max_iter;
  return ref;
}

struct ExperimentSpec {
  std::string problem = "ls";  // "ls" | "logistic"
  std::shared_ptr<const SparseDesign> design;
  double alpha = 1e-8;
  std::vector<double> mus;           // absolute regularization weights, one cell per value
  std::vector<std::string> solvers;  // variant names, first entry is the f-diff baseline
  SolverConfig base;
  std::map<std::string, SolverConfig> overrides;  // per-solver config replacing base
  std::string out_dir = "bench_out";
};

struct RunOutcome {
  std::string solver;
  double mu = 0.0;
  SolveResult result;
  std::string csv_path;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  std::map<double, ReferenceResult> references;  // per mu, when relgap termination is active
  bool reference_warning = false;
  bool rate_ok = true;
  std::string summary_path;
  std::string rate_report_path;
};

namespace detail {

inline void check_rate(const RunOutcome& run, double alpha_eff, std::ostream& report,
                       bool asserted, bool& ok) {
  const auto& tr = run.result.trace;
  long checked = 0, violations = 0;
  double worst = 0.0;  // largest relative excess over the certified factor
  for (size_t k = 1; k < tr.size(); ++k) {
    if (!tr[k].r_sq || !tr[k - 1].r_sq) continue;
    double factor = 1.0 - std::sqrt(alpha_eff * tr[k].t_k);
    double bound = factor * *tr[k - 1].r_sq * (1.0 + 1e-10);
    ++checked;
    if (*tr[k].r_sq > bound) {
      ++violations;
      if (*tr[k - 1].r_sq > 0.0)
        worst = std::max(worst, (*tr[k].r_sq - bound) / *tr[k - 1].r_sq);
    }
  }
  report << (asserted ? "assert" : "report") << " solver=" << run.solver
         << " mu=" << fmt_g6(run.mu) << " iters=" << run.result.iterations
         << " checked=" << checked << " violations=" << violations;
  if (violations > 0) report << " worst_excess=" << fmt_g17(worst);
  report << '\n';
  if (asserted && violations > 0) ok = false;
}

}  // namespace detail

/* Execute every (solver, mu) cell of the experiment: construct the elastic-net
 * problem, compute the reference optimum when relgap termination asks for one,
 * run the solvers, and write one trace CSV per cell plus summary.txt and
 * rate_report.txt into spec.out_dir. */
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (!spec.design) throw std::invalid_argument("experiment: design data is required");
  if (spec.solvers.empty()) throw std::invalid_argument("experiment: at least one solver");
  if (spec.mus.empty()) throw std::invalid_argument("experiment: at least one mu");
  if (spec.problem != "ls" && spec.problem != "logistic")
    throw std::invalid_argument("experiment: unknown problem kind '" + spec.problem + "'");

  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);

  const SparseDesign& d = *spec.design;
  const double beta = spec.problem == "ls" ? smooth_lipschitz_ls(d, spec.alpha)
                                           : smooth_lipschitz_logistic(d, spec.alpha);
  const Vector x0 = Vector::Zero(d.n);

  ExperimentResult out;
  std::ostringstream summary;
  summary << "problem=" << spec.problem << " p=" << d.p << " n=" << d.n
          << " alpha=" << detail::fmt_g6(spec.alpha) << " beta=" << detail::fmt_g6(beta) << '\n';
  summary << "eta=" << detail::fmt_g6(spec.base.eta) << " gamma=" << detail::fmt_g6(spec.base.gamma)
          << " tol=" << detail::fmt_g6(spec.base.tol) << " t0=" << detail::fmt_g6(spec.base.t0)
          << " memory=" << spec.base.memory << " criterion="
          << (spec.base.termination == Termination::relgap ? "relgap" : "gradmap") << " rootfinder="
          << (spec.base.rootfinder == RootFinderKind::brent ? "brent" : "ssn") << '\n';
  summary << "f-diff column: |F - F(" << spec.solvers.front() << ")| per mu\n";

  std::ostringstream rate;
  rate << "per-iteration radius contraction vs factor (1 - sqrt(alpha*t_k)), slack 1+1e-10\n";
  rate << "asserted for geopg and geopg-b; limited-memory runs are reported only\n";

  for (double mu : spec.mus) {
    CompositeProblem prob = spec.problem == "ls"
                                ? make_elastic_net_ls(spec.design, spec.alpha, mu)
                                : make_elastic_net_logistic(spec.design, spec.alpha, mu);
    prob.beta = beta;

    std::optional<double> f_star;
    if (spec.base.termination == Termination::relgap) {
      ReferenceResult ref =
          compute_reference_fstar(prob, x0, std::max<long>(spec.base.max_iter, 100000));
      if (!ref.converged) out.reference_warning = true;
      f_star = ref.f_star;
      out.references.emplace(mu, std::move(ref));
    }

    summary << "\nmu=" << detail::fmt_g6(mu);
    if (f_star) {
      summary << " F*=" << detail::fmt_g17(*f_star);
      if (out.references.at(mu).converged == false) summary << " (reference budget exhausted)";
    }
    summary << '\n';
    summary << "solver        status                     iter      cpu_s      f-ev      g-ev      "
               "p-ev       MVM                        F     f-diff\n";

    double f_base = 0.0;
    for (size_t si = 0; si < spec.solvers.size(); ++si) {
      const std::string& name = spec.solvers[si];
      SolverConfig cfg = spec.base;
      auto ov = spec.overrides.find(name);
      if (ov != spec.overrides.end()) cfg = ov->second;
      cfg.variant = parse_variant(name);
      cfg.f_star = f_star;
      if (cfg.variant == Variant::geopg || cfg.variant == Variant::lgeopg) cfg.t0 = 1.0 / beta;

      RunOutcome run;
      run.solver = name;
      run.mu = mu;
      run.result = solve(prob, cfg, x0);

      std::string fname = name + "_mu" + detail::fmt_g6(mu) + ".csv";
      fs::path path = fs::path(spec.out_dir) / fname;
      std::ofstream csv(path);
      if (!csv) throw std::runtime_error("experiment: cannot write " + path.string());
      write_trace_csv(run.result.trace, csv);
      if (!csv.good()) throw std::runtime_error("experiment: write failed for " + path.string());
      run.csv_path = path.string();

      if (si == 0) f_base = run.result.f_value;
      char row[256];
      std::snprintf(row, sizeof row,
                    "%-13s %-25s %6ld %10.3f %9llu %9llu %9llu %9llu %24.16e %10.3e\n",
                    name.c_str(), to_string(run.result.status), run.result.iterations,
                    run.result.trace.back().time_s,
                    (unsigned long long)run.result.counters.f_ev,
                    (unsigned long long)run.result.counters.g_ev,
                    (unsigned long long)run.result.counters.p_ev,
                    (unsigned long long)run.result.counters.mvm, run.result.f_value,
                    std::abs(run.result.f_value - f_base));
      summary << row;

      if (cfg.variant != Variant::apg_b) {
        double alpha_eff = cfg.alpha > 0.0 ? cfg.alpha : prob.alpha;
        bool asserted = cfg.variant == Variant::geopg || cfg.variant == Variant::geopg_b;
        detail::check_rate(run, alpha_eff, rate, asserted, out.rate_ok);
      }
      out.runs.push_back(std::move(run));
    }
  }

  rate << (out.rate_ok ? "RATE OK\n" : "RATE FAIL\n");

  fs::path spath = fs::path(spec.out_dir) / "summary.txt";
  std::ofstream sf(spath);
  if (!sf) throw std::runtime_error("experiment: cannot write " + spath.string());
  sf << summary.str();
  out.summary_path = spath.string();

  fs::path rpath = fs::path(spec.out_dir) / "rate_report.txt";
  std::ofstream rf(rpath);
  if (!rf) throw std::runtime_error("experiment: cannot write " + rpath.string());
  rf << rate.str();
  out.rate_report_path = rpath.string();

  return out;
}

}  // namespace geopg

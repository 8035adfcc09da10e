#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dmlpg/assembly.hpp"
#include "dmlpg/config.hpp"
#include "dmlpg/errors.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/problems.hpp"
#include "dmlpg/studies.hpp"
#include "dmlpg/time_stepping.hpp"

namespace dmlpg {

/// Probe values are compared with the series only after this time.
inline constexpr double series_comparison_start = 0.4;

struct Timings {
  std::vector<std::pair<std::string, double>> phases;
  void add(std::string name, double seconds) { phases.emplace_back(std::move(name), seconds); }
};

struct ErrorRow {
  double h = 0.0;
  double max_err = 0.0;
  double rms_err = 0.0;
  std::optional<double> order;
};

struct RunOutput {
  SolveResult result;
  std::vector<double> times;                    ///< output times actually reported
  std::vector<Eigen::VectorXd> probe_values;    ///< one vector per output time
  std::optional<NodalError> error;              ///< against the exact solution or the series
  Timings timings;
};

namespace detail {

inline std::string g17(double v) { return format_double(v); }

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot open '" + p.string() + "' for writing");
  return os;
}

/// Index of the stored state at time t (fixed-step trajectories store every step).
inline std::size_t state_index(const Trajectory& tr, double t) {
  const auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t - 1e-9 * std::max(1.0, t));
  if (it == tr.times.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, t)) {
    throw Error("no stored state at t = " + g17(t));
  }
  return static_cast<std::size_t>(it - tr.times.begin());
}

inline std::optional<NodalError> reference_error(const RunConfig& cfg, const HeatProblem& prob, const SolveResult& run,
                                                 const std::vector<double>& times,
                                                 const std::vector<Eigen::VectorXd>& probes) {
  const auto& tr = run.trajectory;
  if (prob.has_exact()) return nodal_error(run.nodes, tr.final_state(), prob.exact, tr.final_time());
  if (cfg.problem != ProblemKind::Fgm || cfg.fgm.gamma != 0.0) return std::nullopt;
  const auto pts = cfg.probes();
  NodalError e;
  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < series_comparison_start) continue;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d = std::abs(probes[i][static_cast<Eigen::Index>(j)] - fgm_series_solution(cfg.fgm, pts[j].x(), times[i]));
      e.max = std::max(e.max, d);
      sq += d * d;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  e.rms = std::sqrt(sq / static_cast<double>(n));
  return e;
}

}  // namespace detail

/// Solves the configured problem at spacing h and evaluates probes and reference errors.
inline RunOutput execute(const RunConfig& cfg, double h) {
  using clock = std::chrono::steady_clock;
  const HeatProblem prob = cfg.heat_problem();
  const TimeScheme scheme = cfg.time_scheme();
  Timings timings;

  auto t0 = clock::now();
  NodeSet nodes = make_regular_grid(prob.domain, h);
  timings.add("grid", detail::seconds_since(t0));

  SemiDiscreteSystem sys = assemble(prob, nodes, cfg.discretization());
  timings.add("stencils", sys.timings.stencils);
  timings.add("functionals", sys.timings.functionals);
  timings.add("coefficients", sys.timings.coefficients);
  timings.add("assembly", sys.timings.total);

  std::vector<double> mol_times;
  if (!scheme.fixed_step()) {
    mol_times.push_back(0.0);
    for (double t : cfg.output_times) {
      if (t > mol_times.back()) mol_times.push_back(t);
    }
    if (mol_times.back() < prob.final_time) mol_times.push_back(prob.final_time);
  }
  Trajectory tr = integrate(sys, scheme, prob.final_time, mol_times);
  timings.add("solve", tr.seconds);

  t0 = clock::now();
  const auto pts = cfg.probes();
  const WeightConfig wc = cfg.discretization().weights(h);
  std::vector<double> times;
  std::vector<Eigen::VectorXd> probe_values;
  for (double t : cfg.output_times) {
    const std::size_t i = detail::state_index(tr, t);
    times.push_back(t);
    probe_values.push_back(pts.empty() ? Eigen::VectorXd() : postprocess(nodes, tr.states[i], pts, cfg.degree, wc));
  }
  timings.add("postprocess", detail::seconds_since(t0));

  const double assembly = sys.timings.total, solve = tr.seconds;
  SolveResult result{std::move(nodes), std::move(sys), std::move(tr), assembly, solve};
  auto error = detail::reference_error(cfg, prob, result, times, probe_values);
  return RunOutput{std::move(result), std::move(times), std::move(probe_values), error, std::move(timings)};
}

inline void write_solution_csv(std::ostream& os, const RunConfig& cfg, const RunOutput& run) {
  os << "t,x1,x2,u\n";
  const auto pts = cfg.probes();
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      os << detail::g17(run.times[i]) << ',' << detail::g17(pts[j].x()) << ',' << detail::g17(pts[j].y()) << ','
         << detail::g17(run.probe_values[i][static_cast<Eigen::Index>(j)]) << '\n';
    }
  }
  const auto& tr = run.result.trajectory;
  const auto& nodes = run.result.nodes;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    os << detail::g17(tr.final_time()) << ',' << detail::g17(nodes.point(k).x()) << ','
       << detail::g17(nodes.point(k).y()) << ',' << detail::g17(tr.final_state()[static_cast<Eigen::Index>(k)]) << '\n';
  }
}

inline void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "h,max_err,rms_err,order\n";
  for (const auto& r : rows) {
    os << detail::g17(r.h) << ',' << detail::g17(r.max_err) << ',' << detail::g17(r.rms_err) << ','
       << (r.order ? detail::g17(*r.order) : std::string()) << '\n';
  }
}

inline void write_timings_csv(std::ostream& os, const Timings& t) {
  os << "phase,seconds\n";
  for (const auto& [name, s] : t.phases) os << name << ',' << detail::g17(s) << '\n';
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg) {
  auto os = detail::open_output(dir / "manifest.cfg");
  os << to_config_text(cfg);
}

/// `solve`: one run, writing solution.csv, errors.csv (when a reference exists), timings.csv and manifest.cfg.
inline RunOutput run_solve(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunOutput run = execute(cfg, cfg.spacing());
  {
    auto os = detail::open_output(dir / "solution.csv");
    write_solution_csv(os, cfg, run);
  }
  if (run.error) {
    auto os = detail::open_output(dir / "errors.csv");
    write_errors_csv(os, {{cfg.spacing(), run.error->max, run.error->rms, std::nullopt}});
  }
  {
    auto os = detail::open_output(dir / "timings.csv");
    write_timings_csv(os, run.timings);
  }
  write_manifest(dir, cfg);
  return run;
}

/// `study convergence`: one run per entry of h_list; orders between consecutive spacings.
inline std::vector<ErrorRow> run_convergence(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<ErrorRow> rows;
  Timings timings;
  for (double h : cfg.h_list) {
    const RunOutput run = execute(cfg, h);
    if (!run.error) throw NotApplicable("no exact or series reference for problem '" + to_string(cfg.problem) + "'");
    ErrorRow row{h, run.error->max, run.error->rms, std::nullopt};
    if (!rows.empty()) row.order = observed_order(rows.back().max_err, row.max_err, rows.back().h, h);
    rows.push_back(row);
    for (const auto& [name, s] : run.timings.phases) timings.add("h=" + detail::g17(h) + "/" + name, s);
  }
  {
    auto os = detail::open_output(dir / "errors.csv");
    write_errors_csv(os, rows);
  }
  {
    auto os = detail::open_output(dir / "timings.csv");
    write_timings_csv(os, timings);
  }
  write_manifest(dir, cfg);
  return rows;
}

/// `study timing`: minimum wall time per phase over `repeats` runs for each spacing.
inline std::vector<TimingRow> run_timing(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto rows = timing_study(cfg.heat_problem(), cfg.discretization(), cfg.h_list, cfg.time_scheme(),
                                 static_cast<std::size_t>(cfg.repeats));
  Timings t;
  for (const auto& r : rows) {
    const std::string p = "h=" + detail::g17(r.h) + "/";
    t.add(p + "stencils", r.stencils);
    t.add(p + "functionals", r.functionals);
    t.add(p + "coefficients", r.coefficients);
    t.add(p + "assembly", r.assembly);
    t.add(p + "solve", r.solve);
  }
  {
    auto os = detail::open_output(dir / "timings.csv");
    write_timings_csv(os, t);
  }
  write_manifest(dir, cfg);
  return rows;
}

}  // namespace dmlpg

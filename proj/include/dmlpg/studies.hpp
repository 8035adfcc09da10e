#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "dmlpg/assembly.hpp"
#include "dmlpg/errors.hpp"
#include "dmlpg/heat_problem.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/problems.hpp"
#include "dmlpg/time_stepping.hpp"

namespace dmlpg {

struct SolveResult {
  NodeSet nodes;
  SemiDiscreteSystem system;
  Trajectory trajectory;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Builds the regular grid of spacing h, assembles and integrates up to the problem's final time.
inline SolveResult solve_problem(const HeatProblem& prob, double h, const DiscretizationConfig& disc,
                                 const TimeScheme& scheme, const std::vector<double>& output_times = {}) {
  NodeSet nodes = make_regular_grid(prob.domain, h);
  SemiDiscreteSystem sys = assemble(prob, nodes, disc);
  const double assembly = sys.timings.total;
  Trajectory tr = integrate(sys, scheme, prob.final_time, output_times);
  const double solve = tr.seconds;
  return {std::move(nodes), std::move(sys), std::move(tr), assembly, solve};
}

struct ErrorReport {
  std::vector<double> h;
  std::vector<double> max_error;
  std::vector<double> rms_error;
  std::vector<double> order;  ///< order[i] compares runs i-1 and i; NaN for the first run
  std::vector<std::vector<double>> sample_times;
  std::vector<std::vector<double>> sample_max_error;  ///< max nodal error at every stored time, per run

  double min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < order.size(); ++i) m = std::min(m, order[i]);
    return m;
  }
};

/// Runs the solver on each spacing and fits orders from the max nodal error at the final time.
inline ErrorReport convergence_study(const HeatProblem& prob, const DiscretizationConfig& disc,
                                     const std::vector<double>& h_list, const TimeScheme& scheme) {
  if (!prob.has_exact()) throw NotApplicable("convergence study needs an exact solution");
  if (h_list.empty()) throw InvalidArgument("empty spacing list");
  ErrorReport rep;
  for (double h : h_list) {
    const SolveResult run = solve_problem(prob, h, disc, scheme);
    const auto& tr = run.trajectory;
    const NodalError e = nodal_error(run.nodes, tr.final_state(), prob.exact, tr.final_time());
    rep.h.push_back(h);
    rep.max_error.push_back(e.max);
    rep.rms_error.push_back(e.rms);
    rep.order.push_back(rep.h.size() == 1 ? std::numeric_limits<double>::quiet_NaN()
                                          : observed_order(rep.max_error[rep.h.size() - 2], e.max,
                                                           rep.h[rep.h.size() - 2], h));
    std::vector<double> times, errs;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      times.push_back(tr.times[i]);
      errs.push_back(nodal_error(run.nodes, tr.states[i], prob.exact, tr.times[i]).max);
    }
    rep.sample_times.push_back(std::move(times));
    rep.sample_max_error.push_back(std::move(errs));
  }
  return rep;
}

/// Temporal self-convergence at fixed h: differences between successive halvings of dt.
struct TimeConvergence {
  std::vector<double> dt;
  std::vector<double> difference;  ///< max |u_dt - u_dt/2| at the final time, one fewer entry than dt
  std::vector<double> order;       ///< one fewer entry than difference
};

inline TimeConvergence time_self_convergence(const HeatProblem& prob, double h, const DiscretizationConfig& disc,
                                             const std::vector<double>& dt_list, double theta = 0.5) {
  if (dt_list.size() < 3) throw InvalidArgument("time self-convergence needs at least three step sizes");
  const NodeSet nodes = make_regular_grid(prob.domain, h);
  const SemiDiscreteSystem sys = assemble(prob, nodes, disc);
  TimeConvergence out;
  out.dt = dt_list;
  std::vector<Eigen::VectorXd> finals;
  for (double dt : dt_list) finals.push_back(step_theta(sys, dt, theta, prob.final_time).final_state());
  for (std::size_t i = 1; i < finals.size(); ++i) {
    out.difference.push_back((finals[i] - finals[i - 1]).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < out.difference.size(); ++i) {
    out.order.push_back(observed_order(out.difference[i - 1], out.difference[i], dt_list[i - 1], dt_list[i]));
  }
  return out;
}

struct TimingRow {
  double h = 0.0;
  std::size_t nodes = 0;
  double stencils = 0.0;
  double functionals = 0.0;
  double coefficients = 0.0;
  double assembly = 0.0;
  double solve = 0.0;
  std::size_t factorizations = 0;
};

/// Wall times per spacing; each phase is the minimum over `repeats` identical runs.
inline std::vector<TimingRow> timing_study(const HeatProblem& prob, const DiscretizationConfig& disc,
                                           const std::vector<double>& h_list, const TimeScheme& scheme,
                                           std::size_t repeats = 3) {
  if (repeats < 1) throw InvalidArgument("timing study needs at least one repetition");
  std::vector<TimingRow> rows;
  for (double h : h_list) {
    const NodeSet nodes = make_regular_grid(prob.domain, h);
    TimingRow row;
    row.h = h;
    row.nodes = nodes.size();
    row.assembly = row.solve = row.stencils = row.functionals = row.coefficients =
        std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < repeats; ++r) {
      const SemiDiscreteSystem sys = assemble(prob, nodes, disc);
      const Trajectory tr = integrate(sys, scheme, prob.final_time);
      row.assembly = std::min(row.assembly, sys.timings.total);
      row.stencils = std::min(row.stencils, sys.timings.stencils);
      row.functionals = std::min(row.functionals, sys.timings.functionals);
      row.coefficients = std::min(row.coefficients, sys.timings.coefficients);
      row.solve = std::min(row.solve, tr.seconds);
      row.factorizations = tr.factorizations;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dmlpg

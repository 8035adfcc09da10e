#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"
#include "dmlpg/heat_problem.hpp"
#include "dmlpg/node_set.hpp"

namespace dmlpg {

inline constexpr double pi = std::numbers::pi;

/// Unit square, Neumann on x2 = 0 and x2 = 1, Dirichlet on x1 = 0 and x1 = 1 (sides in Bottom, Right, Top, Left order).
inline DomainSpec unit_square_mixed() {
  return DomainSpec{0.0, 1.0, 0.0, 1.0,
                    {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet, BoundaryCondition::Neumann,
                     BoundaryCondition::Dirichlet}};
}

/// rho c = 2 pi^2, kappa = 1, f = 0, exact u = exp(-t) cos(pi x1) cos(pi x2) on [0, 1].
inline HeatProblem test_problem() {
  HeatProblem p;
  p.name = "test";
  p.domain = unit_square_mixed();
  auto exact = [](const Point& x, double t) { return std::exp(-t) * std::cos(pi * x.x()) * std::cos(pi * x.y()); };
  p.conductivity = [](const Point&) { return 1.0; };
  p.conductivity_gradient = [](const Point&) { return Point(0.0, 0.0); };
  p.heat_capacity = [](const Point&) { return 2.0 * pi * pi; };
  p.dirichlet = exact;
  p.initial = [exact](const Point& x) { return exact(x, 0.0); };
  p.exact = exact;
  p.final_time = 1.0;
  return p;
}

/// Steady quadratic u* = x1^2 with kappa = rho c = 1 and f = -2.
inline HeatProblem manufactured_problem() {
  HeatProblem p;
  p.name = "manufactured";
  p.domain = unit_square_mixed();
  auto exact = [](const Point& x, double) { return x.x() * x.x(); };
  p.conductivity = [](const Point&) { return 1.0; };
  p.conductivity_gradient = [](const Point&) { return Point(0.0, 0.0); };
  p.heat_capacity = [](const Point&) { return 1.0; };
  p.source = [](const Point&, double) { return -2.0; };
  p.dirichlet = exact;
  p.initial = [exact](const Point& x) { return exact(x, 0.0); };
  p.exact = exact;
  p.final_time = 1.0;
  return p;
}

/// Functionally graded strip: kappa = kappa0 exp(gamma x1), u = 0 at x1 = 0, u = T at x1 = a for t >= 0.
struct FgmParams {
  double kappa0 = 17.0;
  double gamma = 0.0;
  double rho_c = 1e6;
  double a = 0.04;
  double T = 1.0;

  double alpha0() const { return kappa0 / rho_c; }

  void validate() const {
    if (!(kappa0 > 0.0) || !(rho_c > 0.0) || !(a > 0.0)) throw InvalidArgument("FGM kappa0, rho c and a must be positive");
    if (!std::isfinite(gamma) || !std::isfinite(T)) throw InvalidArgument("FGM gamma and T must be finite");
  }
};

inline HeatProblem fgm_problem(const FgmParams& fp, double final_time = 60.0) {
  fp.validate();
  HeatProblem p;
  p.name = "fgm";
  p.domain = DomainSpec{0.0, fp.a, 0.0, fp.a,
                        {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet, BoundaryCondition::Neumann,
                         BoundaryCondition::Dirichlet}};
  p.conductivity = [fp](const Point& x) { return fp.kappa0 * std::exp(fp.gamma * x.x()); };
  p.conductivity_gradient = [fp](const Point& x) {
    return Point(fp.gamma * fp.kappa0 * std::exp(fp.gamma * x.x()), 0.0);
  };
  p.heat_capacity = [fp](const Point&) { return fp.rho_c; };
  p.dirichlet = [fp](const Point& x, double) { return x.x() > 0.5 * fp.a ? fp.T : 0.0; };
  p.initial = [](const Point&) { return 0.0; };
  p.final_time = final_time;
  return p;
}

/// Series solution of the homogeneous strip (gamma = 0), summed until a term drops below 1e-12.
inline double fgm_series_solution(const FgmParams& fp, double x1, double t, std::size_t max_terms = 100000) {
  fp.validate();
  if (fp.gamma != 0.0) throw NotApplicable("the series solution only holds for gamma = 0");
  if (t < 0.0) throw InvalidArgument("time must be non-negative");
  const double xi = x1 / fp.a;
  double sum = 0.0;
  const double decay = fp.alpha0() * pi * pi * t / (fp.a * fp.a);
  for (std::size_t n = 1; n <= max_terms; ++n) {
    const double nd = static_cast<double>(n);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    const double envelope = std::exp(-decay * nd * nd) / nd;
    sum += sign * envelope * std::sin(nd * pi * xi);
    if (2.0 * fp.T / pi * envelope < 1e-12) break;
  }
  return fp.T * xi + 2.0 / pi * fp.T * sum;
}

/// Steady temperature T (exp(-gamma x1) - 1) / (exp(-gamma a) - 1), T x1 / a when gamma = 0.
inline double fgm_steady_state(const FgmParams& fp, double x1) {
  fp.validate();
  if (fp.gamma == 0.0) return fp.T * x1 / fp.a;
  return fp.T * std::expm1(-fp.gamma * x1) / std::expm1(-fp.gamma * fp.a);
}

struct NodalError {
  double max = 0.0;
  double rms = 0.0;
};

/// Max and RMS nodal error against `exact` at time t.
inline NodalError nodal_error(const NodeSet& nodes, const Eigen::VectorXd& u, const TimeField& exact, double t) {
  if (!exact) throw InvalidArgument("no reference solution available");
  if (static_cast<std::size_t>(u.size()) != nodes.size()) throw InvalidArgument("nodal vector length mismatch");
  NodalError e;
  double sq = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double d = std::abs(u[static_cast<Eigen::Index>(k)] - exact(nodes.point(k), t));
    e.max = std::max(e.max, d);
    sq += d * d;
  }
  e.rms = std::sqrt(sq / static_cast<double>(nodes.size()));
  return e;
}

/// log2(e_coarse / e_fine) scaled by the actual refinement ratio.
inline double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

}  // namespace dmlpg

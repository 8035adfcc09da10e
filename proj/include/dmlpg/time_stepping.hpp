#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "dmlpg/assembly.hpp"
#include "dmlpg/errors.hpp"
#include "dmlpg/gmls.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/poly_basis.hpp"

namespace dmlpg {

enum class SchemeKind { CrankNicolson, BackwardEuler, MethodOfLines };

inline std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::CrankNicolson: return "cn";
    case SchemeKind::BackwardEuler: return "be";
    case SchemeKind::MethodOfLines: return "mol";
  }
  return "?";
}

struct TimeScheme {
  SchemeKind kind = SchemeKind::CrankNicolson;
  double dt = 0.01;
  double rtol = 1e-5;
  double atol = 1e-6;

  static TimeScheme crank_nicolson(double dt) { return {SchemeKind::CrankNicolson, dt, 1e-5, 1e-6}; }
  static TimeScheme backward_euler(double dt) { return {SchemeKind::BackwardEuler, dt, 1e-5, 1e-6}; }
  static TimeScheme method_of_lines(double rtol, double atol) { return {SchemeKind::MethodOfLines, 0.0, rtol, atol}; }

  bool fixed_step() const { return kind != SchemeKind::MethodOfLines; }

  /// Number of fixed steps covering [0, t_final].
  std::size_t steps(double t_final) const {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    const double n = std::round(t_final / dt);
    if (n < 1.0 || std::abs(n * dt - t_final) > 1e-12 * t_final) {
      throw InvalidArgument("time step does not divide the final time");
    }
    return static_cast<std::size_t>(n);
  }

  void validate(double t_final) const {
    if (fixed_step()) {
      steps(t_final);
    } else if (!(rtol > 0.0) || !(atol > 0.0)) {
      throw InvalidArgument("integrator tolerances must be positive");
    }
  }
};

/// Nodal states at increasing times; immutable once returned.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::size_t factorizations = 0;
  std::size_t steps = 0;
  double seconds = 0.0;

  const Eigen::VectorXd& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

namespace detail {

using DenseLU = Eigen::PartialPivLU<Eigen::MatrixXd>;

inline void check_finite(const Eigen::VectorXd& u, double t) {
  if (!u.allFinite()) throw SingularSystem("non-finite state at t = " + std::to_string(t));
}

/// Index sets of free (differential) and algebraic unknowns.
struct Partition {
  std::vector<Eigen::Index> free, fixed;

  explicit Partition(const SemiDiscreteSystem& sys) {
    for (std::size_t k = 0; k < sys.size(); ++k) {
      (sys.is_algebraic(k) ? fixed : free).push_back(static_cast<Eigen::Index>(k));
    }
  }
};

inline Eigen::MatrixXd block(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& r,
                             const std::vector<Eigen::Index>& c) {
  return m(r, c);
}

inline Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) { return v(idx); }

}  // namespace detail

/// theta-scheme with the algebraic rows replaced by B u^{n+1} = g(t^{n+1}).
/// theta = 1/2 is Crank-Nicolson, theta = 1 backward Euler. The iteration matrix is factorized once.
inline Trajectory step_theta(const SemiDiscreteSystem& sys, double dt, double theta, double t_final) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t nsteps = TimeScheme{SchemeKind::CrankNicolson, dt}.steps(t_final);
  const auto n = static_cast<Eigen::Index>(sys.size());

  // L = A1/dt + theta A on differential rows, B on algebraic rows; R = A1/dt - (1 - theta) A.
  std::vector<Eigen::Triplet<double>> lt, rt;
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool alg = sys.is_algebraic(static_cast<std::size_t>(k));
    for (SemiDiscreteSystem::SparseRows::InnerIterator it(sys.stiffness, k); it; ++it) {
      lt.emplace_back(k, it.col(), alg ? it.value() : theta * it.value());
      if (!alg && theta != 1.0) rt.emplace_back(k, it.col(), -(1.0 - theta) * it.value());
    }
    if (alg) continue;
    for (SemiDiscreteSystem::SparseRows::InnerIterator it(sys.capacity, k); it; ++it) {
      lt.emplace_back(k, it.col(), it.value() / dt);
      rt.emplace_back(k, it.col(), it.value() / dt);
    }
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(lt.begin(), lt.end());
  L.makeCompressed();
  SemiDiscreteSystem::SparseRows R(n, n);
  R.setFromTriplets(rt.begin(), rt.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(L);
  lu.factorize(L);
  if (lu.info() != Eigen::Success) throw SingularSystem("iteration matrix is singular: " + lu.lastErrorMessage());

  Trajectory tr;
  tr.factorizations = 1;
  tr.times.reserve(nsteps + 1);
  tr.states.reserve(nsteps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(sys.initial);

  Eigen::VectorXd u = sys.initial;
  Eigen::VectorXd b_old = sys.load(0.0);
  for (std::size_t s = 1; s <= nsteps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const Eigen::VectorXd b_new = sys.load(t);
    Eigen::VectorXd rhs = R * u + theta * b_new + (1.0 - theta) * b_old;
    for (std::size_t k : sys.algebraic_rows) rhs[static_cast<Eigen::Index>(k)] = b_new[static_cast<Eigen::Index>(k)];
    u = lu.solve(rhs);
    detail::check_finite(u, t);
    tr.times.push_back(t);
    tr.states.push_back(u);
    b_old = b_new;
  }
  tr.steps = nsteps;
  tr.seconds = detail::seconds_since(t0);
  return tr;
}

inline Trajectory step_crank_nicolson(const SemiDiscreteSystem& sys, double dt, double t_final) {
  return step_theta(sys, dt, 0.5, t_final);
}

inline Trajectory step_crank_nicolson(const SemiDiscreteSystem& sys, double dt) {
  return step_crank_nicolson(sys, dt, sys.problem.final_time);
}

inline Trajectory step_backward_euler(const SemiDiscreteSystem& sys, double dt, double t_final) {
  return step_theta(sys, dt, 1.0, t_final);
}

/// Crank-Nicolson with the algebraic unknowns eliminated through a dense Schur complement.
/// Produces the same iterates as the row-replacement form; two factorizations (B_D and the Schur matrix).
inline Trajectory step_crank_nicolson_eliminated(const SemiDiscreteSystem& sys, double dt, double t_final) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t nsteps = TimeScheme{SchemeKind::CrankNicolson, dt}.steps(t_final);
  const detail::Partition part(sys);
  const auto& F = part.free;
  const auto& D = part.fixed;
  const Eigen::MatrixXd A1 = Eigen::MatrixXd(sys.capacity);
  const Eigen::MatrixXd A = Eigen::MatrixXd(sys.stiffness);
  const Eigen::MatrixXd L = A1 / dt + 0.5 * A;
  const Eigen::MatrixXd R = A1 / dt - 0.5 * A;

  Trajectory tr;
  Eigen::MatrixXd BDinv_BF, Lfd_BDinv;
  detail::DenseLU bd;
  if (!D.empty()) {
    bd.compute(detail::block(A, D, D));
    ++tr.factorizations;
    BDinv_BF = bd.solve(detail::block(A, D, F));
    Lfd_BDinv = detail::block(L, F, D) * bd.inverse();
  }
  Eigen::MatrixXd S = detail::block(L, F, F);
  if (!D.empty()) S -= detail::block(L, F, D) * BDinv_BF;
  const detail::DenseLU su(S);
  ++tr.factorizations;
  if (!(su.rcond() > 0.0)) throw SingularSystem("eliminated iteration matrix is singular");

  tr.times.push_back(0.0);
  tr.states.push_back(sys.initial);
  Eigen::VectorXd u = sys.initial;
  Eigen::VectorXd b_old = sys.load(0.0);
  for (std::size_t s = 1; s <= nsteps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const Eigen::VectorXd b_new = sys.load(t);
    const Eigen::VectorXd full = R * u + 0.5 * (b_new + b_old);
    Eigen::VectorXd rhs = detail::gather(full, F);
    Eigen::VectorXd gD;
    if (!D.empty()) {
      gD = detail::gather(b_new, D);
      rhs -= Lfd_BDinv * gD;
    }
    const Eigen::VectorXd uF = su.solve(rhs);
    u(F) = uF;
    if (!D.empty()) u(D) = bd.solve(gD) - BDinv_BF * uF;
    detail::check_finite(u, t);
    tr.times.push_back(t);
    tr.states.push_back(u);
    b_old = b_new;
  }
  tr.steps = nsteps;
  tr.seconds = detail::seconds_since(t0);
  return tr;
}

namespace detail {

/// Reduced ODE on the free unknowns: M u_F' + K u_F = r(t), with
/// r(t) = b_F - A1_FD B_D^{-1} g' - A_FD B_D^{-1} g and u_D = B_D^{-1}(g - B_F u_F).
struct ReducedOde {
  const SemiDiscreteSystem* sys;
  Partition part;
  DenseLU bd;
  Eigen::MatrixXd BDinv_BF;
  Eigen::MatrixXd Minv_K;
  Eigen::MatrixXd Minv_A1fd_BDinv, Minv_Afd_BDinv, Minv;
  std::size_t factorizations = 0;

  explicit ReducedOde(const SemiDiscreteSystem& s) : sys(&s), part(s) {
    const Eigen::MatrixXd A1 = Eigen::MatrixXd(s.capacity);
    const Eigen::MatrixXd A = Eigen::MatrixXd(s.stiffness);
    const auto& F = part.free;
    const auto& D = part.fixed;
    Eigen::MatrixXd M = block(A1, F, F), K = block(A, F, F);
    Eigen::MatrixXd A1fd_BDinv, Afd_BDinv;
    if (!D.empty()) {
      bd.compute(block(A, D, D));
      ++factorizations;
      const Eigen::MatrixXd BDinv = bd.inverse();
      if (!BDinv.allFinite()) throw SingularSystem("algebraic block is singular");
      BDinv_BF = BDinv * block(A, D, F);
      A1fd_BDinv = block(A1, F, D) * BDinv;
      Afd_BDinv = block(A, F, D) * BDinv;
      M -= block(A1, F, D) * BDinv_BF;
      K -= block(A, F, D) * BDinv_BF;
    }
    const DenseLU mu(M);
    ++factorizations;
    Minv = mu.inverse();
    if (!Minv.allFinite()) throw SingularSystem("reduced capacity matrix is singular");
    Minv_K = Minv * K;
    if (!D.empty()) {
      Minv_A1fd_BDinv = Minv * A1fd_BDinv;
      Minv_Afd_BDinv = Minv * Afd_BDinv;
    }
  }

  Eigen::VectorXd constraint_data(double t) const {
    Eigen::VectorXd g(static_cast<Eigen::Index>(part.fixed.size()));
    for (std::size_t i = 0; i < part.fixed.size(); ++i) g[static_cast<Eigen::Index>(i)] = sys->load(static_cast<std::size_t>(part.fixed[i]), t);
    return g;
  }

  Eigen::VectorXd free_load(double t) const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(part.free.size()));
    for (std::size_t i = 0; i < part.free.size(); ++i) b[static_cast<Eigen::Index>(i)] = sys->load(static_cast<std::size_t>(part.free[i]), t);
    return b;
  }

  /// M^{-1} r(t); g' by finite differences (one-sided at the start).
  Eigen::VectorXd forcing(double t) const {
    Eigen::VectorXd r = Minv * free_load(t);
    if (part.fixed.empty()) return r;
    const double e = 1e-6 * std::max(1.0, std::abs(t));
    const Eigen::VectorXd gdot = t - e < 0.0 ? Eigen::VectorXd((constraint_data(t + e) - constraint_data(t)) / e)
                                             : Eigen::VectorXd((constraint_data(t + e) - constraint_data(t - e)) / (2.0 * e));
    r -= Minv_A1fd_BDinv * gdot + Minv_Afd_BDinv * constraint_data(t);
    return r;
  }

  Eigen::VectorXd full_state(const Eigen::VectorXd& uF, double t) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(sys->size()));
    u(part.free) = uF;
    if (!part.fixed.empty()) u(part.fixed) = bd.solve(constraint_data(t)) - BDinv_BF * uF;
    return u;
  }
};

}  // namespace detail

/// Integrates the reduced ODE with a variable-order BDF method (GSL msbdf) using the constant Jacobian,
/// and re-injects the algebraic unknowns at each output time.
inline Trajectory solve_method_of_lines(const SemiDiscreteSystem& sys, double rtol, double atol,
                                        const std::vector<double>& output_times) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("integrator tolerances must be positive");
  if (output_times.empty() || output_times.front() != 0.0 || !std::is_sorted(output_times.begin(), output_times.end())) {
    throw InvalidArgument("output times must start at 0 and increase");
  }
  const detail::ReducedOde ode(sys);
  Trajectory tr;
  tr.factorizations = ode.factorizations;
  const auto nf = static_cast<Eigen::Index>(ode.part.free.size());

  if (nf == 0) {
    for (double t : output_times) {
      tr.times.push_back(t);
      tr.states.push_back(ode.full_state(Eigen::VectorXd(0), t));
    }
    tr.seconds = detail::seconds_since(t0);
    return tr;
  }

  auto rhs = [](double t, const double y[], double dydt[], void* params) -> int {
    const auto& o = *static_cast<const detail::ReducedOde*>(params);
    const auto n = static_cast<Eigen::Index>(o.part.free.size());
    Eigen::Map<Eigen::VectorXd>(dydt, n) = o.forcing(t) - o.Minv_K * Eigen::Map<const Eigen::VectorXd>(y, n);
    return GSL_SUCCESS;
  };
  auto jac = [](double t, const double*, double* dfdy, double dfdt[], void* params) -> int {
    const auto& o = *static_cast<const detail::ReducedOde*>(params);
    const auto n = static_cast<Eigen::Index>(o.part.free.size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dfdy, n, n) = -o.Minv_K;
    const double e = 1e-6 * std::max(1.0, std::abs(t));
    Eigen::Map<Eigen::VectorXd>(dfdt, n) = (o.forcing(t + e) - o.forcing(t)) / e;
    return GSL_SUCCESS;
  };

  gsl_odeiv2_system system{rhs, jac, static_cast<std::size_t>(nf), const_cast<detail::ReducedOde*>(&ode)};
  const double t_end = output_times.back();
  const double h0 = std::max(1e-12, 1e-6 * t_end);
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_odeiv2_driver, decltype(&gsl_odeiv2_driver_free)> driver(
      gsl_odeiv2_driver_alloc_y_new(&system, gsl_odeiv2_step_msbdf, h0, atol, rtol), &gsl_odeiv2_driver_free);
  if (!driver) throw IntegratorFailure("could not allocate the integrator", 0.0, 0);
  gsl_odeiv2_driver_set_nmax(driver.get(), 100000);

  Eigen::VectorXd y = sys.initial(ode.part.free);
  double t = 0.0;
  for (double target : output_times) {
    if (target > t) {
      const int status = gsl_odeiv2_driver_apply(driver.get(), &t, target, y.data());
      tr.steps += driver->n;
      if (status != GSL_SUCCESS) {
        throw IntegratorFailure(std::string("method-of-lines integration failed: ") + gsl_strerror(status), t,
                                tr.steps);
      }
    }
    tr.times.push_back(target);
    tr.states.push_back(ode.full_state(y, target));
    detail::check_finite(tr.states.back(), target);
  }
  tr.seconds = detail::seconds_since(t0);
  return tr;
}

inline Trajectory solve_method_of_lines(const SemiDiscreteSystem& sys, double rtol, double atol, double t_final,
                                        std::size_t samples) {
  if (samples < 1) throw InvalidArgument("at least one output sample is required");
  std::vector<double> times(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) times[i] = t_final * static_cast<double>(i) / static_cast<double>(samples);
  times.back() = t_final;
  return solve_method_of_lines(sys, rtol, atol, times);
}

/// Runs the scheme; fixed-step schemes store every step, the integrator stores `output_times` (or 100 samples).
inline Trajectory integrate(const SemiDiscreteSystem& sys, const TimeScheme& scheme, double t_final,
                            const std::vector<double>& output_times = {}) {
  scheme.validate(t_final);
  switch (scheme.kind) {
    case SchemeKind::CrankNicolson: return step_theta(sys, scheme.dt, 0.5, t_final);
    case SchemeKind::BackwardEuler: return step_theta(sys, scheme.dt, 1.0, t_final);
    case SchemeKind::MethodOfLines:
      return output_times.empty() ? solve_method_of_lines(sys, scheme.rtol, scheme.atol, t_final, 100)
                                  : solve_method_of_lines(sys, scheme.rtol, scheme.atol, output_times);
  }
  throw InvalidArgument("unknown time scheme");
}

/// Solves A u = b(t) directly (steady problems).
inline Eigen::VectorXd solve_steady(const SemiDiscreteSystem& sys, double t = 0.0) {
  Eigen::SparseMatrix<double> A = sys.stiffness;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SingularSystem("stiffness matrix is singular: " + lu.lastErrorMessage());
  Eigen::VectorXd u = lu.solve(sys.load(t));
  detail::check_finite(u, t);
  return u;
}

/// MLS evaluation of nodal data at arbitrary points.
inline Eigen::VectorXd postprocess(const NodeSet& nodes, const Eigen::VectorXd& nodal,
                                   const std::vector<Point>& queries, int degree, const WeightConfig& cfg) {
  if (static_cast<std::size_t>(nodal.size()) != nodes.size()) throw InvalidArgument("nodal vector length mismatch");
  const BucketGrid grid(nodes, cfg.support());
  const PolyBasis basis(degree, Point::Zero(), cfg.spacing);
  Eigen::VectorXd out(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = point_value_row(nodes, grid, queries[i], basis, cfg).apply(nodal);
  }
  return out;
}

}  // namespace dmlpg

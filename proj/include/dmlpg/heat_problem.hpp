#pragma once

#include <functional>
#include <string>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"

namespace dmlpg {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
using TimeField = std::function<double(const Point&, double)>;

/// rho c u_t = div(kappa grad u) + f on a rectangle, with
/// u = u_D on Dirichlet sides and kappa du/dn = u_N on Neumann sides.
///
/// Empty `source` and `neumann` mean zero; empty `exact` means no reference.
struct HeatProblem {
  std::string name;
  DomainSpec domain;
  ScalarField conductivity;
  VectorField conductivity_gradient;
  ScalarField heat_capacity;  ///< rho * c
  TimeField source;
  TimeField dirichlet;
  TimeField neumann;
  ScalarField initial;
  double final_time = 1.0;
  TimeField exact;

  void validate() const {
    domain.validate();
    if (!conductivity || !conductivity_gradient || !heat_capacity || !dirichlet || !initial) {
      throw InvalidArgument("heat problem '" + name + "' is missing coefficient or data callables");
    }
    if (!(final_time > 0.0)) throw InvalidArgument("final time must be positive");
  }

  double kappa(const Point& x) const { return conductivity(x); }
  Point grad_kappa(const Point& x) const { return conductivity_gradient(x); }
  double capacity(const Point& x) const { return heat_capacity(x); }
  double f(const Point& x, double t) const { return source ? source(x, t) : 0.0; }
  double u_n(const Point& x, double t) const { return neumann ? neumann(x, t) : 0.0; }
  bool has_source() const { return static_cast<bool>(source); }
  bool has_neumann_data() const { return static_cast<bool>(neumann); }
  bool has_exact() const { return static_cast<bool>(exact); }
};

}  // namespace dmlpg

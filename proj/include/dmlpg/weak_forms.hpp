#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <variant>

#include <Eigen/Core>

#include "dmlpg/errors.hpp"
#include "dmlpg/gmls.hpp"
#include "dmlpg/heat_problem.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/poly_basis.hpp"
#include "dmlpg/quadrature.hpp"
#include "dmlpg/subdomain.hpp"

namespace dmlpg {

// Every local equation is written as
//
//     capacity(du/dt) + stiffness(u) = load(t)
//
// and each functional is evaluated on the basis polynomials only.

/// Truncated Gaussian phi(|x - x_k| / r0); vanishes on the circle of radius r0.
struct GaussianBump {
  double radius;
  double shape;

  double value(double r) const { return truncated_gaussian(r, radius, shape); }
  Point gradient(const Point& rel) const {
    const double r = rel.norm();
    if (r == 0.0 || r >= radius) return Point::Zero();
    return truncated_gaussian_derivative(r, radius, shape) / r * rel;
  }
};

/// v = 1 on the subdomain.
struct ConstantTest {};

/// Dirac functional at the node (pure collocation).
struct PointCollocation {};

/// v = ln(r0 / r) / (2 pi), the Laplace fundamental solution vanishing at r = r0.
struct Companion {
  double radius;

  double value(double r) const { return std::log(radius / r) / two_pi; }
  Point gradient(const Point& rel) const { return -rel / (two_pi * rel.squaredNorm()); }
};

using TestFunctionKind = std::variant<GaussianBump, ConstantTest, PointCollocation, Companion>;

/// Fraction of a small circle around the node that lies inside the domain.
struct CornerFactor {
  double alpha = 1.0;
  double interior_angle = two_pi;
};

inline CornerFactor corner_factor(const NodeSet& nodes, std::size_t k) {
  switch (nodes.side_count(k)) {
    case 0: return {1.0, two_pi};
    case 1: return {0.5, std::numbers::pi};
    default: return {0.25, 0.5 * std::numbers::pi};
  }
}

namespace detail {

inline Point piece_normal(const BoundaryPiece& piece, const Point& x) {
  if (const auto* arc = std::get_if<Arc>(&piece.geometry)) return (x - arc->center) / arc->radius;
  return std::get<Segment>(piece.geometry).outward_normal();
}

inline double test_value(const TestFunctionKind& v, const Point& rel) {
  if (const auto* b = std::get_if<GaussianBump>(&v)) return b->value(rel.norm());
  if (std::holds_alternative<ConstantTest>(v)) return 1.0;
  if (const auto* c = std::get_if<Companion>(&v)) return c->value(rel.norm());
  throw InvalidArgument("point collocation has no pointwise test function values");
}

inline bool vanishes_on_arc(const TestFunctionKind& v, const Arc& arc) {
  if (const auto* b = std::get_if<GaussianBump>(&v)) return arc.radius >= b->radius;
  if (const auto* c = std::get_if<Companion>(&v)) return arc.radius >= c->radius;
  return false;
}

}  // namespace detail

/// lambda_1[q] = int rho c p_q v dOmega  (smooth v: bump or constant).
inline FunctionalVec capacity_functional(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                         const TestFunctionKind& v, const QuadOrders& q = {}) {
  if (std::holds_alternative<Companion>(v) || std::holds_alternative<PointCollocation>(v)) {
    throw InvalidArgument("capacity_functional handles smooth test functions only");
  }
  const QuadratureRule rule = clipped_region_rule(sub, q);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd p(acc.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& x = rule.points[i];
    const double vx = detail::test_value(v, x - sub.center);
    if (vx == 0.0) continue;
    basis.values_into(x, p);
    acc += (rule.weights[i] * prob.capacity(x) * vx) * p;
  }
  return FunctionalVec(basis, std::move(acc));
}

/// lambda_2[q] = -int kappa grad p_q . grad v dOmega.
inline FunctionalVec gradient_functional(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                         const GaussianBump& v, const QuadOrders& q = {}) {
  const QuadratureRule rule = clipped_region_rule(sub, q);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& x = rule.points[i];
    const Point gv = v.gradient(x - sub.center);
    if (gv.isZero(0.0)) continue;
    acc -= (rule.weights[i] * prob.kappa(x)) * (basis.gradients(x) * gv);
  }
  return FunctionalVec(basis, std::move(acc));
}

/// lambda_3[q] = -int_{boundary of subdomain minus Neumann part} kappa dp_q/dn v dGamma.
inline FunctionalVec flux_functional(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                     const TestFunctionKind& v, const QuadOrders& q = {}) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& piece : sub.pieces) {
    if (piece.tag == PieceTag::OnNeumann) continue;
    if (const auto* arc = std::get_if<Arc>(&piece.geometry); arc && detail::vanishes_on_arc(v, *arc)) continue;
    const QuadratureRule rule = std::holds_alternative<Companion>(v) && !piece.is_arc()
                                    ? log_segment_rule(std::get<Segment>(piece.geometry), sub.center,
                                                       std::get<Companion>(v).radius, q.segment)
                                    : boundary_piece_rule(piece, q);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Point& x = rule.points[i];
      // the log rule already carries ln(r0/r); only the 1/(2 pi) factor remains
      const double vx = std::holds_alternative<Companion>(v) && !piece.is_arc()
                            ? 1.0 / two_pi
                            : detail::test_value(v, x - sub.center);
      if (vx == 0.0) continue;
      const Point n = detail::piece_normal(piece, x);
      acc -= (rule.weights[i] * prob.kappa(x) * vx) * (basis.gradients(x) * n);
    }
  }
  return FunctionalVec(basis, std::move(acc));
}

struct LocalWeakForm {
  FunctionalVec capacity;
  FunctionalVec stiffness;
};

/// First local weak form with the Gaussian bump test function:
/// capacity = lambda_1, stiffness = -lambda_2 + lambda_3.
/// lambda_3 vanishes for balls since v = 0 on their interior arcs.
inline LocalWeakForm dmlpg1_functionals(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                        const GaussianBump& v, const QuadOrders& q = {}) {
  LocalWeakForm out{capacity_functional(prob, sub, basis, v, q), -gradient_functional(prob, sub, basis, v, q)};
  out.stiffness += flux_functional(prob, sub, basis, v, q);
  return out;
}

/// First local weak form with v = 1: capacity = lambda_1, stiffness = lambda_3.
inline LocalWeakForm dmlpg5_functionals(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                        const QuadOrders& q = {}) {
  return {capacity_functional(prob, sub, basis, ConstantTest{}, q),
          flux_functional(prob, sub, basis, ConstantTest{}, q)};
}

enum class CollocationRole { Dirichlet, Neumann, Pde };

/// Strong-form functionals at x_k:
/// Dirichlet -> p(x_k); Neumann -> kappa dp/dn (x_k); Pde -> div(kappa grad p)(x_k).
inline FunctionalVec dmlpg2_functional(const HeatProblem& prob, const Point& xk, const PolyBasis& basis,
                                       CollocationRole role, const Point& normal = Point::Zero()) {
  switch (role) {
    case CollocationRole::Dirichlet: return FunctionalVec(basis, basis.values(xk));
    case CollocationRole::Neumann: {
      if (std::abs(normal.norm() - 1.0) > 1e-12) throw InvalidArgument("Neumann collocation needs a unit normal");
      return FunctionalVec(basis, prob.kappa(xk) * (basis.gradients(xk) * normal));
    }
    case CollocationRole::Pde:
      return FunctionalVec(basis, basis.gradients(xk) * prob.grad_kappa(xk) + prob.kappa(xk) * basis.laplacians(xk));
  }
  throw InvalidArgument("unknown collocation role");
}

/// Pieces of the companion-solution weak form, kept separate for testing.
struct CompanionParts {
  FunctionalVec capacity;   ///< int (rho c / kappa) p v dOmega
  FunctionalVec point;      ///< p(x_k)
  FunctionalVec kernel;     ///< principal value of int p dv/dn dGamma over the whole subdomain boundary
  FunctionalVec advection;  ///< int (grad kappa / kappa) . grad p v dOmega
  FunctionalVec flux;       ///< int_{boundary minus Neumann part} v dp/dn dGamma
};

inline CompanionParts companion_parts(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                      const QuadOrders& q = {}) {
  const double r0 = sub.size;
  const Companion v{r0};
  const Eigen::Index nq = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd cap = Eigen::VectorXd::Zero(nq), adv = Eigen::VectorXd::Zero(nq);
  Eigen::VectorXd kern = Eigen::VectorXd::Zero(nq), flux = Eigen::VectorXd::Zero(nq);
  Eigen::VectorXd p(nq);

  // Domain terms: the log rule weights carry ln(r0/r), so v = weight / (2 pi).
  const QuadratureRule rule = log_singular_rule(sub, q);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& x = rule.points[i];
    const double w = rule.weights[i] / two_pi;
    const double kap = prob.kappa(x);
    basis.values_into(x, p);
    cap += (w * prob.capacity(x) / kap) * p;
    const Point gk = prob.grad_kappa(x);
    if (!gk.isZero(0.0)) adv += (w / kap) * (basis.gradients(x) * gk);
  }

  for (const auto& piece : sub.pieces) {
    if (const auto* arc = std::get_if<Arc>(&piece.geometry)) {
      // dv/dn = -1/(2 pi r0) on the circle r = r0, and v = 0 there
      const QuadratureRule ar = arc_rule(*arc, q.angular);
      const double dvdn = -1.0 / (two_pi * arc->radius);
      for (std::size_t i = 0; i < ar.size(); ++i) {
        basis.values_into(ar.points[i], p);
        kern += (ar.weights[i] * dvdn) * p;
      }
      if (!detail::vanishes_on_arc(v, *arc)) {
        for (std::size_t i = 0; i < ar.size(); ++i) {
          const Point& x = ar.points[i];
          flux += (ar.weights[i] * v.value((x - sub.center).norm())) * (basis.gradients(x) * ((x - arc->center) / arc->radius));
        }
      }
      continue;
    }
    const auto& seg = std::get<Segment>(piece.geometry);
    const Point n = seg.outward_normal();
    // On a line through x_k, (x - x_k) . n = 0: the kernel vanishes identically.
    // Elsewhere dv/dn = -d / (2 pi rho^2), with d the distance of x_k from the line.
    if (!detail::collinear_with(seg, sub.center, r0)) {
      const double d = (seg.a - sub.center).dot(n);
      const QuadratureRule along = graded_segment_rule(seg, sub.center, q.segment);
      for (std::size_t j = 0; j < along.size(); ++j) {
        const double rho2 = (along.points[j] - sub.center).squaredNorm();
        basis.values_into(along.points[j], p);
        kern -= (along.weights[j] * d / (two_pi * rho2)) * p;
      }
    }
    if (piece.tag != PieceTag::OnNeumann) {
      const QuadratureRule lr = log_segment_rule(seg, sub.center, r0, q.segment);
      for (std::size_t i = 0; i < lr.size(); ++i) {
        flux += (lr.weights[i] / two_pi) * (basis.gradients(lr.points[i]) * n);
      }
    }
  }
  return {FunctionalVec(basis, std::move(cap)), FunctionalVec(basis, basis.values(sub.center)),
          FunctionalVec(basis, std::move(kern)), FunctionalVec(basis, std::move(adv)),
          FunctionalVec(basis, std::move(flux))};
}

/// Second local weak form with the companion solution:
/// capacity = int (rho c / kappa) p v, and
/// stiffness = alpha p(x_k) + PV int p dv/dn - int (grad kappa / kappa) . grad p v - int_{not Neumann} v dp/dn.
inline LocalWeakForm dmlpg4_functionals(const HeatProblem& prob, const Subdomain& sub, const PolyBasis& basis,
                                        const CornerFactor& alpha, const QuadOrders& q = {}) {
  CompanionParts parts = companion_parts(prob, sub, basis, q);
  FunctionalVec stiff = parts.point * alpha.alpha + parts.kernel - parts.advection - parts.flux;
  return {std::move(parts.capacity), std::move(stiff)};
}

/// Quadrature for the right-hand side of one local equation: sum_i w_i f(x_i, t) + sum_j w_j u_N(x_j, t).
/// The test function (and 1/kappa for the companion form) is folded into the weights.
struct LoadQuadrature {
  QuadratureRule source;
  QuadratureRule neumann;

  double evaluate(const HeatProblem& prob, double t) const {
    double b = 0.0;
    if (prob.has_source()) {
      for (std::size_t i = 0; i < source.size(); ++i) b += source.weights[i] * prob.source(source.points[i], t);
    }
    if (prob.has_neumann_data()) {
      for (std::size_t i = 0; i < neumann.size(); ++i) b += neumann.weights[i] * prob.neumann(neumann.points[i], t);
    }
    return b;
  }
};

inline LoadQuadrature load_quadrature(const HeatProblem& prob, const Subdomain& sub, const TestFunctionKind& v,
                                      const QuadOrders& q = {}) {
  LoadQuadrature out;
  const bool companion = std::holds_alternative<Companion>(v);
  if (std::holds_alternative<PointCollocation>(v)) throw InvalidArgument("collocation rows have no load quadrature");
  if (prob.has_source()) {
    QuadratureRule rule = companion ? log_singular_rule(sub, q) : clipped_region_rule(sub, q);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Point& x = rule.points[i];
      rule.weights[i] *= companion ? 1.0 / (two_pi * prob.kappa(x)) : detail::test_value(v, x - sub.center);
    }
    out.source = std::move(rule);
  }
  if (prob.has_neumann_data()) {
    for (const auto& piece : sub.pieces) {
      if (piece.tag != PieceTag::OnNeumann) continue;
      const auto& seg = std::get<Segment>(piece.geometry);
      QuadratureRule rule =
          companion ? log_segment_rule(seg, sub.center, sub.size, q.segment) : gauss_segment(seg.a, seg.b, q.segment);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const Point& x = rule.points[i];
        rule.weights[i] *= companion ? 1.0 / (two_pi * prob.kappa(x)) : detail::test_value(v, x - sub.center);
      }
      out.neumann.append(rule);
    }
  }
  return out;
}

/// int_{Omega_s} f v dOmega at time t (weighted by 1/kappa for the companion form).
inline double source_load(const HeatProblem& prob, const Subdomain& sub, const TestFunctionKind& v, double t,
                          const QuadOrders& q = {}) {
  if (!prob.has_source()) return 0.0;
  LoadQuadrature lq = load_quadrature(prob, sub, v, q);
  lq.neumann = {};
  return lq.evaluate(prob, t);
}

/// int_{Gamma_N within the subdomain boundary} u_N v dGamma at time t.
inline double neumann_load(const HeatProblem& prob, const Subdomain& sub, const TestFunctionKind& v, double t,
                           const QuadOrders& q = {}) {
  if (!prob.has_neumann_data()) return 0.0;
  LoadQuadrature lq = load_quadrature(prob, sub, v, q);
  lq.source = {};
  return lq.evaluate(prob, t);
}

}  // namespace dmlpg

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/poly_basis.hpp"

namespace dmlpg {

/// Gaussian weight parameters: support delta = delta0 * h, shape c = c0 * h.
struct WeightConfig {
  double support_factor = 4.0;
  double shape_factor = 0.6;
  double spacing = 1.0;

  /// delta0 = 2m (1 for the constant basis), c0 = 0.6.
  static WeightConfig defaults(int degree, double spacing) {
    return WeightConfig{degree > 0 ? 2.0 * degree : 1.0, 0.6, spacing};
  }

  double support() const { return support_factor * spacing; }
  double shape() const { return shape_factor * spacing; }

  void validate() const {
    if (!(support_factor > 0.0) || !(shape_factor > 0.0) || !(spacing > 0.0)) {
      throw InvalidArgument("weight parameters delta0, c0 and h must be positive");
    }
  }
};

/// [exp(-(r/c)^2) - exp(-(delta/c)^2)] / [1 - exp(-(delta/c)^2)] on [0, delta], zero beyond.
inline double truncated_gaussian(double r, double support, double shape) {
  if (r >= support) return 0.0;
  const double tail = std::exp(-(support / shape) * (support / shape));
  return (std::exp(-(r / shape) * (r / shape)) - tail) / (1.0 - tail);
}

/// d/dr of truncated_gaussian inside the support.
inline double truncated_gaussian_derivative(double r, double support, double shape) {
  if (r >= support) return 0.0;
  const double tail = std::exp(-(support / shape) * (support / shape));
  return -2.0 * r / (shape * shape) * std::exp(-(r / shape) * (r / shape)) / (1.0 - tail);
}

/// Relative band below delta treated as outside the support, so nodes at distance delta up to round-off are excluded.
inline constexpr double support_tolerance = 1e-12;

inline double gaussian_weight(const WeightConfig& cfg, double r) {
  if (r < 0.0) throw InvalidArgument("weight distance must be non-negative");
  if (r >= cfg.support() * (1.0 - support_tolerance)) return 0.0;
  return truncated_gaussian(r, cfg.support(), cfg.shape());
}

/// A linear functional evaluated on every basis polynomial, with the basis it refers to.
struct FunctionalVec {
  Eigen::VectorXd values;
  Point shift = Point::Zero();
  int degree = 0;

  FunctionalVec() = default;
  FunctionalVec(const PolyBasis& basis, Eigen::VectorXd v)
      : values(std::move(v)), shift(basis.shift()), degree(basis.degree()) {
    if (static_cast<std::size_t>(values.size()) != basis.size()) {
      throw InvalidArgument("functional vector length does not match the basis dimension");
    }
  }
  static FunctionalVec zero(const PolyBasis& basis) {
    return FunctionalVec(basis, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size())));
  }

  FunctionalVec& operator+=(const FunctionalVec& o) {
    values += o.values;
    return *this;
  }
  FunctionalVec operator*(double s) const {
    FunctionalVec r = *this;
    r.values *= s;
    return r;
  }
  FunctionalVec operator-() const { return *this * -1.0; }
  friend FunctionalVec operator+(FunctionalVec a, const FunctionalVec& b) { return a += b; }
  friend FunctionalVec operator-(FunctionalVec a, const FunctionalVec& b) { return a += -b; }

  bool all_finite() const { return values.allFinite(); }
};

/// Sparse row: sum_j values[j] * u(x_{indices[j]}).
struct CoefficientRow {
  std::vector<std::size_t> indices;
  Eigen::VectorXd values;

  double apply(std::span<const double> nodal) const {
    double s = 0.0;
    for (std::size_t j = 0; j < indices.size(); ++j) s += values[static_cast<Eigen::Index>(j)] * nodal[indices[j]];
    return s;
  }
  double apply(const Eigen::VectorXd& nodal) const {
    return apply(std::span<const double>(nodal.data(), static_cast<std::size_t>(nodal.size())));
  }
};

inline constexpr double default_condition_limit = 1e12;

/// Local node subset with the factorized moment matrix M = P W P^T.
class GmlsStencil {
 public:
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const PolyBasis& basis() const noexcept { return basis_; }
  /// Q x n matrix of basis values at the stencil nodes.
  const Eigen::MatrixXd& basis_matrix() const noexcept { return P_; }
  const Eigen::VectorXd& weights() const noexcept { return w_; }
  double condition_estimate() const noexcept { return condition_; }
  std::size_t center_index() const noexcept { return center_index_; }

  /// a = W P^T M^{-1} lambda(P), refined against the residual lambda - P a; the factorization is shared by every call.
  Eigen::VectorXd coefficients(const FunctionalVec& f) const {
    if (f.degree != basis_.degree() || f.shift != basis_.shift()) {
      throw InvalidArgument("functional was evaluated on a different basis than the stencil's");
    }
    if (!f.all_finite()) throw InvalidArgument("functional vector has non-finite entries");
    return solve(f.values);
  }

  CoefficientRow row(const FunctionalVec& f) const { return {indices_, coefficients(f)}; }

 private:
  friend GmlsStencil build_stencil(const NodeSet&, const BucketGrid&, const Point&, const PolyBasis&,
                                   const WeightConfig&, std::size_t, double);

  explicit GmlsStencil(PolyBasis basis) : basis_(std::move(basis)) {}

  Eigen::VectorXd solve(const Eigen::VectorXd& lambda) const {
    Eigen::VectorXd y = llt_.solve(lambda);
    Eigen::VectorXd a = w_.cwiseProduct(P_.transpose() * y);
    for (int it = 0; it < refinement_steps; ++it) {
      y = llt_.solve(lambda - P_ * a);
      a += w_.cwiseProduct(P_.transpose() * y);
    }
    return a;
  }

  std::vector<std::size_t> indices_;
  PolyBasis basis_;
  Eigen::MatrixXd P_;
  Eigen::VectorXd w_;
  static constexpr int refinement_steps = 2;

  Eigen::LLT<Eigen::MatrixXd> llt_;
  double condition_ = 0.0;
  std::size_t center_index_ = no_node;
};

/// Stencil over the nodes with positive weight around `center`.
///
/// Throws StencilDeficient when fewer than Q such nodes exist and
/// IllConditioned when M is not numerically positive definite or its
/// condition estimate exceeds `condition_limit`.
inline GmlsStencil build_stencil(const NodeSet& nodes, const BucketGrid& grid, const Point& center,
                                 const PolyBasis& basis, const WeightConfig& cfg, std::size_t center_index = no_node,
                                 double condition_limit = default_condition_limit) {
  cfg.validate();
  GmlsStencil st(basis);
  st.center_index_ = center_index;
  const double delta = cfg.support();
  const auto candidates = grid.within(center, delta);
  std::vector<double> w;
  for (std::size_t j : candidates) {
    const double wj = gaussian_weight(cfg, (nodes.point(j) - center).norm());
    if (wj > 0.0) {
      st.indices_.push_back(j);
      w.push_back(wj);
    }
  }
  const std::size_t q = basis.size();
  const std::size_t n = st.indices_.size();
  if (n < q) throw StencilDeficient(center_index, n, q);
  st.w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
  st.P_.resize(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) basis.values_into(nodes.point(st.indices_[j]), st.P_.col(static_cast<Eigen::Index>(j)));
  st.llt_.compute(st.P_ * st.w_.asDiagonal() * st.P_.transpose());
  if (st.llt_.info() != Eigen::Success) {
    throw IllConditioned(center_index, n, q, std::numeric_limits<double>::infinity(), condition_limit);
  }
  const double rcond = st.llt_.rcond();
  st.condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(st.condition_ <= condition_limit)) throw IllConditioned(center_index, n, q, st.condition_, condition_limit);
  return st;
}

inline GmlsStencil build_stencil(const NodeSet& nodes, const Point& center, const PolyBasis& basis,
                                 const WeightConfig& cfg, std::size_t center_index = no_node,
                                 double condition_limit = default_condition_limit) {
  return build_stencil(nodes, BucketGrid(nodes, cfg.support()), center, basis, cfg, center_index, condition_limit);
}

inline Eigen::VectorXd solve_coefficients(const GmlsStencil& st, const FunctionalVec& f) { return st.coefficients(f); }

/// Point evaluation at x (the basis is re-centered at x).
inline CoefficientRow point_value_row(const NodeSet& nodes, const BucketGrid& grid, const Point& x,
                                      const PolyBasis& basis, const WeightConfig& cfg,
                                      std::size_t center_index = no_node,
                                      double condition_limit = default_condition_limit) {
  const PolyBasis local = basis.recentered(x);
  const GmlsStencil st = build_stencil(nodes, grid, x, local, cfg, center_index, condition_limit);
  return st.row(FunctionalVec(local, local.values(x)));
}

inline CoefficientRow point_value_row(const NodeSet& nodes, const Point& x, const PolyBasis& basis,
                                      const WeightConfig& cfg) {
  return point_value_row(nodes, BucketGrid(nodes, cfg.support()), x, basis, cfg);
}

/// Diffuse derivative rows at x: first partial along axis 0/1, or the Laplacian.
enum class DerivativeKind { Dx1, Dx2, Laplacian };

inline CoefficientRow derivative_row(const NodeSet& nodes, const BucketGrid& grid, const Point& x,
                                     const PolyBasis& basis, const WeightConfig& cfg, DerivativeKind kind) {
  const PolyBasis local = basis.recentered(x);
  const GmlsStencil st = build_stencil(nodes, grid, x, local, cfg);
  Eigen::VectorXd lambda;
  switch (kind) {
    case DerivativeKind::Dx1: lambda = local.gradients(x).col(0); break;
    case DerivativeKind::Dx2: lambda = local.gradients(x).col(1); break;
    case DerivativeKind::Laplacian: lambda = local.laplacians(x); break;
  }
  return st.row(FunctionalVec(local, std::move(lambda)));
}

}  // namespace dmlpg

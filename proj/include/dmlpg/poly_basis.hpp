#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"

namespace dmlpg {

using Exponent = std::array<int, 2>;

/// Multi-indices with total degree <= m, graded lexicographic:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
inline std::vector<Exponent> multi_indices(int m) {
  std::vector<Exponent> out;
  for (int deg = 0; deg <= m; ++deg) {
    for (int a = deg; a >= 0; --a) out.push_back({a, deg - a});
  }
  return out;
}

inline constexpr std::size_t basis_dimension(int m) {
  return static_cast<std::size_t>((m + 1) * (m + 2) / 2);
}

/// Shifted-scaled monomials ((x - z) / h)^beta, |beta| <= m.
class PolyBasis {
 public:
  static constexpr int max_degree = 12;

  PolyBasis(int degree, Point shift, double scale)
      : degree_(degree), shift_(std::move(shift)), scale_(scale), exponents_(multi_indices(degree)) {
    if (degree < 0 || degree > max_degree) throw InvalidArgument("polynomial degree must lie in [0, 12]");
    if (!(scale > 0.0)) throw InvalidArgument("basis scale must be positive");
  }

  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return exponents_.size(); }
  const Point& shift() const noexcept { return shift_; }
  double scale() const noexcept { return scale_; }
  const std::vector<Exponent>& exponents() const noexcept { return exponents_; }

  PolyBasis recentered(const Point& z) const { return PolyBasis(degree_, z, scale_); }

  Eigen::VectorXd values(const Point& x) const {
    Eigen::VectorXd out(size());
    values_into(x, out);
    return out;
  }

  template <typename Out>
  void values_into(const Point& x, Out&& out) const {
    const auto [px, py] = powers(x);
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      out[j] = px[exponents_[j][0]] * py[exponents_[j][1]];
    }
  }

  /// Q x 2 matrix; row j is the gradient of basis j.
  Eigen::MatrixX2d gradients(const Point& x) const {
    Eigen::MatrixX2d out(size(), 2);
    const auto [px, py] = powers(x);
    const double inv = 1.0 / scale_;
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      const auto [a, b] = exponents_[j];
      out(j, 0) = a > 0 ? a * px[a - 1] * py[b] * inv : 0.0;
      out(j, 1) = b > 0 ? b * px[a] * py[b - 1] * inv : 0.0;
    }
    return out;
  }

  Eigen::VectorXd laplacians(const Point& x) const {
    Eigen::VectorXd out(size());
    const auto [px, py] = powers(x);
    const double inv2 = 1.0 / (scale_ * scale_);
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      const auto [a, b] = exponents_[j];
      double v = 0.0;
      if (a > 1) v += a * (a - 1) * px[a - 2] * py[b];
      if (b > 1) v += b * (b - 1) * px[a] * py[b - 2];
      out[j] = v * inv2;
    }
    return out;
  }

 private:
  using Powers = std::array<double, max_degree + 1>;

  std::array<Powers, 2> powers(const Point& x) const {
    const double xi = (x.x() - shift_.x()) / scale_;
    const double eta = (x.y() - shift_.y()) / scale_;
    std::array<Powers, 2> p{};
    p[0][0] = p[1][0] = 1.0;
    for (int k = 1; k <= degree_; ++k) {
      p[0][k] = p[0][k - 1] * xi;
      p[1][k] = p[1][k - 1] * eta;
    }
    return p;
  }

  int degree_;
  Point shift_;
  double scale_;
  std::vector<Exponent> exponents_;
};

inline Eigen::VectorXd eval_basis(const PolyBasis& basis, const Point& x) { return basis.values(x); }
inline Eigen::MatrixX2d eval_gradient(const PolyBasis& basis, const Point& x) { return basis.gradients(x); }
inline Eigen::VectorXd eval_laplacian(const PolyBasis& basis, const Point& x) { return basis.laplacians(x); }

}  // namespace dmlpg

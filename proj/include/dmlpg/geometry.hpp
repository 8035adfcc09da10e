#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "dmlpg/errors.hpp"

namespace dmlpg {

using Point = Eigen::Vector2d;

enum class BoundaryCondition { Dirichlet, Neumann };

/// Sides of a rectangle, counterclockwise starting at the bottom (x2 = min).
enum class Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr std::array<Side, 4> all_sides{Side::Bottom, Side::Right, Side::Top, Side::Left};

inline std::string to_string(Side s) {
  switch (s) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
  }
  return "?";
}

/// Axis-aligned rectangle with one boundary condition per side.
struct DomainSpec {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
  std::array<BoundaryCondition, 4> conditions{BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet,
                                               BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet};

  static DomainSpec rectangle(double xmin, double xmax, double ymin, double ymax,
                              std::array<BoundaryCondition, 4> conditions) {
    DomainSpec d{xmin, xmax, ymin, ymax, conditions};
    d.validate();
    return d;
  }

  void validate() const {
    if (!(xmax > xmin) || !(ymax > ymin) || !std::isfinite(xmin) || !std::isfinite(xmax) ||
        !std::isfinite(ymin) || !std::isfinite(ymax)) {
      throw InvalidArgument("domain rectangle must have positive finite extent");
    }
  }

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }

  BoundaryCondition condition(Side s) const { return conditions[static_cast<int>(s)]; }

  Point outward_normal(Side s) const {
    switch (s) {
      case Side::Bottom: return {0.0, -1.0};
      case Side::Right: return {1.0, 0.0};
      case Side::Top: return {0.0, 1.0};
      case Side::Left: return {-1.0, 0.0};
    }
    return {0.0, 0.0};
  }

  /// Distance from p to the line carrying side s, positive inside the rectangle.
  double inner_distance(const Point& p, Side s) const {
    switch (s) {
      case Side::Bottom: return p.y() - ymin;
      case Side::Right: return xmax - p.x();
      case Side::Top: return ymax - p.y();
      case Side::Left: return p.x() - xmin;
    }
    return 0.0;
  }

  /// Start and end corner of side s in counterclockwise order.
  std::array<Point, 2> side_endpoints(Side s) const {
    switch (s) {
      case Side::Bottom: return {Point{xmin, ymin}, Point{xmax, ymin}};
      case Side::Right: return {Point{xmax, ymin}, Point{xmax, ymax}};
      case Side::Top: return {Point{xmax, ymax}, Point{xmin, ymax}};
      case Side::Left: return {Point{xmin, ymax}, Point{xmin, ymin}};
    }
    return {Point::Zero(), Point::Zero()};
  }

  bool contains(const Point& p, double tol = 0.0) const {
    return p.x() >= xmin - tol && p.x() <= xmax + tol && p.y() >= ymin - tol && p.y() <= ymax + tol;
  }
};

/// Counterclockwise unit tangent for a boundary with outward normal n.
inline Point ccw_tangent(const Point& n) { return {-n.y(), n.x()}; }

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace dmlpg

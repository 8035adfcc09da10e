#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"
#include "dmlpg/node_set.hpp"

namespace dmlpg {

enum class SubdomainShape { Ball, Square };

enum class PieceTag { InteriorBoundary, OnDirichlet, OnNeumann };

/// Straight boundary piece traversed from a to b, region on the left.
struct Segment {
  Point a;
  Point b;

  double length() const { return (b - a).norm(); }
  Point tangent() const { return (b - a).normalized(); }
  Point outward_normal() const {
    const Point t = tangent();
    return {t.y(), -t.x()};
  }
};

/// Circular boundary piece traversed counterclockwise from theta_begin to theta_end.
struct Arc {
  Point center;
  double radius;
  double theta_begin;
  double theta_end;

  double sweep() const { return theta_end - theta_begin; }
  double length() const { return radius * sweep(); }
  bool full_circle() const { return sweep() >= two_pi * (1.0 - 1e-14); }
  Point at(double theta) const { return center + radius * Point(std::cos(theta), std::sin(theta)); }
};

struct BoundaryPiece {
  std::variant<Segment, Arc> geometry;
  PieceTag tag;

  double length() const {
    return std::visit([](const auto& g) { return g.length(); }, geometry);
  }
  bool is_arc() const { return std::holds_alternative<Arc>(geometry); }
};

/// Local subdomain: shape centered at a node, intersected with the closed domain.
struct Subdomain {
  std::size_t center_index = no_node;
  Point center;
  SubdomainShape shape = SubdomainShape::Ball;
  double size = 0.0;  ///< ball radius, or square side length
  std::vector<BoundaryPiece> pieces;

  double perimeter() const {
    double p = 0.0;
    for (const auto& piece : pieces) p += piece.length();
    return p;
  }
};

namespace detail {

inline PieceTag tag_for(const DomainSpec& domain, Side s) {
  return domain.condition(s) == BoundaryCondition::Dirichlet ? PieceTag::OnDirichlet : PieceTag::OnNeumann;
}

inline double wrap_angle(double a) {
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

inline double normal_angle(Side s) {
  switch (s) {
    case Side::Right: return 0.0;
    case Side::Top: return 0.5 * std::numbers::pi;
    case Side::Left: return std::numbers::pi;
    case Side::Bottom: return 1.5 * std::numbers::pi;
  }
  return 0.0;
}

inline Subdomain clip_ball(const DomainSpec& domain, const Point& c, double r0) {
  Subdomain sub;
  sub.center = c;
  sub.shape = SubdomainShape::Ball;
  sub.size = r0;
  const double tol = 1e-14 * r0;

  // Arcs: the circle minus the angular windows that leave the rectangle.
  std::vector<std::pair<double, double>> outside;
  for (Side s : all_sides) {
    const double d = std::max(0.0, domain.inner_distance(c, s));
    if (d >= r0) continue;
    const double half = std::acos(d / r0);
    const double lo = wrap_angle(normal_angle(s) - half);
    const double hi = lo + 2.0 * half;
    if (hi > two_pi) {
      outside.emplace_back(lo, two_pi);
      outside.emplace_back(0.0, hi - two_pi);
    } else {
      outside.emplace_back(lo, hi);
    }
  }
  std::sort(outside.begin(), outside.end());
  std::vector<std::pair<double, double>> inside;
  double cursor = 0.0;
  for (const auto& [lo, hi] : outside) {
    if (lo > cursor) inside.emplace_back(cursor, lo);
    cursor = std::max(cursor, hi);
  }
  if (cursor < two_pi) inside.emplace_back(cursor, two_pi);
  // Join the piece ending at 2*pi with the one starting at 0.
  if (inside.size() >= 2 && inside.front().first == 0.0 && inside.back().second == two_pi) {
    inside.back().second = two_pi + inside.front().second;
    inside.erase(inside.begin());
  }
  for (const auto& [lo, hi] : inside) {
    if ((hi - lo) * r0 > tol) {
      sub.pieces.push_back({Arc{c, r0, lo, hi}, PieceTag::InteriorBoundary});
    }
  }

  // Segments: each side clipped to the disk.
  for (Side s : all_sides) {
    const double d = std::max(0.0, domain.inner_distance(c, s));
    if (d >= r0) continue;
    const auto [p0, p1] = domain.side_endpoints(s);
    const Point dir = p1 - p0;
    const double len = dir.norm();
    const Point t = dir / len;
    // |p0 + u t - c|^2 <= r0^2
    const Point w = p0 - c;
    const double b = w.dot(t);
    const double disc = b * b - (w.squaredNorm() - r0 * r0);
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    const double u0 = std::max(0.0, -b - root);
    const double u1 = std::min(len, -b + root);
    if (u1 - u0 > tol) {
      sub.pieces.push_back({Segment{p0 + u0 * t, p0 + u1 * t}, tag_for(domain, s)});
    }
  }
  return sub;
}

inline Subdomain clip_square(const DomainSpec& domain, const Point& c, double side) {
  Subdomain sub;
  sub.center = c;
  sub.shape = SubdomainShape::Square;
  sub.size = side;
  const double half = 0.5 * side;
  const double x0 = std::max(domain.xmin, c.x() - half), x1 = std::min(domain.xmax, c.x() + half);
  const double y0 = std::max(domain.ymin, c.y() - half), y1 = std::min(domain.ymax, c.y() + half);
  const DomainSpec box{x0, x1, y0, y1, domain.conditions};
  for (Side s : all_sides) {
    const auto [a, b] = box.side_endpoints(s);
    const bool on_domain = std::abs(domain.inner_distance(a, s)) <= 1e-14 * std::max(1.0, side) &&
                           std::abs(domain.inner_distance(b, s)) <= 1e-14 * std::max(1.0, side);
    sub.pieces.push_back({Segment{a, b}, on_domain ? tag_for(domain, s) : PieceTag::InteriorBoundary});
  }
  return sub;
}

}  // namespace detail

/// Clip a ball of radius r0 (or a square of side r0) centered at `center` to the domain.
inline Subdomain clip_subdomain(const DomainSpec& domain, const Point& center, SubdomainShape shape, double r0,
                                std::size_t center_index = no_node) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw InvalidArgument("subdomain size r0 must be positive");
  if (!domain.contains(center, 1e-12 * r0)) throw InvalidArgument("subdomain center lies outside the domain");
  Point c = center;
  c.x() = std::clamp(c.x(), domain.xmin, domain.xmax);
  c.y() = std::clamp(c.y(), domain.ymin, domain.ymax);
  Subdomain sub = shape == SubdomainShape::Ball ? detail::clip_ball(domain, c, r0) : detail::clip_square(domain, c, r0);
  sub.center_index = center_index;
  return sub;
}

inline Subdomain clip_subdomain(const NodeSet& nodes, std::size_t k, SubdomainShape shape, double r0) {
  return clip_subdomain(nodes.domain(), nodes.point(k), shape, r0, k);
}

}  // namespace dmlpg

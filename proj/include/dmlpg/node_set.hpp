#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"

namespace dmlpg {

enum class NodeTag { Interior, Dirichlet, Neumann };

inline std::string to_string(NodeTag t) {
  switch (t) {
    case NodeTag::Interior: return "interior";
    case NodeTag::Dirichlet: return "dirichlet";
    case NodeTag::Neumann: return "neumann";
  }
  return "?";
}

/// Relative tolerance (times the spacing) for deciding that a node lies on a side.
inline constexpr double boundary_tolerance = 1e-12;

/// Scattered nodes of a rectangular domain with boundary classification.
///
/// Immutable after construction. A node lying on several sides (a corner) is
/// Dirichlet if any of those sides is Dirichlet, Neumann otherwise.
class NodeSet {
 public:
  NodeSet(DomainSpec domain, std::vector<Point> points, double spacing)
      : domain_(domain), points_(std::move(points)), spacing_(spacing) {
    domain_.validate();
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
      throw InvalidArgument("node spacing must be positive");
    }
    const double tol = boundary_tolerance * spacing_;
    tags_.reserve(points_.size());
    side_masks_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Point& p = points_[i];
      if (!p.allFinite() || !domain_.contains(p, tol)) {
        throw InvalidArgument("node " + std::to_string(i) + " lies outside the domain");
      }
      unsigned mask = 0;
      for (Side s : all_sides) {
        if (std::abs(domain_.inner_distance(p, s)) <= tol) mask |= 1u << static_cast<int>(s);
      }
      side_masks_.push_back(mask);
      tags_.push_back(classify(mask));
    }
  }

  std::size_t size() const noexcept { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }
  NodeTag tag(std::size_t i) const { return tags_[i]; }
  std::span<const NodeTag> tags() const noexcept { return tags_; }
  double spacing() const noexcept { return spacing_; }
  const DomainSpec& domain() const noexcept { return domain_; }

  bool on_side(std::size_t i, Side s) const { return (side_masks_[i] >> static_cast<int>(s)) & 1u; }

  std::size_t side_count(std::size_t i) const {
    std::size_t n = 0;
    for (Side s : all_sides) n += on_side(i, s) ? 1 : 0;
    return n;
  }

  /// Unit outward normal at a boundary node; averaged over sides at corners.
  Point outward_normal(std::size_t i) const {
    Point n = Point::Zero();
    for (Side s : all_sides) {
      if (on_side(i, s)) n += domain_.outward_normal(s);
    }
    const double len = n.norm();
    return len > 0.0 ? Point(n / len) : n;
  }

  /// Outward normal of the Neumann side(s) the node lies on.
  Point neumann_normal(std::size_t i) const {
    Point n = Point::Zero();
    for (Side s : all_sides) {
      if (on_side(i, s) && domain_.condition(s) == BoundaryCondition::Neumann) n += domain_.outward_normal(s);
    }
    const double len = n.norm();
    return len > 0.0 ? Point(n / len) : n;
  }

  std::size_t count(NodeTag t) const { return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), t)); }

 private:
  NodeTag classify(unsigned mask) const {
    if (mask == 0) return NodeTag::Interior;
    for (Side s : all_sides) {
      if (((mask >> static_cast<int>(s)) & 1u) && domain_.condition(s) == BoundaryCondition::Dirichlet) {
        return NodeTag::Dirichlet;
      }
    }
    return NodeTag::Neumann;
  }

  DomainSpec domain_;
  std::vector<Point> points_;
  std::vector<NodeTag> tags_;
  std::vector<unsigned> side_masks_;
  double spacing_;
};

/// Tensor grid with spacing h including all four sides, numbered row by row (x fastest).
inline NodeSet make_regular_grid(const DomainSpec& domain, double h) {
  domain.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  auto divisions = [h](double length, const char* axis) {
    const double ratio = length / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(n * h - length) > 1e-12 * length) {
      throw InvalidArgument(std::string("grid spacing ") + std::to_string(h) + " does not divide the " + axis +
                            " extent " + std::to_string(length));
    }
    return static_cast<std::size_t>(n);
  };
  const std::size_t nx = divisions(domain.width(), "x1");
  const std::size_t ny = divisions(domain.height(), "x2");
  std::vector<Point> pts;
  pts.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = j == ny ? domain.ymax : domain.ymin + domain.height() * static_cast<double>(j) / ny;
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = i == nx ? domain.xmax : domain.xmin + domain.width() * static_cast<double>(i) / nx;
      pts.emplace_back(x, y);
    }
  }
  return NodeSet(domain, std::move(pts), h);
}

/// Uniform bucket grid for fixed-radius neighbor queries.
class BucketGrid {
 public:
  BucketGrid(std::span<const Point> points, double cell_size)
      : points_(points.begin(), points.end()), cell_(cell_size) {
    if (!(cell_ > 0.0)) throw InvalidArgument("bucket cell size must be positive");
    if (points_.empty()) {
      nx_ = ny_ = 1;
      origin_ = Point::Zero();
      start_.assign(2, 0);
      return;
    }
    Point lo = points_.front(), hi = points_.front();
    for (const Point& p : points_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    origin_ = lo;
    nx_ = static_cast<std::size_t>(std::floor((hi.x() - lo.x()) / cell_)) + 1;
    ny_ = static_cast<std::size_t>(std::floor((hi.y() - lo.y()) / cell_)) + 1;
    std::vector<std::size_t> counts(nx_ * ny_ + 1, 0);
    std::vector<std::size_t> cell_of(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cell_of[i] = cell_index(clamp_x(points_[i].x()), clamp_y(points_[i].y()));
      ++counts[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    start_ = counts;
    items_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) items_[counts[cell_of[i]]++] = i;
  }

  explicit BucketGrid(const NodeSet& nodes, double cell_size) : BucketGrid(nodes.points(), cell_size) {}

  /// Indices j with |x - x_j| <= radius, ascending.
  std::vector<std::size_t> within(const Point& x, double radius) const {
    if (radius < 0.0 || !std::isfinite(radius)) throw InvalidArgument("query radius must be non-negative");
    std::vector<std::size_t> out;
    if (points_.empty()) return out;
    const long ix0 = clamp_x(x.x() - radius), ix1 = clamp_x(x.x() + radius);
    const long iy0 = clamp_y(x.y() - radius), iy1 = clamp_y(x.y() + radius);
    const double r2 = radius * radius;
    for (long iy = iy0; iy <= iy1; ++iy) {
      for (long ix = ix0; ix <= ix1; ++ix) {
        const std::size_t c = cell_index(ix, iy);
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
          const std::size_t j = items_[k];
          if ((points_[j] - x).squaredNorm() <= r2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  double cell_size() const noexcept { return cell_; }

 private:
  long clamp_x(double x) const { return clamp_axis((x - origin_.x()) / cell_, nx_); }
  long clamp_y(double y) const { return clamp_axis((y - origin_.y()) / cell_, ny_); }
  static long clamp_axis(double v, std::size_t n) {
    const double f = std::floor(v);
    if (!(f > 0.0)) return 0;
    return f >= static_cast<double>(n - 1) ? static_cast<long>(n - 1) : static_cast<long>(f);
  }
  std::size_t cell_index(long ix, long iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

  std::vector<Point> points_;
  double cell_;
  Point origin_;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

inline std::vector<std::size_t> neighbors_within(const BucketGrid& grid, const Point& x, double radius) {
  return grid.within(x, radius);
}

/// One-off query; builds a bucket grid with cell size max(radius, spacing).
inline std::vector<std::size_t> neighbors_within(const NodeSet& nodes, const Point& x, double radius) {
  if (radius < 0.0) throw InvalidArgument("query radius must be non-negative");
  return BucketGrid(nodes, std::max(radius, nodes.spacing())).within(x, radius);
}

/// Debug dump: header `x1,x2,tag`, one node per line.
inline void write_csv(std::ostream& os, const NodeSet& nodes) {
  os << "x1,x2,tag\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    os << nodes.point(i).x() << ',' << nodes.point(i).y() << ',' << to_string(nodes.tag(i)) << '\n';
  }
  os.precision(old);
}

}  // namespace dmlpg

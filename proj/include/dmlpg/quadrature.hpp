#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"
#include "dmlpg/subdomain.hpp"

namespace dmlpg {

/// Points and positive weights; integrates g by sum_i w_i g(x_i).
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const noexcept { return points.size(); }

  double measure() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
  }

  void append(const QuadratureRule& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }
};

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline GaussRule1D compute_gauss_legendre(int n) {
  GaussRule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    r.nodes[i] = 0.5 * (1.0 - x);
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = r.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.5;
  return r;
}

}  // namespace detail

inline constexpr int max_tabulated_gauss = 128;

/// n-point Gauss-Legendre rule on [0, 1], exact for degree 2n - 1.
inline const GaussRule1D& gauss_legendre(int n) {
  static const std::vector<GaussRule1D> table = [] {
    std::vector<GaussRule1D> t(max_tabulated_gauss + 1);
    for (int k = 1; k <= max_tabulated_gauss; ++k) t[k] = detail::compute_gauss_legendre(k);
    return t;
  }();
  if (n < 1 || n > max_tabulated_gauss) throw InvalidArgument("Gauss-Legendre order must lie in [1, 128]");
  return table[n];
}

/// Rule for the log-weighted unit integral int_0^1 ln(1/s) F(s) ds.
///
/// Uses int_0^1 ln(1/s) F(s) ds = int_0^1 int_0^1 F(u v) du dv, so the
/// n x n Gauss product is exact for polynomial F of degree <= 2n - 1.
inline const GaussRule1D& log_weighted_unit_rule(int n) {
  static const std::vector<GaussRule1D> table = [] {
    std::vector<GaussRule1D> t(33);
    for (int k = 1; k <= 32; ++k) {
      const auto& g = gauss_legendre(k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          t[k].nodes.push_back(g.nodes[i] * g.nodes[j]);
          t[k].weights.push_back(g.weights[i] * g.weights[j]);
        }
      }
    }
    return t;
  }();
  if (n < 1 || n > 32) throw InvalidArgument("log-weighted rule order must lie in [1, 32]");
  return table[n];
}

/// Orders used by the region and boundary rules.
struct QuadOrders {
  int radial = 12;   ///< Gauss points along rays from the subdomain center
  int angular = 16;  ///< trapezoid points around a full circle; half as many Gauss points per panel of a partial sector
  int segment = 12;  ///< Gauss points per straight boundary piece
  int square = 10;   ///< tensor Gauss points per direction on square subdomains

  void validate() const {
    if (radial < 1 || radial > 32 || angular < 1 || angular > 128 || segment < 1 || segment > 128 || square < 1 ||
        square > 128) {
      throw InvalidArgument("quadrature orders out of range");
    }
  }
};

/// Widest angular panel of a partial sector; wider sectors are split evenly.
inline constexpr double max_angular_panel = 0.25 * std::numbers::pi;

inline QuadratureRule gauss_segment(const Point& a, const Point& b, int n) {
  if (n < 1) throw InvalidArgument("segment rule needs n >= 1");
  const auto& g = gauss_legendre(n);
  const double len = (b - a).norm();
  QuadratureRule r;
  r.exactness_degree = 2 * n - 1;
  r.points.reserve(n);
  r.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    r.points.push_back(a + g.nodes[i] * (b - a));
    r.weights.push_back(g.weights[i] * len);
  }
  return r;
}

/// Gauss rule on a segment, with panels graded toward the foot of the perpendicular from c.
///
/// Each panel is no longer than max(distance of its near end from the foot, distance of c
/// from the line), so integrands with a near singularity at c converge at the same rate on
/// every panel.
inline QuadratureRule graded_segment_rule(const Segment& seg, const Point& c, int n) {
  const double len = seg.length();
  if (!(len > 0.0)) throw EmptyRegion("segment of zero length");
  const Point t = (seg.b - seg.a) / len;
  const Point rel = c - seg.a;
  const double foot = std::clamp(rel.dot(t), 0.0, len);
  const double d = std::abs(rel.x() * t.y() - rel.y() * t.x());
  const double min_panel = std::max(d, 1e-3 * len);
  QuadratureRule r;
  r.exactness_degree = 2 * n - 1;
  // Walk away from the foot on both sides: [foot, 0] and [foot, len].
  for (const double end : {0.0, len}) {
    const double span = std::abs(end - foot);
    const double dir = end < foot ? -1.0 : 1.0;
    double s0 = 0.0;
    while (s0 < span * (1.0 - 1e-14)) {
      const double s1 = std::min(span, s0 + std::max(s0, min_panel));
      const Point a = seg.a + (foot + dir * s0) * t, b = seg.a + (foot + dir * s1) * t;
      r.append(gauss_segment(a, b, n));
      s0 = s1;
    }
  }
  if (r.points.empty()) throw EmptyRegion("segment of zero length");
  return r;
}

/// Full disk: Gauss in r (with the polar Jacobian) times the periodic trapezoid rule in theta.
inline QuadratureRule disk_rule(const Point& center, double r0, int n_r, int n_theta) {
  if (!(r0 > 0.0)) throw EmptyRegion("disk of non-positive radius");
  if (n_r < 1 || n_theta < 1) throw InvalidArgument("disk rule needs positive orders");
  const auto& g = gauss_legendre(n_r);
  QuadratureRule r;
  r.exactness_degree = std::min(2 * n_r - 2, n_theta - 1);
  const double dtheta = two_pi / n_theta;
  for (int j = 0; j < n_theta; ++j) {
    const double th = j * dtheta;
    const Point dir(std::cos(th), std::sin(th));
    for (int i = 0; i < n_r; ++i) {
      const double rad = r0 * g.nodes[i];
      r.points.push_back(center + rad * dir);
      r.weights.push_back(g.weights[i] * r0 * rad * dtheta);
    }
  }
  return r;
}

namespace detail {

/// Angular nodes/weights over [a, b]: trapezoid for a full turn, panelled Gauss otherwise.
inline void angular_rule(double a, double b, int n_angular, std::vector<double>& th, std::vector<double>& w) {
  const double sweep = b - a;
  if (sweep >= two_pi * (1.0 - 1e-14)) {
    for (int j = 0; j < n_angular; ++j) {
      th.push_back(a + j * two_pi / n_angular);
      w.push_back(two_pi / n_angular);
    }
    return;
  }
  const int panels = std::max(1, static_cast<int>(std::ceil(sweep / max_angular_panel - 1e-12)));
  const double width = sweep / panels;
  const int per_panel = std::max(4, n_angular / 2);
  const auto& g = gauss_legendre(per_panel);
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < per_panel; ++j) {
      th.push_back(a + (p + g.nodes[j]) * width);
      w.push_back(g.weights[j] * width);
    }
  }
}

}  // namespace detail

/// Circular sector of radius r between angles a < b.
inline QuadratureRule sector_rule(const Point& center, double radius, double a, double b, int n_r, int n_angular) {
  if (!(radius > 0.0) || !(b > a)) throw EmptyRegion("sector of zero measure");
  std::vector<double> th, wth;
  detail::angular_rule(a, b, n_angular, th, wth);
  const auto& g = gauss_legendre(n_r);
  QuadratureRule r;
  r.exactness_degree = 2 * n_r - 2;
  for (std::size_t j = 0; j < th.size(); ++j) {
    const Point dir(std::cos(th[j]), std::sin(th[j]));
    for (int i = 0; i < n_r; ++i) {
      const double rad = radius * g.nodes[i];
      r.points.push_back(center + rad * dir);
      r.weights.push_back(g.weights[i] * radius * rad * wth[j]);
    }
  }
  return r;
}

/// Triangle (apex, a, b) through the collapsed map apex + s((a - apex) + t(b - a)).
inline QuadratureRule triangle_rule(const Point& apex, const Point& a, const Point& b, int n_s, int n_t) {
  const Point e1 = a - apex, e2 = b - a;
  const double jac = std::abs(e1.x() * (b - apex).y() - e1.y() * (b - apex).x());
  if (!(jac > 0.0)) throw EmptyRegion("degenerate triangle");
  const auto& gs = gauss_legendre(n_s);
  const auto& gt = gauss_legendre(n_t);
  QuadratureRule r;
  r.exactness_degree = std::min(2 * n_s - 2, 2 * n_t - 1);
  for (int i = 0; i < n_s; ++i) {
    for (int j = 0; j < n_t; ++j) {
      const double s = gs.nodes[i], t = gt.nodes[j];
      r.points.push_back(apex + s * (e1 + t * e2));
      r.weights.push_back(gs.weights[i] * gt.weights[j] * s * jac);
    }
  }
  return r;
}

/// Tensor Gauss rule on an axis-aligned rectangle.
inline QuadratureRule rectangle_rule(const Point& lo, const Point& hi, int n) {
  const double wx = hi.x() - lo.x(), wy = hi.y() - lo.y();
  if (!(wx > 0.0) || !(wy > 0.0)) throw EmptyRegion("rectangle of zero measure");
  const auto& g = gauss_legendre(n);
  QuadratureRule r;
  r.exactness_degree = 2 * n - 1;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      r.points.emplace_back(lo.x() + g.nodes[i] * wx, lo.y() + g.nodes[j] * wy);
      r.weights.push_back(g.weights[i] * g.weights[j] * wx * wy);
    }
  }
  return r;
}

/// Arc-length rule along a circular arc.
inline QuadratureRule arc_rule(const Arc& arc, int n_angular) {
  if (!(arc.radius > 0.0) || !(arc.sweep() > 0.0)) throw EmptyRegion("arc of zero length");
  std::vector<double> th, w;
  detail::angular_rule(arc.theta_begin, arc.theta_end, n_angular, th, w);
  QuadratureRule r;
  r.exactness_degree = n_angular - 1;
  for (std::size_t j = 0; j < th.size(); ++j) {
    r.points.push_back(arc.at(th[j]));
    r.weights.push_back(w[j] * arc.radius);
  }
  return r;
}

/// Line rule for one boundary piece.
inline QuadratureRule boundary_piece_rule(const BoundaryPiece& piece, const QuadOrders& q) {
  if (const auto* arc = std::get_if<Arc>(&piece.geometry)) return arc_rule(*arc, q.angular);
  const auto& seg = std::get<Segment>(piece.geometry);
  if (!(seg.length() > 0.0)) throw EmptyRegion("segment of zero length");
  return gauss_segment(seg.a, seg.b, q.segment);
}

namespace detail {

inline bool collinear_with(const Segment& seg, const Point& c, double scale) {
  const Point e1 = seg.a - c, e2 = seg.b - c;
  return std::abs(e1.x() * e2.y() - e1.y() * e2.x()) <= 1e-13 * scale * scale;
}

}  // namespace detail

/// Area rule over a clipped subdomain.
///
/// Balls are split into sectors (one per arc) and triangles (one per straight
/// piece not passing through the center), all sharing the center as apex.
/// Squares use a tensor Gauss rule on the clipped rectangle.
inline QuadratureRule clipped_region_rule(const Subdomain& sub, const QuadOrders& q = {}) {
  QuadratureRule r;
  if (sub.shape == SubdomainShape::Square) {
    Point lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Point hi(std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest());
    for (const auto& piece : sub.pieces) {
      const auto& seg = std::get<Segment>(piece.geometry);
      lo = lo.cwiseMin(seg.a).cwiseMin(seg.b);
      hi = hi.cwiseMax(seg.a).cwiseMax(seg.b);
    }
    return rectangle_rule(lo, hi, q.square);
  }
  r.exactness_degree = std::min(2 * q.radial - 2, 2 * q.segment - 1);
  for (const auto& piece : sub.pieces) {
    if (const auto* arc = std::get_if<Arc>(&piece.geometry)) {
      r.append(arc->full_circle() ? disk_rule(sub.center, arc->radius, q.radial, q.angular)
                                  : sector_rule(sub.center, arc->radius, arc->theta_begin, arc->theta_end, q.radial,
                                                q.angular));
    } else {
      const auto& seg = std::get<Segment>(piece.geometry);
      if (detail::collinear_with(seg, sub.center, sub.size)) continue;
      r.append(triangle_rule(sub.center, seg.a, seg.b, q.radial, q.segment));
    }
  }
  if (r.points.empty()) throw EmptyRegion("subdomain has zero measure");
  return r;
}

/// Rule whose weights carry ln(r0 / |x - c|): sum_i w_i g(x_i) ~ int ln(r0/r) g dOmega.
///
/// The singular point c is the subdomain center and r0 its size. Along each
/// ray from c the log factor is split as ln(R/r) + ln(r0/R) with R the ray
/// length; the first part uses the log-weighted unit rule, the second Gauss.
inline QuadratureRule log_singular_rule(const Subdomain& sub, const QuadOrders& q = {}) {
  const double r0 = sub.size;
  const auto& lg = log_weighted_unit_rule(q.radial);
  const auto& g = gauss_legendre(q.radial);
  QuadratureRule r;
  r.exactness_degree = 2 * q.radial - 2;

  // Ray from c with direction dir and length R: int_0^R ln(r0/r) G(r) r dr.
  auto add_ray = [&](const Point& dir, double R, double w_dir) {
    for (std::size_t k = 0; k < lg.nodes.size(); ++k) {
      const double s = lg.nodes[k];
      r.points.push_back(sub.center + (R * s) * dir);
      r.weights.push_back(w_dir * R * R * lg.weights[k] * s);
    }
    const double shift = std::log(r0 / R);
    if (std::abs(shift) > 0.0) {
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double s = g.nodes[i];
        r.points.push_back(sub.center + (R * s) * dir);
        r.weights.push_back(w_dir * R * R * g.weights[i] * s * shift);
      }
    }
  };

  for (const auto& piece : sub.pieces) {
    if (const auto* arc = std::get_if<Arc>(&piece.geometry)) {
      std::vector<double> th, w;
      detail::angular_rule(arc->theta_begin, arc->theta_end, q.angular, th, w);
      for (std::size_t j = 0; j < th.size(); ++j) add_ray(Point(std::cos(th[j]), std::sin(th[j])), arc->radius, w[j]);
    } else {
      const auto& seg = std::get<Segment>(piece.geometry);
      if (detail::collinear_with(seg, sub.center, sub.size)) continue;
      // Triangle fan from the center: r dr dtheta = (d / rho^2) rho^2 s ds dtau along the segment.
      const double d = (seg.a - sub.center).dot(seg.outward_normal());
      const QuadratureRule along = graded_segment_rule(seg, sub.center, q.segment);
      for (std::size_t j = 0; j < along.size(); ++j) {
        const Point rel = along.points[j] - sub.center;
        const double rho = rel.norm();
        add_ray(rel / rho, rho, along.weights[j] * d / (rho * rho));
      }
    }
  }
  if (r.points.empty()) throw EmptyRegion("subdomain has zero measure");
  return r;
}

/// Full-disk log rule: int_{B(c, r0)} ln(r0/r) g dOmega.
inline QuadratureRule log_singular_rule(const Point& center, double r0, int n) {
  if (!(r0 > 0.0)) throw EmptyRegion("disk of non-positive radius");
  Subdomain disk;
  disk.center = center;
  disk.size = r0;
  disk.pieces.push_back({Arc{center, r0, 0.0, two_pi}, PieceTag::InteriorBoundary});
  QuadOrders q;
  q.radial = n;
  q.angular = 2 * n;
  return log_singular_rule(disk, q);
}

/// Rule for int_seg ln(r0 / |x - c|) g dGamma; the segment is split at the foot of c when c lies on it.
inline QuadratureRule log_segment_rule(const Segment& seg, const Point& c, double r0, int n) {
  const double len = seg.length();
  if (!(len > 0.0)) throw EmptyRegion("segment of zero length");
  const Point t = (seg.b - seg.a) / len;
  const Point rel = c - seg.a;
  double along = rel.dot(t);
  const double off = std::abs(rel.x() * t.y() - rel.y() * t.x());
  QuadratureRule r;
  r.exactness_degree = 2 * n - 2;
  const double tol = 1e-13 * std::max(len, r0);
  if (off > tol || along < -tol || along > len + tol) {
    const auto base = gauss_segment(seg.a, seg.b, n);
    for (std::size_t i = 0; i < base.size(); ++i) {
      r.points.push_back(base.points[i]);
      r.weights.push_back(base.weights[i] * std::log(r0 / (base.points[i] - c).norm()));
    }
    return r;
  }
  const auto& lg = log_weighted_unit_rule(n);
  const auto& g = gauss_legendre(n);
  along = std::clamp(along, 0.0, len);
  // Two legs starting at the singular point.
  for (const auto& [end, L] : {std::pair{seg.a, along}, std::pair{seg.b, len - along}}) {
    if (!(L > 0.0)) continue;
    const Point foot = seg.a + along * t;
    const Point dir = (end - foot) / L;
    for (std::size_t k = 0; k < lg.nodes.size(); ++k) {
      r.points.push_back(foot + (L * lg.nodes[k]) * dir);
      r.weights.push_back(L * lg.weights[k]);
    }
    const double shift = std::log(r0 / L);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      r.points.push_back(foot + (L * g.nodes[i]) * dir);
      r.weights.push_back(L * g.weights[i] * shift);
    }
  }
  return r;
}

}  // namespace dmlpg

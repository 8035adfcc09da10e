#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dmlpg/problems.hpp"
#include "dmlpg/weak_forms.hpp"

namespace {

using namespace dmlpg;

constexpr double h = 0.1;
constexpr double r0 = 0.7 * h;

// Steady problem whose exact solution is p(x) = c . basis(x), with kappa = 1 + x1 / 2.
struct PolynomialCase {
  PolyBasis basis;
  Eigen::VectorXd c;
  HeatProblem prob;
};

PolynomialCase polynomial_case(const Point& center, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PolynomialCase pc{PolyBasis(2, center, h), Eigen::VectorXd(6), {}};
  for (Eigen::Index i = 0; i < 6; ++i) pc.c[i] = u(rng);
  const PolyBasis b = pc.basis;
  const Eigen::VectorXd c = pc.c;
  HeatProblem& p = pc.prob;
  p.name = "poly";
  p.domain = unit_square_mixed();
  p.conductivity = [](const Point& x) { return 1.0 + 0.5 * x.x(); };
  p.conductivity_gradient = [](const Point&) { return Point(0.5, 0.0); };
  p.heat_capacity = [](const Point& x) { return 2.0 + x.y(); };
  p.source = [b, c](const Point& x, double) {
    const Point g = b.gradients(x).transpose() * c;
    return -(0.5 * g.x() + (1.0 + 0.5 * x.x()) * b.laplacians(x).dot(c));
  };
  p.neumann = [b, c](const Point& x, double) {
    const Point n = x.y() < 0.5 ? Point(0.0, -1.0) : Point(0.0, 1.0);
    const Point g = b.gradients(x).transpose() * c;
    return (1.0 + 0.5 * x.x()) * g.dot(n);
  };
  p.dirichlet = [b, c](const Point& x, double) { return b.values(x).dot(c); };
  p.initial = [b, c](const Point& x) { return b.values(x).dot(c); };
  return pc;
}

const std::vector<Point>& centers() {
  static const std::vector<Point> pts{Point(0.5, 0.5),  Point(0.5, 0.0),  Point(0.3, 1.0),  Point(0.5, 0.03),
                                      Point(0.04, 0.5), Point(0.0, 0.0),  Point(1.0, 1.0),  Point(0.0, 0.4),
                                      Point(0.96, 0.97), Point(0.05, 0.0)};
  return pts;
}

double residual_scale(const LocalWeakForm& wf, const Eigen::VectorXd& c, double load) {
  return std::max({std::abs(load), wf.stiffness.values.cwiseProduct(c).cwiseAbs().sum(), 1e-3});
}

TEST(CapacityFunctional, BumpOnInteriorDisk) {
  HeatProblem p = test_problem();
  const Subdomain sub = clip_subdomain(p.domain, Point(0.5, 0.5), SubdomainShape::Ball, r0);
  const PolyBasis basis(2, Point(0.5, 0.5), h);
  const FunctionalVec lam = capacity_functional(p, sub, basis, ConstantTest{});
  EXPECT_NEAR(lam.values[0], 2 * pi * pi * pi * r0 * r0, 1e-13);
  // radially symmetric bump: int phi r dr dtheta by a fine 1-D midpoint rule
  const GaussianBump bump{r0, 0.6 * h};
  double oracle = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * r0 / n;
    oracle += two_pi * bump.value(r) * r * r0 / n;
  }
  EXPECT_NEAR(capacity_functional(p, sub, basis, bump).values[0], 2 * pi * pi * oracle, 1e-10 * 2 * pi * pi * oracle);
  EXPECT_THROW(capacity_functional(p, sub, basis, Companion{r0}), InvalidArgument);
}

TEST(GradientFunctional, MatchesRefinedQuadrature) {
  HeatProblem p = test_problem();
  p.conductivity = [](const Point& x) { return 1.0 + x.x() * x.y(); };
  const Point c(0.03, 0.02);
  const Subdomain sub = clip_subdomain(p.domain, c, SubdomainShape::Ball, r0);
  const PolyBasis basis(2, c, h);
  const GaussianBump bump{r0, 0.6 * h};
  const FunctionalVec lam = gradient_functional(p, sub, basis, bump);
  QuadOrders fine;
  fine.radial = 30;
  fine.angular = 120;
  fine.segment = 60;
  const FunctionalVec ref = gradient_functional(p, sub, basis, bump, fine);
  EXPECT_LT((lam.values - ref.values).cwiseAbs().maxCoeff(), 1e-9 * ref.values.cwiseAbs().maxCoeff());
}

TEST(CompanionParts, CapacityMoment) {
  const HeatProblem p = test_problem();
  const Subdomain sub = clip_subdomain(p.domain, Point(0.5, 0.5), SubdomainShape::Ball, r0);
  const PolyBasis basis(2, Point(0.5, 0.5), h);
  const CompanionParts parts = companion_parts(p, sub, basis);
  // int ln(r0/r)/(2 pi) dOmega = r0^2 / 4
  EXPECT_NEAR(parts.capacity.values[0], 2 * pi * pi * r0 * r0 / 4, 1e-14);
  // the kernel returns -p(x_k) for a full circle: mean value of a harmonic polynomial is p(x_k)
  EXPECT_NEAR(parts.kernel.values[0], -1.0, 1e-14);
  EXPECT_NEAR(parts.kernel.values[1], 0.0, 1e-14);
}

TEST(CompanionParts, ConstantConsistency) {
  // For p = 1 every derivative term vanishes and alpha p(x_k) + PV int p dv/dn = 0.
  const HeatProblem p = test_problem();
  const NodeSet nodes = make_regular_grid(p.domain, h);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Subdomain sub = clip_subdomain(nodes, k, SubdomainShape::Ball, r0);
    const PolyBasis basis(2, nodes.point(k), h);
    const LocalWeakForm wf = dmlpg4_functionals(p, sub, basis, corner_factor(nodes, k));
    EXPECT_NEAR(wf.stiffness.values[0], 0.0, 1e-13) << "node " << k;
  }
  for (const Point& c : centers()) {
    const Subdomain sub = clip_subdomain(p.domain, c, SubdomainShape::Ball, r0);
    const PolyBasis basis(2, c, h);
    const CompanionParts parts = companion_parts(p, sub, basis);
    const bool on_boundary = c.x() == 0 || c.x() == 1 || c.y() == 0 || c.y() == 1;
    if (on_boundary) continue;
    EXPECT_NEAR(parts.point.values[0] + parts.kernel.values[0], 0.0, 1e-13) << c.transpose();
  }
}

TEST(CornerFactorTest, ByBoundaryPosition) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.5);
  EXPECT_DOUBLE_EQ(corner_factor(nodes, 4).alpha, 1.0);
  EXPECT_DOUBLE_EQ(corner_factor(nodes, 1).alpha, 0.5);
  EXPECT_DOUBLE_EQ(corner_factor(nodes, 0).alpha, 0.25);
}

TEST(PolynomialIdentity, FirstWeakFormWithBump) {
  for (std::size_t i = 0; i < centers().size(); ++i) {
    const Point& x = centers()[i];
    const PolynomialCase pc = polynomial_case(x, 100 + static_cast<unsigned>(i));
    const Subdomain sub = clip_subdomain(pc.prob.domain, x, SubdomainShape::Ball, r0);
    const GaussianBump bump{r0, 0.6 * h};
    const LocalWeakForm wf = dmlpg1_functionals(pc.prob, sub, pc.basis, bump);
    const double load = load_quadrature(pc.prob, sub, bump).evaluate(pc.prob, 0.0);
    const double lhs = wf.stiffness.values.dot(pc.c);
    EXPECT_NEAR(lhs, load, 1e-11 * residual_scale(wf, pc.c, load)) << x.transpose();
  }
}

TEST(PolynomialIdentity, FirstWeakFormWithConstant) {
  for (std::size_t i = 0; i < centers().size(); ++i) {
    const Point& x = centers()[i];
    const PolynomialCase pc = polynomial_case(x, 200 + static_cast<unsigned>(i));
    const Subdomain sub = clip_subdomain(pc.prob.domain, x, SubdomainShape::Ball, r0);
    const LocalWeakForm wf = dmlpg5_functionals(pc.prob, sub, pc.basis);
    const double load = load_quadrature(pc.prob, sub, ConstantTest{}).evaluate(pc.prob, 0.0);
    EXPECT_NEAR(wf.stiffness.values.dot(pc.c), load, 1e-11 * residual_scale(wf, pc.c, load)) << x.transpose();
  }
}

TEST(PolynomialIdentity, CompanionWeakForm) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), h);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < nodes.size(); k += 7) {
    const Point& x = nodes.point(k);
    const PolynomialCase pc = polynomial_case(x, 300 + static_cast<unsigned>(k));
    const Subdomain sub = clip_subdomain(nodes, k, SubdomainShape::Ball, r0);
    const LocalWeakForm wf = dmlpg4_functionals(pc.prob, sub, pc.basis, corner_factor(nodes, k));
    const double load = load_quadrature(pc.prob, sub, Companion{r0}).evaluate(pc.prob, 0.0);
    EXPECT_NEAR(wf.stiffness.values.dot(pc.c), load, 1e-9 * residual_scale(wf, pc.c, load)) << x.transpose();
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(PolynomialIdentity, SquareSubdomains) {
  for (std::size_t i = 0; i < centers().size(); ++i) {
    const Point& x = centers()[i];
    const PolynomialCase pc = polynomial_case(x, 400 + static_cast<unsigned>(i));
    const Subdomain sub = clip_subdomain(pc.prob.domain, x, SubdomainShape::Square, 2 * r0);
    const LocalWeakForm wf = dmlpg5_functionals(pc.prob, sub, pc.basis);
    const double load = load_quadrature(pc.prob, sub, ConstantTest{}).evaluate(pc.prob, 0.0);
    EXPECT_NEAR(wf.stiffness.values.dot(pc.c), load, 1e-11 * residual_scale(wf, pc.c, load)) << x.transpose();
  }
}

TEST(Collocation, StrongFormFunctionals) {
  const PolynomialCase pc = polynomial_case(Point(0.4, 0.6), 5);
  const Point x(0.43, 0.58);
  const double p_val = pc.basis.values(x).dot(pc.c);
  EXPECT_NEAR(dmlpg2_functional(pc.prob, x, pc.basis, CollocationRole::Dirichlet).values.dot(pc.c), p_val, 1e-14);
  EXPECT_NEAR(dmlpg2_functional(pc.prob, x, pc.basis, CollocationRole::Pde).values.dot(pc.c), -pc.prob.f(x, 0.0),
              1e-11);
  const Point xb(0.4, 1.0);
  EXPECT_NEAR(dmlpg2_functional(pc.prob, xb, pc.basis, CollocationRole::Neumann, Point(0, 1)).values.dot(pc.c),
              pc.prob.u_n(xb, 0.0), 1e-12);
  EXPECT_THROW(dmlpg2_functional(pc.prob, xb, pc.basis, CollocationRole::Neumann, Point(0, 2)), InvalidArgument);
}

TEST(LoadQuadratureTest, CollocationHasNoLoadRule) {
  const HeatProblem p = manufactured_problem();
  const Subdomain sub = clip_subdomain(p.domain, Point(0.5, 0.5), SubdomainShape::Ball, r0);
  EXPECT_THROW(load_quadrature(p, sub, PointCollocation{}), InvalidArgument);
  // f = -2 with v = 1 on a full disk
  EXPECT_NEAR(source_load(p, sub, ConstantTest{}, 0.0), -2 * pi * r0 * r0, 1e-14);
  EXPECT_DOUBLE_EQ(neumann_load(p, sub, ConstantTest{}, 0.0), 0.0);
}

}  // namespace

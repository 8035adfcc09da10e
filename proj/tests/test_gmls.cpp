#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dmlpg/gmls.hpp"
#include "dmlpg/problems.hpp"

namespace {

using namespace dmlpg;

// Arbitrary polynomial of total degree 2 and its derivatives.
double quad(const Point& x) { return 1.0 - 2.0 * x.x() + 0.5 * x.y() + 3.0 * x.x() * x.x() - x.x() * x.y() + 2.0 * x.y() * x.y(); }
double quad_dx(const Point& x) { return -2.0 + 6.0 * x.x() - x.y(); }
double quad_dy(const Point& x) { return 0.5 - x.x() + 4.0 * x.y(); }
constexpr double quad_lap = 6.0 + 4.0;

Eigen::VectorXd sample(const NodeSet& nodes, double (*f)(const Point&)) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(nodes.point(i));
  return v;
}

TEST(TruncatedGaussian, EndpointsAndMonotone) {
  EXPECT_DOUBLE_EQ(truncated_gaussian(0.0, 1.0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(truncated_gaussian(1.0, 1.0, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(truncated_gaussian(2.0, 1.0, 0.3), 0.0);
  EXPECT_GT(truncated_gaussian(0.4, 1.0, 0.3), truncated_gaussian(0.5, 1.0, 0.3));
  const double e = 1e-6, r = 0.37;
  const double fd = (truncated_gaussian(r + e, 1.0, 0.3) - truncated_gaussian(r - e, 1.0, 0.3)) / (2 * e);
  EXPECT_NEAR(truncated_gaussian_derivative(r, 1.0, 0.3), fd, 1e-7);
}

TEST(WeightDefaults, SupportScalesWithDegree) {
  EXPECT_DOUBLE_EQ(WeightConfig::defaults(2, 0.1).support(), 0.4);
  EXPECT_DOUBLE_EQ(WeightConfig::defaults(3, 0.1).support(), 0.6000000000000001);
  EXPECT_DOUBLE_EQ(WeightConfig::defaults(0, 0.1).support(), 0.1);
  EXPECT_DOUBLE_EQ(WeightConfig::defaults(2, 0.1).shape(), 0.06);
}

TEST(Stencil, InteriorSizeIsFortyFive) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.05);
  const std::size_t k = 10 * 21 + 10;
  const PolyBasis basis(2, nodes.point(k), 0.05);
  const GmlsStencil st = build_stencil(nodes, nodes.point(k), basis, WeightConfig::defaults(2, 0.05), k);
  // Weight vanishes at r = delta, so the four lattice points at distance 4h drop out of the 49.
  EXPECT_EQ(st.size(), 45u);
  EXPECT_EQ(st.center_index(), k);
  EXPECT_GT(st.condition_estimate(), 1.0);
  EXPECT_LT(st.condition_estimate(), 1e12);
}

TEST(Stencil, ReproducesQuadraticsEverywhere) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.1);
  const Eigen::VectorXd u = sample(nodes, quad);
  const PolyBasis basis(2, Point(0, 0), 0.1);
  const WeightConfig cfg = WeightConfig::defaults(2, 0.1);
  const BucketGrid grid(nodes, cfg.support());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Point x(U(rng), U(rng));
    EXPECT_NEAR(point_value_row(nodes, grid, x, basis, cfg).apply(u), quad(x), 1e-11);
    EXPECT_NEAR(derivative_row(nodes, grid, x, basis, cfg, DerivativeKind::Dx1).apply(u), quad_dx(x), 1e-9);
    EXPECT_NEAR(derivative_row(nodes, grid, x, basis, cfg, DerivativeKind::Dx2).apply(u), quad_dy(x), 1e-9);
    EXPECT_NEAR(derivative_row(nodes, grid, x, basis, cfg, DerivativeKind::Laplacian).apply(u), quad_lap, 1e-7);
  }
}

TEST(Stencil, CoefficientsSatisfyMomentEquations) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.1);
  const Point x(0.0, 0.3);
  for (int m : {2, 3}) {
    const PolyBasis basis(m, x, 0.1);
    const GmlsStencil st = build_stencil(nodes, x, basis, WeightConfig::defaults(m, 0.1));
    const FunctionalVec lambda(basis, basis.laplacians(x) + 2.0 * basis.values(x));
    const Eigen::VectorXd reproduced = st.basis_matrix() * st.coefficients(lambda);
    const double defect = (reproduced - lambda.values).cwiseAbs().maxCoeff() / lambda.values.cwiseAbs().maxCoeff();
    EXPECT_LT(defect, 1e-12) << "m=" << m << " condition " << st.condition_estimate();
  }
}

TEST(Stencil, DeficientSupportThrows) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.1);
  const PolyBasis basis(2, Point(0.5, 0.5), 0.1);
  WeightConfig tiny{1.0, 0.6, 0.1};
  try {
    build_stencil(nodes, Point(0.5, 0.5), basis, tiny, 55);
    FAIL() << "expected StencilDeficient";
  } catch (const StencilDeficient& e) {
    EXPECT_EQ(e.node(), 55u);
    EXPECT_EQ(e.found(), 1u);
    EXPECT_EQ(e.required(), 6u);
  }
}

TEST(Stencil, CollinearNodesAreIllConditioned) {
  std::vector<Point> pts;
  for (int i = 0; i <= 10; ++i) pts.emplace_back(0.1 * i, 0.5);
  const NodeSet line(unit_square_mixed(), pts, 0.1);
  const PolyBasis basis(1, Point(0.5, 0.5), 0.1);
  EXPECT_THROW(build_stencil(line, Point(0.5, 0.5), basis, WeightConfig{4.0, 0.6, 0.1}), IllConditioned);
}

TEST(Stencil, MismatchedFunctionalRejected) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.1);
  const PolyBasis basis(2, Point(0.5, 0.5), 0.1);
  const GmlsStencil st = build_stencil(nodes, Point(0.5, 0.5), basis, WeightConfig::defaults(2, 0.1));
  const PolyBasis other(2, Point(0.4, 0.5), 0.1);
  EXPECT_THROW(st.coefficients(FunctionalVec(other, other.values(Point(0.5, 0.5)))), InvalidArgument);
  EXPECT_THROW(FunctionalVec(basis, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(FunctionalVecAlgebra, LinearCombination) {
  const PolyBasis basis(1, Point(0, 0), 1.0);
  const FunctionalVec a(basis, Eigen::Vector3d(1, 2, 3)), b(basis, Eigen::Vector3d(1, 1, 1));
  const FunctionalVec c = a * 2.0 - b;
  EXPECT_TRUE(c.values.isApprox(Eigen::Vector3d(1, 3, 5)));
}

}  // namespace

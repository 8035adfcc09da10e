#include <cmath>

#include <gtest/gtest.h>

#include "dmlpg/assembly.hpp"
#include "dmlpg/problems.hpp"
#include "dmlpg/time_stepping.hpp"

namespace {

using namespace dmlpg;

// u' = -lambda u, u(0) = 1, as a one-row system with zero load.
SemiDiscreteSystem scalar_decay(double lambda) {
  SemiDiscreteSystem sys;
  sys.problem = test_problem();
  sys.rows.resize(1);
  sys.capacity.resize(1, 1);
  sys.capacity.insert(0, 0) = 1.0;
  sys.stiffness.resize(1, 1);
  sys.stiffness.insert(0, 0) = lambda;
  sys.initial = Eigen::VectorXd::Ones(1);
  return sys;
}

SemiDiscreteSystem test_system(Method m, double h) {
  DiscretizationConfig d;
  d.method = m;
  const HeatProblem p = test_problem();
  return assemble(p, make_regular_grid(p.domain, h), d);
}

TEST(TimeSchemeTest, StepCountsAndValidation) {
  EXPECT_EQ(TimeScheme::crank_nicolson(0.01).steps(1.0), 100u);
  EXPECT_EQ(TimeScheme::crank_nicolson(0.1).steps(0.3), 3u);
  EXPECT_THROW(TimeScheme::crank_nicolson(0.3).steps(1.0), InvalidArgument);
  EXPECT_THROW(TimeScheme::crank_nicolson(0.0).steps(1.0), InvalidArgument);
  EXPECT_THROW(TimeScheme::method_of_lines(0.0, 1e-6).validate(1.0), InvalidArgument);
  EXPECT_EQ(to_string(SchemeKind::MethodOfLines), "mol");
}

TEST(ScalarDecay, CrankNicolsonSecondOrder) {
  const SemiDiscreteSystem sys = scalar_decay(1.0);
  const double e1 = std::abs(step_crank_nicolson(sys, 0.01, 1.0).final_state()[0] - std::exp(-1.0));
  const double e2 = std::abs(step_crank_nicolson(sys, 0.005, 1.0).final_state()[0] - std::exp(-1.0));
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.01);
}

TEST(ScalarDecay, BackwardEulerFirstOrder) {
  const SemiDiscreteSystem sys = scalar_decay(1.0);
  const double e1 = std::abs(step_backward_euler(sys, 0.01, 1.0).final_state()[0] - std::exp(-1.0));
  const double e2 = std::abs(step_backward_euler(sys, 0.005, 1.0).final_state()[0] - std::exp(-1.0));
  EXPECT_NEAR(std::log2(e1 / e2), 1.0, 0.02);
}

TEST(ScalarDecay, MethodOfLinesMeetsTolerance) {
  const SemiDiscreteSystem sys = scalar_decay(3.0);
  const Trajectory tr = solve_method_of_lines(sys, 1e-8, 1e-10, 1.0, 4);
  ASSERT_EQ(tr.times.size(), 5u);
  for (std::size_t i = 0; i < tr.times.size(); ++i) EXPECT_NEAR(tr.states[i][0], std::exp(-3.0 * tr.times[i]), 1e-6);
  EXPECT_GT(tr.steps, 0u);
  EXPECT_THROW(solve_method_of_lines(sys, 1e-6, 1e-8, std::vector<double>{0.5, 1.0}), InvalidArgument);
}

TEST(ZeroData, StaysZero) {
  HeatProblem p = test_problem();
  p.dirichlet = [](const Point&, double) { return 0.0; };
  p.initial = [](const Point&) { return 0.0; };
  p.exact = {};
  DiscretizationConfig d;
  const SemiDiscreteSystem sys = assemble(p, make_regular_grid(p.domain, 0.2), d);
  EXPECT_EQ(step_crank_nicolson(sys, 0.1, 1.0).final_state().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(solve_method_of_lines(sys, 1e-6, 1e-8, 1.0, 2).final_state().cwiseAbs().maxCoeff(), 0.0);
}

TEST(CrankNicolsonForms, EliminationMatchesRowReplacement) {
  for (Method m : {Method::Dmlpg1, Method::Dmlpg2, Method::Dmlpg4, Method::Dmlpg5}) {
    const SemiDiscreteSystem sys = test_system(m, 0.2);
    const Trajectory a = step_crank_nicolson(sys, 0.05, 1.0);
    const Trajectory b = step_crank_nicolson_eliminated(sys, 0.05, 1.0);
    ASSERT_EQ(a.states.size(), b.states.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) diff = std::max(diff, (a.states[i] - b.states[i]).cwiseAbs().maxCoeff());
    EXPECT_LT(diff, 1e-12) << to_string(m);
    EXPECT_EQ(a.factorizations, 1u);
    EXPECT_EQ(b.factorizations, 2u);
    EXPECT_EQ(a.steps, 20u);
  }
}

TEST(CrankNicolsonForms, AlgebraicRowsHoldAtEveryStep) {
  const SemiDiscreteSystem sys = test_system(Method::Dmlpg2, 0.1);
  const Trajectory tr = step_crank_nicolson(sys, 0.1, 1.0);
  for (std::size_t i = 1; i < tr.states.size(); ++i) {
    const Eigen::VectorXd r = sys.stiffness * tr.states[i] - sys.load(tr.times[i]);
    for (std::size_t k : sys.algebraic_rows) EXPECT_NEAR(r[static_cast<Eigen::Index>(k)], 0.0, 1e-12);
  }
}

TEST(Steady, ManufacturedProblemStaysPut) {
  // u = x1^2 is steady: starting from it, every scheme keeps it to round-off.
  const HeatProblem p = manufactured_problem();
  const NodeSet nodes = make_regular_grid(p.domain, 0.1);
  DiscretizationConfig d;
  for (Method m : {Method::Dmlpg1, Method::Dmlpg2, Method::Dmlpg4, Method::Dmlpg5}) {
    d.method = m;
    const SemiDiscreteSystem sys = assemble(p, nodes, d);
    EXPECT_LT((step_crank_nicolson(sys, 0.1, 1.0).final_state() - sys.initial).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((solve_method_of_lines(sys, 1e-6, 1e-9, 1.0, 1).final_state() - sys.initial).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(MethodOfLines, AllDirichletGrid) {
  HeatProblem p = test_problem();
  p.domain.conditions = {BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet,
                         BoundaryCondition::Dirichlet};
  DiscretizationConfig d;
  const NodeSet nodes = make_regular_grid(p.domain, 0.5);
  const SemiDiscreteSystem sys = assemble(p, nodes, d);
  const Trajectory tr = solve_method_of_lines(sys, 1e-8, 1e-10, 1.0, 2);
  EXPECT_LT(nodal_error(nodes, tr.final_state(), p.exact, 1.0).max, 0.05);
  for (std::size_t k : sys.dirichlet_rows) {
    EXPECT_NEAR(tr.final_state()[static_cast<Eigen::Index>(k)], p.exact(nodes.point(k), 1.0), 1e-12);
  }
}

TEST(MethodOfLines, TighterToleranceApproachesCrankNicolsonLimit) {
  const SemiDiscreteSystem sys = test_system(Method::Dmlpg5, 0.1);
  const Eigen::VectorXd ref = step_crank_nicolson(sys, 0.001, 1.0).final_state();
  const double loose = (solve_method_of_lines(sys, 1e-3, 1e-5, 1.0, 1).final_state() - ref).cwiseAbs().maxCoeff();
  const double tight = (solve_method_of_lines(sys, 1e-8, 1e-10, 1.0, 1).final_state() - ref).cwiseAbs().maxCoeff();
  EXPECT_LT(tight, 1e-5);
  EXPECT_LT(tight, loose);
  EXPECT_LT(loose, 1e-3);
}

TEST(Integrate, DispatchesOnScheme) {
  const SemiDiscreteSystem sys = test_system(Method::Dmlpg1, 0.2);
  EXPECT_EQ(integrate(sys, TimeScheme::crank_nicolson(0.1), 1.0).states.size(), 11u);
  EXPECT_EQ(integrate(sys, TimeScheme::backward_euler(0.25), 1.0).states.size(), 5u);
  EXPECT_EQ(integrate(sys, TimeScheme::method_of_lines(1e-5, 1e-7), 1.0, {0.0, 0.5, 1.0}).states.size(), 3u);
  EXPECT_THROW(integrate(sys, TimeScheme::crank_nicolson(0.3), 1.0), InvalidArgument);
}

TEST(Postprocess, ReproducesQuadraticData) {
  const NodeSet nodes = make_regular_grid(unit_square_mixed(), 0.1);
  Eigen::VectorXd u(static_cast<Eigen::Index>(nodes.size()));
  auto f = [](const Point& x) { return 1 + x.x() - 2 * x.y() + x.x() * x.y() + 3 * x.y() * x.y(); };
  for (std::size_t i = 0; i < nodes.size(); ++i) u[static_cast<Eigen::Index>(i)] = f(nodes.point(i));
  const std::vector<Point> q{Point(0.123, 0.456), Point(0.0, 0.999), Point(0.5, 0.5)};
  const Eigen::VectorXd v = postprocess(nodes, u, q, 2, WeightConfig::defaults(2, 0.1));
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(v[static_cast<Eigen::Index>(i)], f(q[i]), 1e-12);
  EXPECT_THROW(postprocess(nodes, Eigen::VectorXd::Zero(3), q, 2, WeightConfig::defaults(2, 0.1)), InvalidArgument);
}

TEST(Refinement, ErrorDecreasesWithSpacing) {
  const HeatProblem p = test_problem();
  for (Method m : {Method::Dmlpg1, Method::Dmlpg5}) {
    double prev = 1.0;
    for (double h : {0.2, 0.1, 0.05}) {
      const SemiDiscreteSystem sys = test_system(m, h);
      const double e = nodal_error(make_regular_grid(p.domain, h), step_crank_nicolson(sys, 0.01, 1.0).final_state(),
                                   p.exact, 1.0)
                           .max;
      EXPECT_LT(e, prev) << to_string(m) << " h=" << h;
      prev = e;
    }
  }
}

}  // namespace

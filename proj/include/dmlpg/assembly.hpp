#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dmlpg/errors.hpp"
#include "dmlpg/gmls.hpp"
#include "dmlpg/heat_problem.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/poly_basis.hpp"
#include "dmlpg/quadrature.hpp"
#include "dmlpg/subdomain.hpp"
#include "dmlpg/weak_forms.hpp"

namespace dmlpg {

enum class Method { Dmlpg1, Dmlpg2, Dmlpg4, Dmlpg5 };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Dmlpg1: return "dmlpg1";
    case Method::Dmlpg2: return "dmlpg2";
    case Method::Dmlpg4: return "dmlpg4";
    case Method::Dmlpg5: return "dmlpg5";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "dmlpg1") return Method::Dmlpg1;
  if (s == "dmlpg2") return Method::Dmlpg2;
  if (s == "dmlpg4") return Method::Dmlpg4;
  if (s == "dmlpg5") return Method::Dmlpg5;
  throw InvalidArgument("unknown method '" + std::string(s) + "' (expected dmlpg1, dmlpg2, dmlpg4 or dmlpg5)");
}

struct DiscretizationConfig {
  Method method = Method::Dmlpg1;
  int degree = 2;
  double support_factor = 0.0;  ///< delta0; 0 selects 2m
  double shape_factor = 0.6;    ///< c0 of the GMLS weight
  double r0_factor = 0.7;       ///< subdomain size r0 = r0_factor * h
  double test_shape_factor = 0.6;  ///< Gaussian test function shape, c = test_shape_factor * h
  SubdomainShape shape = SubdomainShape::Ball;
  QuadOrders quad;
  double condition_limit = default_condition_limit;
  unsigned threads = 1;

  double resolved_support_factor() const {
    return support_factor > 0.0 ? support_factor : WeightConfig::defaults(degree, 1.0).support_factor;
  }
  WeightConfig weights(double h) const { return WeightConfig{resolved_support_factor(), shape_factor, h}; }

  void validate() const {
    if (degree < 0 || degree > PolyBasis::max_degree) throw InvalidArgument("degree m must lie in [0, 12]");
    if (support_factor < 0.0 || !(shape_factor > 0.0) || !(r0_factor > 0.0) || !(test_shape_factor > 0.0)) {
      throw InvalidArgument("delta0, c0, r0 factor and test shape factor must be positive");
    }
    if (!(condition_limit > 1.0)) throw InvalidArgument("condition limit must exceed 1");
    if (threads < 1) throw InvalidArgument("thread count must be at least 1");
    quad.validate();
  }
};

/// How the right-hand side of one row is formed.
enum class RowKind { Weak, Dirichlet, Neumann, Pde };

struct RowLoad {
  RowKind kind = RowKind::Weak;
  Point x = Point::Zero();
  LoadQuadrature quad;  ///< used by weak rows only
};

struct AssemblyTimings {
  double stencils = 0.0;
  double functionals = 0.0;
  double coefficients = 0.0;
  double total = 0.0;
};

/// A1 du/dt + A u = b(t); algebraic rows have zero A1 rows and b_k = constraint data.
struct SemiDiscreteSystem {
  using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  HeatProblem problem;
  Method method = Method::Dmlpg1;
  SparseRows capacity;   ///< A1
  SparseRows stiffness;  ///< A
  std::vector<RowLoad> rows;
  std::vector<std::size_t> algebraic_rows;  ///< Dirichlet rows, plus Neumann rows of the collocation method
  std::vector<std::size_t> dirichlet_rows;
  Eigen::VectorXd initial;
  std::size_t max_stencil = 0;
  AssemblyTimings timings;

  std::size_t size() const { return rows.size(); }
  bool is_algebraic(std::size_t k) const {
    return std::binary_search(algebraic_rows.begin(), algebraic_rows.end(), k);
  }

  double load(std::size_t k, double t) const {
    const RowLoad& r = rows[k];
    switch (r.kind) {
      case RowKind::Weak: return r.quad.evaluate(problem, t);
      case RowKind::Dirichlet: return problem.dirichlet(r.x, t);
      case RowKind::Neumann: return problem.u_n(r.x, t);
      case RowKind::Pde: return problem.f(r.x, t);
    }
    return 0.0;
  }

  Eigen::VectorXd load(double t) const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k) b[static_cast<Eigen::Index>(k)] = load(k, t);
    return b;
  }
};

namespace detail {

struct RowResult {
  CoefficientRow stiffness;
  CoefficientRow capacity;  ///< empty indices for algebraic rows
  double diagonal_capacity = 0.0;
  RowLoad load;
  bool algebraic = false;
};

struct RowTimer {
  double stencils = 0.0, functionals = 0.0, coefficients = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline RowResult assemble_row(const HeatProblem& prob, const NodeSet& nodes, const BucketGrid& grid,
                              const DiscretizationConfig& cfg, std::size_t k, RowTimer& timer) {
  using clock = std::chrono::steady_clock;
  const double h = nodes.spacing();
  const Point& xk = nodes.point(k);
  const PolyBasis basis(cfg.degree, xk, h);

  auto t0 = clock::now();
  const GmlsStencil st = build_stencil(nodes, grid, xk, basis, cfg.weights(h), k, cfg.condition_limit);
  timer.stencils += seconds_since(t0);

  RowResult out;
  out.load.x = xk;
  const NodeTag tag = nodes.tag(k);

  t0 = clock::now();
  if (tag == NodeTag::Dirichlet) {
    const FunctionalVec lam(basis, basis.values(xk));
    timer.functionals += seconds_since(t0);
    t0 = clock::now();
    out.stiffness = st.row(lam);
    timer.coefficients += seconds_since(t0);
    out.load.kind = RowKind::Dirichlet;
    out.algebraic = true;
    return out;
  }

  if (cfg.method == Method::Dmlpg2) {
    if (tag == NodeTag::Neumann) {
      const FunctionalVec lam = dmlpg2_functional(prob, xk, basis, CollocationRole::Neumann, nodes.neumann_normal(k));
      timer.functionals += seconds_since(t0);
      t0 = clock::now();
      out.stiffness = st.row(lam);
      out.load.kind = RowKind::Neumann;
      out.algebraic = true;
    } else {
      const FunctionalVec lam = dmlpg2_functional(prob, xk, basis, CollocationRole::Pde);
      timer.functionals += seconds_since(t0);
      t0 = clock::now();
      out.stiffness = st.row(-lam);
      out.diagonal_capacity = prob.capacity(xk);
      out.load.kind = RowKind::Pde;
    }
    timer.coefficients += seconds_since(t0);
    return out;
  }

  const double r0 = cfg.r0_factor * h;
  const Subdomain sub = clip_subdomain(nodes, k, cfg.shape, r0);
  LocalWeakForm wf;
  TestFunctionKind v;
  switch (cfg.method) {
    case Method::Dmlpg1: {
      const GaussianBump bump{r0, cfg.test_shape_factor * h};
      wf = dmlpg1_functionals(prob, sub, basis, bump, cfg.quad);
      v = bump;
      break;
    }
    case Method::Dmlpg5:
      wf = dmlpg5_functionals(prob, sub, basis, cfg.quad);
      v = ConstantTest{};
      break;
    case Method::Dmlpg4:
      wf = dmlpg4_functionals(prob, sub, basis, corner_factor(nodes, k), cfg.quad);
      v = Companion{r0};
      break;
    case Method::Dmlpg2: break;
  }
  out.load.kind = RowKind::Weak;
  out.load.quad = load_quadrature(prob, sub, v, cfg.quad);
  timer.functionals += seconds_since(t0);

  t0 = clock::now();
  out.stiffness = st.row(wf.stiffness);
  out.capacity = st.row(wf.capacity);
  timer.coefficients += seconds_since(t0);
  return out;
}

}  // namespace detail

/// Builds A1, A and b(t) row by row: one stencil per node, then the variant's functionals.
///
/// Stencil failures abort assembly; the exception names the offending node.
inline SemiDiscreteSystem assemble(const HeatProblem& prob, const NodeSet& nodes, const DiscretizationConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  prob.validate();
  cfg.validate();
  if (prob.domain.xmin != nodes.domain().xmin || prob.domain.xmax != nodes.domain().xmax ||
      prob.domain.ymin != nodes.domain().ymin || prob.domain.ymax != nodes.domain().ymax) {
    throw InvalidArgument("node set and problem live on different domains");
  }
  const std::size_t n = nodes.size();
  if (n < basis_dimension(cfg.degree)) throw StencilDeficient(no_node, n, basis_dimension(cfg.degree));

  const BucketGrid grid(nodes, cfg.weights(nodes.spacing()).support());
  std::vector<detail::RowResult> results(n);
  const unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(n));
  std::vector<detail::RowTimer> timers(workers);
  std::vector<std::exception_ptr> failures(workers);

  auto work = [&](unsigned w) {
    try {
      for (std::size_t k = w; k < n; k += workers) results[k] = detail::assemble_row(prob, nodes, grid, cfg, k, timers[w]);
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back([&work, w] { work(w); });
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  SemiDiscreteSystem sys;
  sys.problem = prob;
  sys.method = cfg.method;
  sys.rows.resize(n);
  sys.initial.resize(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> cap, stiff;
  for (std::size_t k = 0; k < n; ++k) {
    detail::RowResult& r = results[k];
    const auto row = static_cast<Eigen::Index>(k);
    for (std::size_t j = 0; j < r.stiffness.indices.size(); ++j) {
      stiff.emplace_back(row, static_cast<Eigen::Index>(r.stiffness.indices[j]), r.stiffness.values[static_cast<Eigen::Index>(j)]);
    }
    for (std::size_t j = 0; j < r.capacity.indices.size(); ++j) {
      cap.emplace_back(row, static_cast<Eigen::Index>(r.capacity.indices[j]), r.capacity.values[static_cast<Eigen::Index>(j)]);
    }
    if (r.diagonal_capacity != 0.0) cap.emplace_back(row, row, r.diagonal_capacity);
    if (r.algebraic) sys.algebraic_rows.push_back(k);
    if (r.load.kind == RowKind::Dirichlet) sys.dirichlet_rows.push_back(k);
    sys.max_stencil = std::max(sys.max_stencil, r.stiffness.indices.size());
    sys.rows[k] = std::move(r.load);
    sys.initial[row] = prob.initial(nodes.point(k));
  }
  const auto ni = static_cast<Eigen::Index>(n);
  sys.capacity.resize(ni, ni);
  sys.capacity.setFromTriplets(cap.begin(), cap.end());
  sys.stiffness.resize(ni, ni);
  sys.stiffness.setFromTriplets(stiff.begin(), stiff.end());
  sys.capacity.makeCompressed();
  sys.stiffness.makeCompressed();

  for (const auto& t : timers) {
    sys.timings.stencils += t.stencils;
    sys.timings.functionals += t.functionals;
    sys.timings.coefficients += t.coefficients;
  }
  sys.timings.total = detail::seconds_since(t_start);
  return sys;
}

}  // namespace dmlpg

#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace dmlpg {

/// Index value meaning "not attached to a node" (e.g. a postprocessing query).
inline constexpr std::size_t no_node = std::numeric_limits<std::size_t>::max();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline std::string node_label(std::size_t node) {
  return node == no_node ? std::string("query point") : "node " + std::to_string(node);
}
}  // namespace detail

/// Fewer admissible nodes in the weight support than basis polynomials.
class StencilDeficient : public Error {
 public:
  StencilDeficient(std::size_t node, std::size_t found, std::size_t required)
      : Error("stencil deficient at " + detail::node_label(node) + ": " + std::to_string(found) +
              " nodes with positive weight, " + std::to_string(required) + " required"),
        node_(node),
        found_(found),
        required_(required) {}

  std::size_t node() const noexcept { return node_; }
  std::size_t found() const noexcept { return found_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t node_;
  std::size_t found_;
  std::size_t required_;
};

/// Moment matrix P W P^T is singular or its condition estimate exceeds the limit.
class IllConditioned : public Error {
 public:
  IllConditioned(std::size_t node, std::size_t stencil_size, std::size_t basis_size,
                 double condition, double limit)
      : Error("moment matrix ill-conditioned at " + detail::node_label(node) + ": condition estimate " +
              std::to_string(condition) + " exceeds " + std::to_string(limit) + " (" +
              std::to_string(stencil_size) + " nodes, " + std::to_string(basis_size) +
              " basis polynomials)"),
        node_(node),
        stencil_size_(stencil_size),
        basis_size_(basis_size),
        condition_(condition) {}

  std::size_t node() const noexcept { return node_; }
  std::size_t stencil_size() const noexcept { return stencil_size_; }
  std::size_t basis_size() const noexcept { return basis_size_; }
  double condition() const noexcept { return condition_; }

 private:
  std::size_t node_;
  std::size_t stencil_size_;
  std::size_t basis_size_;
  double condition_;
};

/// A quadrature region of zero measure.
class EmptyRegion : public Error {
 public:
  using Error::Error;
};

/// The time-stepping iteration matrix could not be factorized.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Adaptive time integration gave up.
class IntegratorFailure : public Error {
 public:
  IntegratorFailure(const std::string& what, double time, std::size_t steps)
      : Error(what + " (t = " + std::to_string(time) + ", after " + std::to_string(steps) + " steps)"),
        time_(time),
        steps_(steps) {}

  double time() const noexcept { return time_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  double time_;
  std::size_t steps_;
};

/// A reference solution requested outside its domain of validity.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid run configuration; line is 0 when not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dmlpg

#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dmlpg/assembly.hpp"
#include "dmlpg/errors.hpp"
#include "dmlpg/problems.hpp"
#include "dmlpg/subdomain.hpp"
#include "dmlpg/time_stepping.hpp"

namespace dmlpg {

enum class ProblemKind { Test, Fgm, Manufactured };

inline std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::Test: return "test";
    case ProblemKind::Fgm: return "fgm";
    case ProblemKind::Manufactured: return "manufactured";
  }
  return "?";
}

/// Fully resolved run configuration; optional fields are filled by `resolve`.
struct RunConfig {
  ProblemKind problem = ProblemKind::Test;
  Method method = Method::Dmlpg1;
  int degree = 2;
  std::optional<double> h;
  std::optional<int> grid;  ///< nodes per side, alternative to h
  std::optional<double> delta0;
  double c0 = 0.6;
  double r0_factor = 0.7;
  double test_c0 = 0.6;
  SubdomainShape subdomain = SubdomainShape::Ball;
  std::optional<SchemeKind> scheme;
  double dt = 0.01;
  double rtol = 1e-5;
  double atol = 1e-6;
  std::optional<double> t_final;
  std::vector<double> output_times;
  FgmParams fgm;
  QuadOrders quad;
  double condition_limit = default_condition_limit;
  unsigned threads = 1;
  std::vector<double> h_list{0.2, 0.1, 0.05};
  int repeats = 3;
  std::string out = "out";

  double domain_width() const { return problem == ProblemKind::Fgm ? fgm.a : 1.0; }
  double spacing() const { return *h; }
  double final_time() const { return *t_final; }
  SchemeKind scheme_kind() const { return *scheme; }

  TimeScheme time_scheme() const {
    switch (*scheme) {
      case SchemeKind::CrankNicolson: return TimeScheme::crank_nicolson(dt);
      case SchemeKind::BackwardEuler: return TimeScheme::backward_euler(dt);
      case SchemeKind::MethodOfLines: return TimeScheme::method_of_lines(rtol, atol);
    }
    return {};
  }

  DiscretizationConfig discretization() const {
    DiscretizationConfig d;
    d.method = method;
    d.degree = degree;
    d.support_factor = *delta0;
    d.shape_factor = c0;
    d.r0_factor = r0_factor;
    d.test_shape_factor = test_c0;
    d.shape = subdomain;
    d.quad = quad;
    d.condition_limit = condition_limit;
    d.threads = threads;
    return d;
  }

  HeatProblem heat_problem() const {
    HeatProblem p;
    switch (problem) {
      case ProblemKind::Test: p = test_problem(); break;
      case ProblemKind::Manufactured: p = manufactured_problem(); break;
      case ProblemKind::Fgm: p = fgm_problem(fgm); break;
    }
    p.final_time = *t_final;
    return p;
  }

  /// Probe points reported at each output time (the strip's three x1 stations).
  std::vector<Point> probes() const {
    if (problem != ProblemKind::Fgm) return {};
    return {Point(0.25 * fgm.a, 0.5 * fgm.a), Point(0.5 * fgm.a, 0.5 * fgm.a), Point(0.75 * fgm.a, 0.5 * fgm.a)};
  }

  /// Fills problem-dependent defaults.
  void resolve() {
    const bool fgm_run = problem == ProblemKind::Fgm;
    if (!delta0) delta0 = WeightConfig::defaults(degree, 1.0).support_factor;
    if (!t_final) t_final = fgm_run ? 60.0 : 1.0;
    if (!scheme) scheme = fgm_run ? SchemeKind::MethodOfLines : SchemeKind::CrankNicolson;
    if (grid && !h) h = domain_width() / (*grid - 1);
    if (!h) h = fgm_run ? fgm.a / 10.0 : 0.1;
    if (!grid) grid = static_cast<int>(std::lround(domain_width() / *h)) + 1;
    if (output_times.empty()) {
      output_times = fgm_run ? std::vector<double>{10.0, 10.5, 30.0, 60.0} : std::vector<double>{*t_final};
    }
    std::sort(output_times.begin(), output_times.end());
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw ConfigError("malformed number for '" + key + "': '" + v + "'", line);
  }
  return d;
}

inline long parse_int(const std::string& key, const std::string& v, int line) {
  errno = 0;
  char* end = nullptr;
  const long i = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("malformed integer for '" + key + "': '" + v + "'", line);
  }
  return i;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item), line));
  if (out.empty()) throw ConfigError("empty list for '" + key + "'", line);
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Errors carry the offending line number.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string v = detail::trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    if (v.empty()) throw ConfigError("missing value for '" + key + "'", line);
    if (!seen.emplace(key, line).second) throw ConfigError("duplicate key '" + key + "'", line);

    auto num = [&] { return detail::parse_double(key, v, line); };
    auto positive = [&] {
      const double d = num();
      if (!(d > 0.0)) throw ConfigError("'" + key + "' must be positive", line);
      return d;
    };
    auto count = [&](long lo, long hi) {
      const long i = detail::parse_int(key, v, line);
      if (i < lo || i > hi) {
        throw ConfigError("'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", line);
      }
      return static_cast<int>(i);
    };

    if (key == "problem") {
      if (v == "test") cfg.problem = ProblemKind::Test;
      else if (v == "fgm") cfg.problem = ProblemKind::Fgm;
      else if (v == "manufactured") cfg.problem = ProblemKind::Manufactured;
      else throw ConfigError("unknown problem '" + v + "' (expected test, fgm or manufactured)", line);
    } else if (key == "method") {
      try {
        cfg.method = parse_method(v);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), line);
      }
    } else if (key == "m") {
      cfg.degree = count(0, PolyBasis::max_degree);
    } else if (key == "h") {
      cfg.h = positive();
    } else if (key == "grid") {
      cfg.grid = count(2, 100000);
    } else if (key == "delta0") {
      cfg.delta0 = positive();
    } else if (key == "c0") {
      cfg.c0 = positive();
    } else if (key == "r0_factor") {
      cfg.r0_factor = positive();
    } else if (key == "test_c0") {
      cfg.test_c0 = positive();
    } else if (key == "subdomain") {
      if (v == "ball") cfg.subdomain = SubdomainShape::Ball;
      else if (v == "square") cfg.subdomain = SubdomainShape::Square;
      else throw ConfigError("unknown subdomain shape '" + v + "' (expected ball or square)", line);
    } else if (key == "scheme") {
      if (v == "cn") cfg.scheme = SchemeKind::CrankNicolson;
      else if (v == "be") cfg.scheme = SchemeKind::BackwardEuler;
      else if (v == "mol") cfg.scheme = SchemeKind::MethodOfLines;
      else throw ConfigError("unknown scheme '" + v + "' (expected cn, be or mol)", line);
    } else if (key == "dt") {
      cfg.dt = positive();
    } else if (key == "rtol") {
      cfg.rtol = positive();
    } else if (key == "atol") {
      cfg.atol = positive();
    } else if (key == "t_final") {
      cfg.t_final = positive();
    } else if (key == "output_times") {
      cfg.output_times = detail::parse_list(key, v, line);
      for (double t : cfg.output_times) {
        if (!(t > 0.0)) throw ConfigError("'output_times' entries must be positive", line);
      }
    } else if (key == "gamma") {
      cfg.fgm.gamma = num();
    } else if (key == "kappa0") {
      cfg.fgm.kappa0 = positive();
    } else if (key == "rho_c") {
      cfg.fgm.rho_c = positive();
    } else if (key == "a") {
      cfg.fgm.a = positive();
    } else if (key == "T") {
      cfg.fgm.T = num();
    } else if (key == "quad_radial") {
      cfg.quad.radial = count(1, 32);
    } else if (key == "quad_angular") {
      cfg.quad.angular = count(1, 128);
    } else if (key == "quad_segment") {
      cfg.quad.segment = count(1, 128);
    } else if (key == "quad_square") {
      cfg.quad.square = count(1, 128);
    } else if (key == "condition_limit") {
      cfg.condition_limit = positive();
      if (cfg.condition_limit <= 1.0) throw ConfigError("'condition_limit' must exceed 1", line);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(count(1, 256));
    } else if (key == "h_list") {
      cfg.h_list = detail::parse_list(key, v, line);
      for (double h : cfg.h_list) {
        if (!(h > 0.0)) throw ConfigError("'h_list' entries must be positive", line);
      }
    } else if (key == "repeats") {
      cfg.repeats = count(1, 1000);
    } else if (key == "out") {
      cfg.out = v;
    } else {
      throw ConfigError("unknown key '" + key + "'", line);
    }
  }

  auto line_of = [&](const std::string& k) {
    const auto it = seen.find(k);
    return it == seen.end() ? 0 : it->second;
  };
  if (cfg.h && cfg.grid) throw ConfigError("set either 'h' or 'grid', not both", line_of("grid"));
  cfg.resolve();

  const double width = cfg.domain_width();
  const double cells = width / *cfg.h;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells || std::round(cells) < 1.0) {
    throw ConfigError("'h' must divide the domain side " + detail::format_double(width), line_of(seen.count("h") ? "h" : "grid"));
  }
  if (cfg.scheme_kind() != SchemeKind::MethodOfLines) {
    const double n = std::round(*cfg.t_final / cfg.dt);
    if (n < 1.0 || std::abs(n * cfg.dt - *cfg.t_final) > 1e-12 * *cfg.t_final) {
      throw ConfigError("'dt' must divide 't_final'", line_of(seen.count("dt") ? "dt" : "t_final"));
    }
    for (double t : cfg.output_times) {
      const double k = std::round(t / cfg.dt);
      if (std::abs(k * cfg.dt - t) > 1e-9 * std::max(1.0, t)) {
        throw ConfigError("'output_times' entries must be multiples of 'dt'", line_of("output_times"));
      }
    }
  }
  if (cfg.output_times.back() > *cfg.t_final * (1.0 + 1e-12)) {
    throw ConfigError("'output_times' must not exceed 't_final'", line_of("output_times"));
  }
  if (basis_dimension(cfg.degree) > static_cast<std::size_t>(*cfg.grid) * static_cast<std::size_t>(*cfg.grid)) {
    throw ConfigError("grid has fewer nodes than the polynomial basis", line_of("m"));
  }
  return cfg;
}

/// Resolved configuration in the same `key = value` format.
inline std::string to_config_text(const RunConfig& c) {
  std::string s;
  auto put = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  put("problem", to_string(c.problem));
  put("method", to_string(c.method));
  put("m", std::to_string(c.degree));
  put("h", detail::format_double(*c.h));
  put("delta0", detail::format_double(*c.delta0));
  put("c0", detail::format_double(c.c0));
  put("r0_factor", detail::format_double(c.r0_factor));
  put("test_c0", detail::format_double(c.test_c0));
  put("subdomain", c.subdomain == SubdomainShape::Ball ? "ball" : "square");
  put("scheme", to_string(*c.scheme));
  put("dt", detail::format_double(c.dt));
  put("rtol", detail::format_double(c.rtol));
  put("atol", detail::format_double(c.atol));
  put("t_final", detail::format_double(*c.t_final));
  put("output_times", detail::format_list(c.output_times));
  put("gamma", detail::format_double(c.fgm.gamma));
  put("kappa0", detail::format_double(c.fgm.kappa0));
  put("rho_c", detail::format_double(c.fgm.rho_c));
  put("a", detail::format_double(c.fgm.a));
  put("T", detail::format_double(c.fgm.T));
  put("quad_radial", std::to_string(c.quad.radial));
  put("quad_angular", std::to_string(c.quad.angular));
  put("quad_segment", std::to_string(c.quad.segment));
  put("quad_square", std::to_string(c.quad.square));
  put("condition_limit", detail::format_double(c.condition_limit));
  put("threads", std::to_string(c.threads));
  put("h_list", detail::format_list(c.h_list));
  put("repeats", std::to_string(c.repeats));
  put("out", c.out);
  return s;
}

}  // namespace dmlpg

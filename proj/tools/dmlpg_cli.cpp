// Batch front-end: dmlpg solve | study convergence | study timing.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dmlpg/dmlpg.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

dmlpg::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dmlpg::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return dmlpg::parse_config(ss.str());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct meshless local Petrov-Galerkin solver for transient heat conduction"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* solve = app.add_subcommand("solve", "Solve one configured problem");
  solve->add_option("--config", config_path, "Run configuration (key = value lines)")->required();
  solve->add_option("--out", out_dir, "Output directory (overrides 'out' in the config)");

  auto* study = app.add_subcommand("study", "Run a convergence or timing study");
  study->require_subcommand(1);
  auto* conv = study->add_subcommand("convergence", "Errors and observed orders over h_list");
  conv->add_option("--config", config_path, "Run configuration")->required();
  conv->add_option("--out", out_dir, "Output directory");
  auto* timing = study->add_subcommand("timing", "Wall time per phase over h_list");
  timing->add_option("--config", config_path, "Run configuration")->required();
  timing->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  dmlpg::RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const dmlpg::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return exit_config;
  }
  if (!out_dir.empty()) cfg.out = out_dir;
  const std::filesystem::path dir = cfg.out;

  try {
    if (solve->parsed()) {
      const auto run = dmlpg::run_solve(cfg, dir);
      std::cout << "solved " << dmlpg::to_string(cfg.problem) << " with " << dmlpg::to_string(cfg.method) << " on "
                << run.result.nodes.size() << " nodes, " << run.result.trajectory.steps << " steps\n";
      if (run.error) std::cout << "max error " << fmt(run.error->max) << ", rms error " << fmt(run.error->rms) << '\n';
    } else if (conv->parsed()) {
      for (const auto& r : dmlpg::run_convergence(cfg, dir)) {
        std::cout << "h = " << fmt(r.h) << "  max error " << fmt(r.max_err)
                  << (r.order ? "  order " + fmt(*r.order) : std::string()) << '\n';
      }
    } else if (timing->parsed()) {
      for (const auto& r : dmlpg::run_timing(cfg, dir)) {
        std::cout << "h = " << fmt(r.h) << "  nodes " << r.nodes << "  assembly " << fmt(r.assembly) << " s  solve "
                  << fmt(r.solve) << " s\n";
      }
    }
    std::cout << "wrote " << dir.string() << '\n';
  } catch (const dmlpg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return exit_solver;
  }
  return 0;
}

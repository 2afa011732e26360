#include <CLI11.hpp>

#include <iostream>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Newton solves, continuation, classification and energy-bound checks for "
               "higher-order semilinear ODE patterns"};
  std::string config;
  std::string out;
  int jobs = 1;
  bool verbose = false;
  app.add_option("--config", config, "Experiment config file, or a directory of *.json scenarios")
      ->required();
  app.add_option("--out", out, "Output directory (per-scenario subdirectories for a directory)");
  app.add_option("--jobs", jobs, "Worker threads for a scenario directory")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "Progress messages on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sturmcont::cli::exit_config;
  }

  const auto entries = sturmcont::cli::run_path(config, out, jobs, verbose);
  if (entries.empty()) {
    std::cerr << "no *.json configs found under " << config << "\n";
    return sturmcont::cli::exit_config;
  }
  for (const auto& e : entries) {
    std::cout << e.config_path << ": " << e.result.status << " (exit " << e.result.exit_code << ")";
    if (!e.out_dir.empty()) std::cout << " -> " << e.out_dir;
    std::cout << "\n";
    if (!e.result.error.empty()) std::cerr << e.config_path << ": " << e.result.error << "\n";
  }
  return sturmcont::cli::batch_exit_code(entries);
}

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace sturmcont::cli {

using nlohmann::json;

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_no_convergence = 3 };

struct RunResult {
  int exit_code = exit_ok;
  std::string status;
  json summary;
  std::vector<std::string> files;  // relative to the output directory
  std::string error;
};

// Validates and executes one experiment config, writing artifacts and a
// manifest.json under out_dir. Nothing is written when validation fails.
RunResult run_config(const json& config, const std::string& out_dir, bool verbose = false);

// Parses a config file; ConfigError on unreadable or malformed JSON.
json load_config(const std::string& path);

struct BatchEntry {
  std::string config_path;
  std::string out_dir;
  RunResult result;
};

// Runs one file, or every *.json in a directory (sorted, one scenario per
// worker, each into out_dir/<stem>). out_dir may be empty to use the
// config's own output_dir.
std::vector<BatchEntry> run_path(const std::string& path, const std::string& out_dir, int jobs,
                                 bool verbose = false);

// Worst exit code of a batch (config errors dominate).
int batch_exit_code(const std::vector<BatchEntry>& entries);

}  // namespace sturmcont::cli

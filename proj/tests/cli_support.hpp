#pragma once

#include "cli.hpp"

#include "metricfreedom/io.hpp"
#include "metricfreedom/records.hpp"
#include "metricfreedom/simlab.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "mfree");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mf::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mfree_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Every regular file under dir, keyed by name.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files[entry.path().filename().string()] = mf::io::read_file(entry.path());
  }
  return files;
}

/// Concordant 10 question x 12 run grid with per-question noise.
inline std::filesystem::path write_grid(const std::filesystem::path& dir, double noise_high = 0.3) {
  mf::simlab::SyntheticRunsConfig cfg;
  cfg.n_questions = 10;
  cfg.n_runs = 12;
  cfg.noise_low = 0.05;
  cfg.noise_high = noise_high;
  const auto set = mf::simlab::synthetic_runs(cfg);
  const auto path = dir / "grid.jsonl";
  std::ofstream f(path);
  mf::write_run_records(f, set.records);
  return path;
}

inline std::string fixture(const std::string& name) { return std::string(MF_FIXTURE_DIR) + "/" + name; }

}  // namespace testing

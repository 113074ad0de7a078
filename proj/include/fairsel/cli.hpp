#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairsel/ci_test.hpp"
#include "fairsel/evaluation.hpp"
#include "fairsel/selector.hpp"

namespace fairsel::cli {

namespace fs = std::filesystem;

struct GenConfig {
  std::size_t n_features = 32;
  double p = 0.1;
  std::optional<std::size_t> k;
  std::size_t rows = 5000;
  std::uint64_t seed = 0;
  fs::path out = ".";
};

/// Writes scm.json, data.csv, roles.json and ground_truth.json.
void cmd_gen(const GenConfig& config);

struct SelectConfig {
  std::optional<fs::path> spec;
  std::optional<fs::path> data;
  std::optional<fs::path> roles;
  Backend backend = Backend::Oracle;
  Algorithm algorithm = Algorithm::SeqSel;
  double alpha = 0.01;
  bool subset_mode = false;
  std::uint64_t seed = 0;
  fs::path out = ".";
};

/// Writes selected.json, trace.jsonl and summary.json.
SelectionResult cmd_select(const SelectConfig& config);

struct EvalConfigFiles {
  fs::path data;
  fs::path roles;
  fs::path selected;
  std::optional<fs::path> spec;
  std::uint64_t seed = 0;
  std::size_t n_mc = 50000;
  fs::path out = ".";
};

/// Writes report.json with one entry per model.
std::vector<ModelEvaluation> cmd_eval(const EvalConfigFiles& config);

struct BenchConfig {
  std::vector<std::size_t> n_grid;
  std::vector<double> p_grid;
  std::optional<std::size_t> k;
  std::size_t seeds = 20;
  std::uint64_t seed = 0;
  fs::path out = ".";
};

/// Writes bench.csv.
std::vector<BenchRow> cmd_bench(const BenchConfig& config);

struct DsepConfig {
  fs::path spec;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> z;
};

/// "d-separated", or "d-connected" followed by a "path: ..." line.
std::string cmd_dsep(const DsepConfig& config);

/// Parses argv and dispatches. Errors go to `err` as one JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairsel::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairsel/classifier.hpp"
#include "fairsel/metrics.hpp"
#include "fairsel/scm.hpp"
#include "fairsel/selector.hpp"

namespace fairsel {

struct EvalConfig {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::size_t n_mc = 50000;
  /// Equal-frequency bins for continuous sensitive/admissible columns in cmi.
  int cmi_bins = 4;
  TrainConfig train;
  Exec exec = Exec::Parallel;
};

struct ModelEvaluation {
  std::string name;
  std::vector<std::string> features;
  LogRegModel model;
  FairnessReport report;
};

/// Seeded train/test split of row indices.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split train_test_split(std::size_t rows, double train_fraction, std::uint64_t seed);

/// Fairness report of a trained model on held-out rows. The interventional
/// gap is filled in only when `spec` is given and every sensitive and
/// admissible node is discrete.
FairnessReport fairness_report(const Dataset& test, const RoleAssignment& roles,
                               const LogRegModel& model, const ScmSpec* spec, const EvalConfig& config);

/// Trains and reports on three feature sets: "admissible_only", "all"
/// (admissible plus every candidate) and "selected" (admissible plus `selected`).
std::vector<ModelEvaluation> evaluate_models(const Dataset& data, const RoleAssignment& roles,
                                             const std::vector<std::string>& selected,
                                             const ScmSpec* spec, const EvalConfig& config);

}  // namespace fairsel

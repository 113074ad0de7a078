#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairsel/classifier.hpp"
#include "fairsel/exec.hpp"
#include "fairsel/scm.hpp"

namespace fairsel {

/// 0.5 * (|FPR_0 - FPR_1| + |TPR_0 - TPR_1|) between the groups s = 0 and s = 1.
double abs_odds_difference(std::span<const int> y_true, std::span<const int> y_pred,
                           std::span<const int> s);

/// Plug-in estimate of I(S; Y' | A) in nats, clamped at zero. `a` holds the
/// conditioning columns (may be empty).
double cmi(std::span<const int> s, std::span<const int> yprime, const std::vector<std::vector<int>>& a);

/// Equal-frequency bin index in [0, bins) for each value.
std::vector<int> quantile_bins(std::span<const double> values, int bins = 4);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

using Assignment = std::map<std::string, double>;

/// Every joint value of the given discrete nodes.
std::vector<Assignment> enumerate_assignments(const ScmSpec& spec, const std::vector<std::string>& nodes);

struct InterventionalGap {
  /// Largest |P(Y'=1 | do(s), do(a)) - P(Y'=1 | do(s'), do(a))| over a and s, s'.
  double label = 0.0;
  /// Same with mean predicted probability in place of P(Y'=1).
  double probability = 0.0;
};

/// Monte-Carlo interventional-fairness gap of a fixed model. Each (a, s)
/// cell draws `n_mc` rows from the mutilated model with its own derived seed.
InterventionalGap interventional_gap(const ScmSpec& spec, const LogRegModel& model,
                                     const std::vector<Assignment>& a_values,
                                     const std::vector<Assignment>& s_values, std::size_t n_mc,
                                     std::uint64_t seed, Exec exec = Exec::Parallel);

struct FairnessReport {
  double accuracy = 0.0;
  std::optional<double> abs_odds_difference;
  double cmi_nats = 0.0;
  std::optional<double> interventional_gap;
  std::optional<double> interventional_gap_probability;
};

}  // namespace fairsel

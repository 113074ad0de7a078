#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairsel/dataset.hpp"

namespace fairsel {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t iterations = 2000;
  double l2 = 1e-3;
  /// Recorded with the model; callers use it for their train/test split.
  std::uint64_t seed = 0;
  /// Train on z-scored inputs. Required for feature_importance.
  bool standardize = true;
};

/// L2-regularized logistic regression. Weights live in the standardized
/// input space when `config.standardize` is set.
struct LogRegModel {
  std::vector<std::string> features;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> means;   // per feature, 0 when not standardizing
  std::vector<double> scales;  // per feature, 1 when not standardizing
  TrainConfig config;
  double final_loss = 0.0;
  double final_gradient_norm = 0.0;
};

/// Mean log-loss plus (l2 / 2) * |w|^2 and its gradient. `design` is
/// row-major rows x features; the gradient lists the weights then the bias.
struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossAndGradient logistic_loss(std::span<const double> design, std::size_t rows,
                              std::span<const double> labels, std::span<const double> weights,
                              double bias, double l2);

/// Full-batch gradient descent from zero weights.
LogRegModel train(const Dataset& data, const std::vector<std::string>& features,
                  const std::string& target, const TrainConfig& config = {});

struct Predictions {
  std::vector<double> probability;
  std::vector<int> label;  // probability >= 0.5
};

Predictions predict(const LogRegModel& model, const Dataset& data);

/// |weight| per feature on standardized inputs, largest first.
std::vector<std::pair<std::string, double>> feature_importance(const LogRegModel& model);

}  // namespace fairsel

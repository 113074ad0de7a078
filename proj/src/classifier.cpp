#include "fairsel/classifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fairsel/errors.hpp"

namespace fairsel {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

struct Evaluation {
  double loss;
  Eigen::VectorXd grad_w;
  double grad_b;
};

Evaluation evaluate(const Eigen::Ref<const RowMatrix>& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double b, double l2) {
  const double n = static_cast<double>(x.rows());
  Eigen::VectorXd eta = x * w;
  eta.array() += b;
  double loss = 0.0;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    loss += softplus(eta[i]) - y[i] * eta[i];
    resid[i] = sigmoid(eta[i]) - y[i];
  }
  loss = loss / n + 0.5 * l2 * w.squaredNorm();
  Eigen::VectorXd grad_w = x.transpose() * resid / n + l2 * w;
  return {loss, std::move(grad_w), resid.sum() / n};
}

RowMatrix design_matrix(const LogRegModel& model, const Dataset& data) {
  RowMatrix x(static_cast<Eigen::Index>(data.rows()), static_cast<Eigen::Index>(model.features.size()));
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    const auto idx = data.find(model.features[j]);
    if (!idx) throw ContractError("data is missing model feature '" + model.features[j] + "'");
    const auto& col = data.column(*idx).values;
    for (std::size_t i = 0; i < col.size(); ++i)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (col[i] - model.means[j]) / model.scales[j];
  }
  return x;
}

}  // namespace

LossAndGradient logistic_loss(std::span<const double> design, std::size_t rows,
                              std::span<const double> labels, std::span<const double> weights,
                              double bias, double l2) {
  const auto d = static_cast<Eigen::Index>(weights.size());
  if (design.size() != rows * weights.size() || labels.size() != rows)
    throw ContractError("logistic_loss: inconsistent dimensions");
  const Eigen::Map<const RowMatrix> x(design.data(), static_cast<Eigen::Index>(rows), d);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(rows));
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), d);
  const Evaluation e = evaluate(x, y, w, bias, l2);
  LossAndGradient out{e.loss, std::vector<double>(e.grad_w.data(), e.grad_w.data() + d)};
  out.gradient.push_back(e.grad_b);
  return out;
}

LogRegModel train(const Dataset& data, const std::vector<std::string>& features,
                  const std::string& target, const TrainConfig& config) {
  const std::size_t n = data.rows();
  if (n < features.size() + 1)
    throw InsufficientDataError("logistic regression needs more rows than features");
  if (!(config.learning_rate > 0.0) || !(config.l2 >= 0.0))
    throw ContractError("invalid training configuration");

  const auto& ycol = data.column(target).values;
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (ycol[i] != 0.0 && ycol[i] != 1.0)
      throw ContractError("target '" + target + "' is not binary");
    y[static_cast<Eigen::Index>(i)] = ycol[i];
  }

  LogRegModel model;
  model.features = features;
  model.config = config;
  model.means.assign(features.size(), 0.0);
  model.scales.assign(features.size(), 1.0);
  if (config.standardize) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      const auto& col = data.column(features[j]).values;
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : col) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(n));
      model.means[j] = mean;
      model.scales[j] = sd > 1e-12 ? sd : 1.0;
    }
  }
  const RowMatrix x = design_matrix(model, data);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features.size()));
  double b = 0.0;
  Evaluation e = evaluate(x, y, w, b, config.l2);
  double previous = e.loss;
  int rising = 0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    w -= config.learning_rate * e.grad_w;
    b -= config.learning_rate * e.grad_b;
    e = evaluate(x, y, w, b, config.l2);
    if (!std::isfinite(e.loss)) throw TrainingError("training loss is not finite");
    rising = e.loss > previous ? rising + 1 : 0;
    if (rising >= 10) throw TrainingError("training loss increased for 10 consecutive iterations");
    previous = e.loss;
  }

  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = b;
  model.final_loss = e.loss;
  model.final_gradient_norm = std::sqrt(e.grad_w.squaredNorm() + e.grad_b * e.grad_b);
  return model;
}

Predictions predict(const LogRegModel& model, const Dataset& data) {
  if (model.weights.size() != model.features.size())
    throw ContractError("model weight count does not match feature count");
  const RowMatrix x = design_matrix(model, data);
  const Eigen::Map<const Eigen::VectorXd> w(model.weights.data(), static_cast<Eigen::Index>(model.weights.size()));
  Eigen::VectorXd eta = x * w;
  Predictions out;
  out.probability.resize(data.rows());
  out.label.resize(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out.probability[i] = sigmoid(eta[static_cast<Eigen::Index>(i)] + model.bias);
    out.label[i] = out.probability[i] >= 0.5 ? 1 : 0;
  }
  return out;
}

std::vector<std::pair<std::string, double>> feature_importance(const LogRegModel& model) {
  if (!model.config.standardize)
    throw ContractError("feature importance requires a model trained on standardized inputs");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t j = 0; j < model.features.size(); ++j)
    out.emplace_back(model.features[j], std::abs(model.weights[j]));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace fairsel

#include "fairsel/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fairsel/errors.hpp"

namespace fairsel {

namespace {

constexpr std::size_t kMinEvalRows = 10;

std::vector<int> as_codes(const Column& c, int bins) {
  if (c.discrete()) {
    std::vector<int> out(c.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(c.values[i]);
    return out;
  }
  return quantile_bins(c.values, bins);
}

/// Joint code over several columns.
std::vector<int> joint_codes(const Dataset& data, const std::vector<std::string>& names, int bins) {
  std::vector<int> out(data.rows(), 0);
  for (const auto& name : names) {
    const auto codes = as_codes(data.column(name), bins);
    const int width = *std::max_element(codes.begin(), codes.end()) + 1;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * width + codes[i];
  }
  return out;
}

}  // namespace

Split train_test_split(std::size_t rows, double train_fraction, std::uint64_t seed) {
  if (rows < kMinEvalRows)
    throw InsufficientDataError("train/test split needs at least " + std::to_string(kMinEvalRows) + " rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ContractError("train fraction must lie in (0, 1)");
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, 0x5b117));
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = std::clamp<std::size_t>(
      static_cast<std::size_t>(train_fraction * static_cast<double>(rows)), 1, rows - 1);
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return s;
}

FairnessReport fairness_report(const Dataset& test, const RoleAssignment& roles,
                               const LogRegModel& model, const ScmSpec* spec, const EvalConfig& config) {
  FairnessReport report;
  const Predictions pred = predict(model, test);
  const std::vector<int> truth = test.codes(roles.target);
  report.accuracy = accuracy(truth, pred.label);

  const std::vector<int> s = joint_codes(test, roles.sensitive, config.cmi_bins);
  if (std::all_of(s.begin(), s.end(), [](int v) { return v == 0 || v == 1; })) {
    try {
      report.abs_odds_difference = abs_odds_difference(truth, pred.label, s);
    } catch (const DegeneracyError&) {
      report.abs_odds_difference.reset();
    }
  }

  std::vector<std::vector<int>> a;
  for (const auto& name : roles.admissible) a.push_back(as_codes(test.column(name), config.cmi_bins));
  report.cmi_nats = cmi(s, pred.label, a);

  if (spec != nullptr) {
    const Dag& dag = spec->dag();
    auto all_discrete = [&](const std::vector<std::string>& names) {
      return std::all_of(names.begin(), names.end(), [&](const auto& n) { return spec->discrete(dag.id(n)); });
    };
    if (all_discrete(roles.sensitive) && all_discrete(roles.admissible)) {
      const auto gap = interventional_gap(*spec, model, enumerate_assignments(*spec, roles.admissible),
                                          enumerate_assignments(*spec, roles.sensitive), config.n_mc,
                                          derive_seed(config.seed, 0x9a9), config.exec);
      report.interventional_gap = gap.label;
      report.interventional_gap_probability = gap.probability;
    }
  }
  return report;
}

std::vector<ModelEvaluation> evaluate_models(const Dataset& data, const RoleAssignment& roles,
                                             const std::vector<std::string>& selected,
                                             const ScmSpec* spec, const EvalConfig& config) {
  const Split split = train_test_split(data.rows(), config.train_fraction, config.seed);
  const Dataset train_rows = data.take_rows(split.train);
  const Dataset test_rows = data.take_rows(split.test);

  std::vector<std::string> all = roles.admissible;
  all.insert(all.end(), roles.candidates.begin(), roles.candidates.end());
  std::vector<std::string> chosen = roles.admissible;
  chosen.insert(chosen.end(), selected.begin(), selected.end());

  std::vector<ModelEvaluation> out;
  for (auto& [name, features] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"admissible_only", roles.admissible}, {"all", all}, {"selected", chosen}}) {
    TrainConfig tc = config.train;
    tc.seed = config.seed;
    LogRegModel model = train(train_rows, features, roles.target, tc);
    FairnessReport report = fairness_report(test_rows, roles, model, spec, config);
    out.push_back({name, features, std::move(model), report});
  }
  return out;
}

}  // namespace fairsel

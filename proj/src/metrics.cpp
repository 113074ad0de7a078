#include "fairsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "fairsel/errors.hpp"

namespace fairsel {

double abs_odds_difference(std::span<const int> y_true, std::span<const int> y_pred,
                           std::span<const int> s) {
  if (y_true.size() != y_pred.size() || y_true.size() != s.size())
    throw ContractError("abs_odds_difference: columns differ in length");
  // counts[group][true label][predicted label]
  double counts[2][2][2] = {};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] > 1 || y_true[i] < 0 || y_true[i] > 1 || y_pred[i] < 0 || y_pred[i] > 1)
      throw ContractError("abs_odds_difference: columns must be binary");
    counts[s[i]][y_true[i]][y_pred[i]] += 1.0;
  }
  double fpr[2], tpr[2];
  for (int g = 0; g < 2; ++g) {
    const double negatives = counts[g][0][0] + counts[g][0][1];
    const double positives = counts[g][1][0] + counts[g][1][1];
    if (negatives == 0.0 || positives == 0.0)
      throw DegeneracyError("group s=" + std::to_string(g) + " lacks positive or negative labels");
    fpr[g] = counts[g][0][1] / negatives;
    tpr[g] = counts[g][1][1] / positives;
  }
  return 0.5 * (std::abs(fpr[0] - fpr[1]) + std::abs(tpr[0] - tpr[1]));
}

double cmi(std::span<const int> s, std::span<const int> yprime, const std::vector<std::vector<int>>& a) {
  const std::size_t n = s.size();
  if (n == 0) throw ContractError("cmi: empty data");
  if (yprime.size() != n) throw ContractError("cmi: columns differ in length");
  for (const auto& col : a)
    if (col.size() != n) throw ContractError("cmi: columns differ in length");

  // Dense codes for the joint conditioning value.
  std::map<std::vector<int>, std::size_t> strata;
  std::vector<std::size_t> stratum(n);
  std::vector<int> key(a.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < a.size(); ++k) key[k] = a[k][i];
    stratum[i] = strata.try_emplace(key, strata.size()).first->second;
  }
  auto dense = [n](std::span<const int> col) {
    std::map<int, std::size_t> codes;
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = codes.try_emplace(col[i], codes.size()).first->second;
    return std::pair{out, codes.size()};
  };
  const auto [sc, ns] = dense(s);
  const auto [yc, ny] = dense(yprime);
  const std::size_t na = strata.size();

  std::vector<double> joint(na * ns * ny, 0.0), as(na * ns, 0.0), ay(na * ny, 0.0), pa(na, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[(stratum[i] * ns + sc[i]) * ny + yc[i]] += 1.0;
    as[stratum[i] * ns + sc[i]] += 1.0;
    ay[stratum[i] * ny + yc[i]] += 1.0;
    pa[stratum[i]] += 1.0;
  }
  double total = 0.0;
  for (std::size_t t = 0; t < na; ++t)
    for (std::size_t u = 0; u < ns; ++u)
      for (std::size_t v = 0; v < ny; ++v) {
        const double c = joint[(t * ns + u) * ny + v];
        if (c == 0.0) continue;
        total += c * std::log(c * pa[t] / (as[t * ns + u] * ay[t * ny + v]));
      }
  return std::max(0.0, total / static_cast<double>(n));
}

std::vector<int> quantile_bins(std::span<const double> values, int bins) {
  if (bins < 1) throw ContractError("quantile_bins: bins must be positive");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
  std::vector<int> out(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    // Ties share the bin of their first occurrence.
    if (rank > 0 && values[order[rank]] == values[order[rank - 1]]) {
      out[order[rank]] = out[order[rank - 1]];
      continue;
    }
    out[order[rank]] = static_cast<int>(rank * static_cast<std::size_t>(bins) / n);
  }
  return out;
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw ContractError("accuracy: columns must be nonempty and equal in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<Assignment> enumerate_assignments(const ScmSpec& spec, const std::vector<std::string>& nodes) {
  std::vector<Assignment> out{Assignment{}};
  for (const auto& name : nodes) {
    const NodeId id = spec.dag().id(name);
    if (!spec.discrete(id)) throw ContractError("cannot enumerate values of continuous node '" + name + "'");
    std::vector<Assignment> next;
    for (const auto& partial : out)
      for (int v = 0; v < spec.cardinality(id); ++v) {
        Assignment a = partial;
        a[name] = v;
        next.push_back(std::move(a));
      }
    out = std::move(next);
  }
  return out;
}

InterventionalGap interventional_gap(const ScmSpec& spec, const LogRegModel& model,
                                     const std::vector<Assignment>& a_values,
                                     const std::vector<Assignment>& s_values, std::size_t n_mc,
                                     std::uint64_t seed, Exec exec) {
  const Dag& dag = spec.dag();
  for (const auto& f : model.features) {
    const auto id = dag.find(f);
    if (!id) throw ContractError("model feature '" + f + "' is not a node of the model");
    if (dag.role(*id) == Role::Sensitive || dag.role(*id) == Role::Target)
      throw ContractError("model feature '" + f + "' is a sensitive or target node");
  }
  if (s_values.size() < 2) throw ContractError("interventional_gap needs at least two sensitive values");
  if (a_values.empty()) throw ContractError("interventional_gap needs at least one admissible value");
  if (n_mc < 1) throw ContractError("interventional_gap needs n_mc >= 1");

  const std::size_t ns = s_values.size();
  const std::size_t cells = a_values.size() * ns;
  std::vector<double> p_label(cells), p_prob(cells);
  std::vector<std::exception_ptr> errors(cells);
  auto run_cell = [&](std::size_t c) {
    try {
      Assignment assignment = a_values[c / ns];
      for (const auto& [k, v] : s_values[c % ns]) assignment[k] = v;
      const Dataset draw = intervene_sample(spec, assignment, n_mc, derive_seed(seed, c), Exec::Serial);
      const Predictions pred = predict(model, draw);
      p_label[c] = std::accumulate(pred.label.begin(), pred.label.end(), 0.0) / static_cast<double>(n_mc);
      p_prob[c] = std::accumulate(pred.probability.begin(), pred.probability.end(), 0.0) /
                  static_cast<double>(n_mc);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const long long count = static_cast<long long>(cells);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long c = 0; c < count; ++c) run_cell(static_cast<std::size_t>(c));
  } else {
    for (long long c = 0; c < count; ++c) run_cell(static_cast<std::size_t>(c));
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  InterventionalGap gap;
  for (std::size_t a = 0; a < a_values.size(); ++a)
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = i + 1; j < ns; ++j) {
        gap.label = std::max(gap.label, std::abs(p_label[a * ns + i] - p_label[a * ns + j]));
        gap.probability = std::max(gap.probability, std::abs(p_prob[a * ns + i] - p_prob[a * ns + j]));
      }
  return gap;
}

}  // namespace fairsel

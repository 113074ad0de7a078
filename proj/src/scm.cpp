#include "fairsel/scm.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <random>

#include "fairsel/errors.hpp"

namespace fairsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<ScmSpec::Term> compile_terms(const Dag& dag, NodeId node,
                                         const std::map<std::string, double>& weights) {
  std::vector<ScmSpec::Term> terms;
  for (const auto& [name, w] : weights) {
    const NodeId p = dag.id(name);
    if (!dag.has_edge(p, node))
      throw ContractError("mechanism of '" + dag.name(node) + "' weights non-parent '" + name + "'");
    if (!std::isfinite(w)) throw ContractError("non-finite weight on " + name + " -> " + dag.name(node));
    if (w != 0.0) terms.push_back({p, w});
  }
  std::sort(terms.begin(), terms.end(), [](auto a, auto b) { return a.parent < b.parent; });
  return terms;
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

ScmSpec::ScmSpec(Dag dag, std::vector<Mechanism> mechanisms)
    : dag_(std::move(dag)), mechanisms_(std::move(mechanisms)) {
  const std::size_t n = dag_.size();
  if (mechanisms_.size() != n)
    throw ContractError("expected " + std::to_string(n) + " mechanisms, got " +
                        std::to_string(mechanisms_.size()));
  cardinality_.assign(n, 0);
  terms_.assign(n, {});
  cpt_parents_.assign(n, {});
  for (NodeId i = 0; i < n; ++i) {
    std::visit(Overloaded{
                   [&](const LinearGaussian&) { cardinality_[i] = 0; },
                   [&](const DiscreteCpt& m) { cardinality_[i] = m.cardinality; },
                   [&](const LogisticBernoulli&) { cardinality_[i] = 2; },
               },
               mechanisms_[i]);
  }

  for (NodeId i = 0; i < n; ++i) {
    const std::string& name = dag_.name(i);
    std::visit(
        Overloaded{
            [&](const LinearGaussian& m) {
              if (!(m.noise_sd > 0.0) || !std::isfinite(m.noise_sd))
                throw ContractError("noise_sd of '" + name + "' must be positive");
              if (!std::isfinite(m.intercept))
                throw ContractError("intercept of '" + name + "' must be finite");
              terms_[i] = compile_terms(dag_, i, m.weights);
            },
            [&](const LogisticBernoulli& m) {
              if (!std::isfinite(m.intercept))
                throw ContractError("intercept of '" + name + "' must be finite");
              terms_[i] = compile_terms(dag_, i, m.weights);
            },
            [&](const DiscreteCpt& m) {
              if (m.cardinality < 2) throw ContractError("cardinality of '" + name + "' must be >= 2");
              std::vector<NodeId> ps;
              std::size_t rows = 1;
              for (const auto& pname : m.parents) {
                const NodeId p = dag_.id(pname);
                if (!dag_.has_edge(p, i))
                  throw ContractError("CPT of '" + name + "' lists non-parent '" + pname + "'");
                if (cardinality_[p] == 0)
                  throw ContractError("CPT of '" + name + "' has continuous parent '" + pname + "'");
                ps.push_back(p);
                rows *= static_cast<std::size_t>(cardinality_[p]);
              }
              if (make_set(ps).size() != ps.size() || ps.size() != dag_.parents(i).size())
                throw ContractError("CPT of '" + name + "' must list each parent exactly once");
              if (m.table.size() != rows)
                throw ContractError("CPT of '" + name + "' has " + std::to_string(m.table.size()) +
                                    " rows, expected " + std::to_string(rows));
              for (const auto& row : m.table) {
                if (row.size() != static_cast<std::size_t>(m.cardinality))
                  throw ContractError("CPT row of '" + name + "' has wrong width");
                double sum = 0.0;
                for (double p : row) {
                  if (!(p >= 0.0) || !std::isfinite(p))
                    throw ContractError("CPT of '" + name + "' has invalid probability");
                  sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                  throw ContractError("CPT row of '" + name + "' does not sum to 1");
              }
              cpt_parents_[i] = std::move(ps);
            },
        },
        mechanisms_[i]);
  }
}

namespace {

struct Clamp {
  bool active = false;
  double value = 0.0;
};

void fill_block(const ScmSpec& spec, NodeId node, std::vector<std::vector<double>>& cols,
                std::size_t block, std::size_t n, std::uint64_t seed) {
  const std::size_t begin = block * kSampleBlock;
  const std::size_t end = std::min(n, begin + kSampleBlock);
  std::mt19937_64 rng(derive_seed(derive_seed(seed, node), block));
  std::vector<double>& out = cols[node];
  const auto& terms = spec.terms(node);

  std::visit(Overloaded{
                 [&](const LinearGaussian& m) {
                   std::normal_distribution<double> noise(0.0, m.noise_sd);
                   for (std::size_t r = begin; r < end; ++r) {
                     double v = m.intercept;
                     for (const auto& t : terms) v += t.weight * cols[t.parent][r];
                     out[r] = v + noise(rng);
                   }
                 },
                 [&](const LogisticBernoulli& m) {
                   std::uniform_real_distribution<double> unif(0.0, 1.0);
                   for (std::size_t r = begin; r < end; ++r) {
                     double v = m.intercept;
                     for (const auto& t : terms) v += t.weight * cols[t.parent][r];
                     out[r] = unif(rng) < sigmoid(v) ? 1.0 : 0.0;
                   }
                 },
                 [&](const DiscreteCpt& m) {
                   std::uniform_real_distribution<double> unif(0.0, 1.0);
                   const auto& ps = spec.cpt_parents(node);
                   for (std::size_t r = begin; r < end; ++r) {
                     std::size_t row = 0;
                     for (NodeId p : ps)
                       row = row * static_cast<std::size_t>(spec.cardinality(p)) +
                             static_cast<std::size_t>(cols[p][r]);
                     const auto& probs = m.table[row];
                     const double u = unif(rng);
                     double acc = 0.0;
                     int value = m.cardinality - 1;
                     for (int k = 0; k < m.cardinality; ++k) {
                       acc += probs[static_cast<std::size_t>(k)];
                       if (u < acc) {
                         value = k;
                         break;
                       }
                     }
                     out[r] = value;
                   }
                 },
             },
             spec.mechanism(node));
}

Dataset sample_impl(const ScmSpec& spec, const std::vector<Clamp>& clamps, std::size_t n,
                    std::uint64_t seed, Exec exec) {
  if (n < 1) throw ContractError("sample size must be at least 1");
  const Dag& dag = spec.dag();
  std::vector<std::vector<double>> cols(dag.size(), std::vector<double>(n));
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;

  for (NodeId node : dag.topological_order()) {
    if (clamps[node].active) {
      std::fill(cols[node].begin(), cols[node].end(), clamps[node].value);
      continue;
    }
    if (exec == Exec::Parallel && blocks > 1) {
      const long long nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
      for (long long b = 0; b < nb; ++b) fill_block(spec, node, cols, static_cast<std::size_t>(b), n, seed);
    } else {
      for (std::size_t b = 0; b < blocks; ++b) fill_block(spec, node, cols, b, n, seed);
    }
  }

  std::vector<Column> out;
  out.reserve(dag.size());
  for (NodeId i = 0; i < dag.size(); ++i) {
    Column c;
    c.name = dag.name(i);
    c.role = dag.role(i);
    c.kind = spec.discrete(i) ? ColumnKind::Discrete : ColumnKind::Continuous;
    c.cardinality = spec.cardinality(i);
    c.values = std::move(cols[i]);
    out.push_back(std::move(c));
  }
  return Dataset(std::move(out));
}

}  // namespace

Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed, Exec exec) {
  return sample_impl(spec, std::vector<Clamp>(spec.dag().size()), n, seed, exec);
}

Dataset intervene_sample(const ScmSpec& spec, const std::map<std::string, double>& assignments,
                         std::size_t n, std::uint64_t seed, Exec exec) {
  const Dag& dag = spec.dag();
  std::vector<Clamp> clamps(dag.size());
  for (const auto& [name, value] : assignments) {
    const NodeId id = dag.id(name);
    if (dag.role(id) == Role::Target)
      throw ContractError("cannot intervene on target '" + name + "'");
    if (!std::isfinite(value)) throw ContractError("intervention value for '" + name + "' is not finite");
    if (spec.discrete(id) &&
        (value != std::floor(value) || value < 0 || value >= spec.cardinality(id)))
      throw ContractError("intervention value " + std::to_string(value) + " invalid for discrete '" +
                          name + "'");
    clamps[id] = {true, value};
  }
  return sample_impl(spec, clamps, n, seed, exec);
}

ScmSpec scale_weights(const ScmSpec& spec, const std::string& parent,
                      const std::vector<std::string>& children, double factor) {
  const Dag& dag = spec.dag();
  dag.id(parent);
  std::vector<Mechanism> mechs = spec.mechanisms();
  for (const auto& child : children) {
    Mechanism& m = mechs.at(dag.id(child));
    auto scale = [&](std::map<std::string, double>& weights) {
      auto it = weights.find(parent);
      if (it == weights.end())
        throw ContractError("'" + child + "' has no weight on '" + parent + "'");
      it->second *= factor;
    };
    if (auto* lg = std::get_if<LinearGaussian>(&m)) {
      scale(lg->weights);
    } else if (auto* lb = std::get_if<LogisticBernoulli>(&m)) {
      scale(lb->weights);
    } else {
      throw ContractError("cannot rescale weights of CPT node '" + child + "'");
    }
  }
  return ScmSpec(dag, std::move(mechs));
}

namespace {

constexpr double kCleanInTargetRate = 0.3;
constexpr double kCleanChildOfAdmissibleRate = 0.5;

Benchmark build_benchmark(const std::vector<bool>& biased, std::mt19937_64& rng) {
  const std::size_t n = biased.size();
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);
  std::uniform_real_distribution<double> strong(1.0, 1.5);
  std::bernoulli_distribution coin(0.5);
  auto signed_weight = [&] { return coin(rng) ? magnitude(rng) : -magnitude(rng); };

  std::vector<Dag::Node> nodes;
  nodes.push_back({"S", Role::Sensitive});
  nodes.push_back({"A", Role::Admissible});
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"X" + std::to_string(i + 1), Role::Candidate});
  nodes.push_back({"Y", Role::Target});

  std::vector<Dag::Edge> edges{{"S", "A"}, {"A", "Y"}};
  std::vector<Mechanism> mechs;
  mechs.push_back(DiscreteCpt{2, {}, {{0.5, 0.5}}});
  mechs.push_back(DiscreteCpt{3, {"S"}, {{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}}});
  constexpr double kMeanS = 0.5;
  constexpr double kMeanA = 1.0;  // 0.5 * 0.7 + 0.5 * 1.3

  std::vector<std::string> biased_names, clean_names, clean_in_target;
  LogisticBernoulli target;
  target.weights["A"] = magnitude(rng);
  double mean_logit = target.weights["A"] * kMeanA;

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = nodes[i + 2].name;
    LinearGaussian feature;
    double mean = 0.0;
    if (biased[i]) {
      feature.weights["S"] = strong(rng);
      mean = feature.weights["S"] * kMeanS;
      edges.emplace_back("S", name);
      target.weights[name] = magnitude(rng);
      edges.emplace_back(name, "Y");
      biased_names.push_back(name);
    } else {
      clean_names.push_back(name);
      if (std::bernoulli_distribution(kCleanChildOfAdmissibleRate)(rng)) {
        feature.weights["A"] = signed_weight();
        mean = feature.weights["A"] * kMeanA;
        edges.emplace_back("A", name);
      }
      if (std::bernoulli_distribution(kCleanInTargetRate)(rng)) {
        target.weights[name] = signed_weight();
        edges.emplace_back(name, "Y");
        clean_in_target.push_back(name);
      }
    }
    if (auto it = target.weights.find(name); it != target.weights.end()) mean_logit += it->second * mean;
    mechs.push_back(std::move(feature));
  }
  target.intercept = -mean_logit;
  mechs.push_back(std::move(target));

  return Benchmark{ScmSpec(Dag(std::move(nodes), edges), std::move(mechs)), std::move(biased_names),
                   std::move(clean_names), std::move(clean_in_target)};
}

}  // namespace

Benchmark gen_benchmark(std::size_t n_features, double p_biased, std::uint64_t seed) {
  if (n_features < 1) throw ContractError("n_features must be at least 1");
  if (!(p_biased >= 0.0 && p_biased <= 1.0)) throw ContractError("p_biased must lie in [0, 1]");
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::bernoulli_distribution pick(p_biased);
  std::vector<bool> biased(n_features);
  for (std::size_t i = 0; i < n_features; ++i) biased[i] = pick(rng);
  std::mt19937_64 topo_rng(derive_seed(seed, 2));
  return build_benchmark(biased, topo_rng);
}

Benchmark gen_benchmark_k(std::size_t n_features, std::size_t k_biased, std::uint64_t seed) {
  if (n_features < 1) throw ContractError("n_features must be at least 1");
  if (k_biased > n_features) throw ContractError("k_biased exceeds n_features");
  std::mt19937_64 rng(derive_seed(seed, 3));
  std::vector<std::size_t> order(n_features);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> biased(n_features, false);
  for (std::size_t i = 0; i < k_biased; ++i) biased[order[i]] = true;
  std::mt19937_64 topo_rng(derive_seed(seed, 2));
  return build_benchmark(biased, topo_rng);
}

}  // namespace fairsel

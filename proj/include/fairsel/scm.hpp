#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fairsel/causal_graph.hpp"
#include "fairsel/dataset.hpp"
#include "fairsel/exec.hpp"

namespace fairsel {

/// value = intercept + sum(weight * parent) + N(0, noise_sd^2)
struct LinearGaussian {
  std::map<std::string, double> weights;
  double noise_sd = 1.0;
  double intercept = 0.0;
};

/// Categorical node. `parents` fixes the row layout of `table`: rows are
/// indexed in mixed radix over the parents' values, last parent fastest.
struct DiscreteCpt {
  int cardinality = 2;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> table;
};

/// Binary node: P(value = 1) = sigmoid(intercept + sum(weight * parent)).
struct LogisticBernoulli {
  std::map<std::string, double> weights;
  double intercept = 0.0;
};

using Mechanism = std::variant<LinearGaussian, DiscreteCpt, LogisticBernoulli>;

/// A structural causal model: a Dag plus one mechanism per node.
/// Validation happens here so that sampling never fails.
class ScmSpec {
 public:
  ScmSpec(Dag dag, std::vector<Mechanism> mechanisms);

  const Dag& dag() const noexcept { return dag_; }
  const Mechanism& mechanism(NodeId id) const { return mechanisms_.at(id); }
  const std::vector<Mechanism>& mechanisms() const noexcept { return mechanisms_; }
  bool discrete(NodeId id) const { return cardinality_.at(id) > 0; }
  /// 0 for continuous nodes.
  int cardinality(NodeId id) const { return cardinality_.at(id); }

  struct Term {
    NodeId parent;
    double weight;
  };
  /// Parent terms of a linear or logistic mechanism, in parent-id order.
  const std::vector<Term>& terms(NodeId id) const { return terms_.at(id); }
  /// Parent ids of a CPT node in table layout order.
  const std::vector<NodeId>& cpt_parents(NodeId id) const { return cpt_parents_.at(id); }

 private:
  Dag dag_;
  std::vector<Mechanism> mechanisms_;
  std::vector<int> cardinality_;
  std::vector<std::vector<Term>> terms_;
  std::vector<std::vector<NodeId>> cpt_parents_;
};

/// Observational draw by ancestral sampling. Deterministic in (spec, n, seed)
/// and independent of `exec`.
Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed,
               Exec exec = Exec::Parallel);

/// Draw from the mutilated model in which each assigned node is clamped.
/// Unassigned nodes consume exactly the random stream they would in `sample`.
Dataset intervene_sample(const ScmSpec& spec, const std::map<std::string, double>& assignments,
                         std::size_t n, std::uint64_t seed, Exec exec = Exec::Parallel);

/// Rows per independently seeded sampling block.
inline constexpr std::size_t kSampleBlock = 4096;

/// Copy of `spec` with the weights on edges parent -> child (child in
/// `children`) multiplied by `factor`. Only linear and logistic children.
ScmSpec scale_weights(const ScmSpec& spec, const std::string& parent,
                      const std::vector<std::string>& children, double factor);

/// Synthetic fairness benchmark with known ground truth.
///
/// Topology: binary sensitive S; ternary admissible A with parent S; binary
/// target Y (logistic) with parents A, every biased feature, and a random
/// subset of clean features. A biased feature is a child of S with a strong
/// positive weight. A clean feature is either a child of A or a root.
struct Benchmark {
  ScmSpec model;
  std::vector<std::string> biased;
  std::vector<std::string> clean;
  std::vector<std::string> clean_in_target;
};

/// Each feature is biased independently with probability `p_biased`.
Benchmark gen_benchmark(std::size_t n_features, double p_biased, std::uint64_t seed);
/// Exactly `k_biased` features, at seeded random positions, are biased.
Benchmark gen_benchmark_k(std::size_t n_features, std::size_t k_biased, std::uint64_t seed);

}  // namespace fairsel

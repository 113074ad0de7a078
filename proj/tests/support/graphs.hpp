#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairsel/causal_graph.hpp"

namespace fairsel::testing {

/// Role from a naming convention: S* sensitive, A* admissible, Y target,
/// anything else a candidate.
inline Role role_of(const std::string& name) {
  if (name == "Y") return Role::Target;
  if (name[0] == 'S') return Role::Sensitive;
  if (name[0] == 'A') return Role::Admissible;
  return Role::Candidate;
}

/// Builds a Dag from "u->v" edge strings plus isolated nodes. Adds an
/// isolated target Y when none is named.
inline Dag graph(const std::vector<std::string>& edges, const std::vector<std::string>& isolated = {}) {
  std::vector<std::string> order;
  auto add = [&](const std::string& n) {
    if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
  };
  std::vector<Dag::Edge> es;
  for (const auto& e : edges) {
    const auto arrow = e.find("->");
    es.emplace_back(e.substr(0, arrow), e.substr(arrow + 2));
    add(es.back().first);
    add(es.back().second);
  }
  for (const auto& n : isolated) add(n);
  add("Y");
  std::vector<Dag::Node> nodes;
  for (const auto& n : order) nodes.push_back({n, role_of(n)});
  return Dag(std::move(nodes), es);
}

/// Random valid Dag: sensitive roots first, then admissible, candidates,
/// and the target last. Edges only go forward in that order and never into
/// a sensitive node.
inline Dag random_dag(std::uint64_t seed, std::size_t max_nodes = 15, std::size_t max_edges = 25) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t n = uniform(5, max_nodes);
  const std::size_t n_s = uniform(1, 2);
  const std::size_t n_a = uniform(0, std::min<std::size_t>(3, n - n_s - 2));
  std::vector<Dag::Node> nodes;
  for (std::size_t i = 0; i < n_s; ++i) nodes.push_back({"S" + std::to_string(i + 1), Role::Sensitive});
  for (std::size_t i = 0; i < n_a; ++i) nodes.push_back({"A" + std::to_string(i + 1), Role::Admissible});
  for (std::size_t i = n_s + n_a; i + 1 < n; ++i)
    nodes.push_back({"X" + std::to_string(i - n_s - n_a + 1), Role::Candidate});
  nodes.push_back({"Y", Role::Target});

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = n_s; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const std::size_t m = std::min(pairs.size(), uniform(n - 1, max_edges));
  std::vector<Dag::Edge> edges;
  for (std::size_t e = 0; e < m; ++e)
    edges.emplace_back(nodes[pairs[e].first].name, nodes[pairs[e].second].name);
  return Dag(std::move(nodes), edges);
}

}  // namespace fairsel::testing

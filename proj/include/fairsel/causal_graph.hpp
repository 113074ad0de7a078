#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairsel {

using NodeId = std::size_t;
/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

enum class Role { Sensitive, Admissible, Candidate, Target };

std::string_view to_string(Role role);
/// Parses the lowercase role names used in spec files. Throws ArgumentError.
Role parse_role(std::string_view text);

/// Sorts and deduplicates in place, returning the result.
NodeSet make_set(std::vector<NodeId> ids);

/// Immutable directed acyclic graph over named variables with roles.
///
/// Construction validates acyclicity, that sensitive nodes are roots, and
/// that there is exactly one target node and it is a sink.
class Dag {
 public:
  struct Node {
    std::string name;
    Role role;
  };
  using Edge = std::pair<std::string, std::string>;

  Dag(std::vector<Node> nodes, const std::vector<Edge>& edges);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::string& name(NodeId id) const { return nodes_.at(id).name; }
  Role role(NodeId id) const { return nodes_.at(id).role; }
  NodeId id(std::string_view name) const;
  std::optional<NodeId> find(std::string_view name) const;
  NodeSet ids(const std::vector<std::string>& names) const;
  std::vector<std::string> names(const NodeSet& ids) const;

  std::span<const NodeId> parents(NodeId id) const { return parents_.at(id); }
  std::span<const NodeId> children(NodeId id) const { return children_.at(id); }
  bool has_edge(NodeId from, NodeId to) const;

  NodeSet with_role(Role role) const;
  NodeId target() const noexcept { return target_; }
  const std::vector<NodeId>& topological_order() const noexcept { return topo_; }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::vector<Edge> edges() const;

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> topo_;
  std::size_t edge_count_ = 0;
  NodeId target_ = 0;
};

/// A simple path in the skeleton of a Dag.
struct Path {
  enum class Step { Forward, Backward };  // nodes[i] -> nodes[i+1] or nodes[i] <- nodes[i+1]
  std::vector<NodeId> nodes;
  std::vector<Step> steps;
};

/// Builds a Path from a node sequence, reading edge directions from the
/// graph. Throws StructuralError on a non-adjacent step or repeated node.
Path make_path(const Dag& dag, std::vector<NodeId> nodes);

/// True iff `z` blocks the path: some chain or fork has its middle node in
/// `z`, or some collider has neither itself nor any descendant in `z`.
bool is_blocked(const Dag& dag, const Path& path, const NodeSet& z);

/// d-separation via linear-time reachability over (node, direction) states.
bool d_separated(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// Reference d-separation: enumerates every simple path between x and y and
/// checks each with is_blocked. Exponential; for small graphs and tests.
bool d_separated_bruteforce(const Dag& dag, const NodeSet& x, const NodeSet& y,
                            const NodeSet& z);

/// An unblocked path from some node of x to some node of y, if one exists.
std::optional<Path> find_active_path(const Dag& dag, const NodeSet& x, const NodeSet& y,
                                     const NodeSet& z);

/// Copy of the graph with every edge into `targets` deleted.
Dag remove_incoming(const Dag& dag, const NodeSet& targets);

/// All nodes reachable along edge direction, excluding `v`.
NodeSet descendants(const Dag& dag, NodeId v);
/// Union of `vs` and their ancestors.
NodeSet ancestors_inclusive(const Dag& dag, const NodeSet& vs);

// Ground-truth oracles over the candidate set.

/// Candidates d-separated from the sensitive set given the admissible set
/// (or, with subset_mode, given some subset of it).
NodeSet oracle_c1(const Dag& dag, bool subset_mode = false);
/// Candidates outside `c1` d-separated from the target given admissible and c1.
NodeSet oracle_c2(const Dag& dag, const NodeSet& c1);
/// Full characterization of safe candidates: c1, c2, and candidates that are
/// not descendants of any sensitive node once admissible inputs are cut.
NodeSet oracle_theorem(const Dag& dag, bool subset_mode = false);

std::string format_path(const Dag& dag, const Path& path);

}  // namespace fairsel

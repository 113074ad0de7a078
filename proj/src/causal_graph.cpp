#include "fairsel/causal_graph.hpp"

#include <algorithm>
#include <functional>

#include "fairsel/errors.hpp"

namespace fairsel {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Sensitive:
      return "sensitive";
    case Role::Admissible:
      return "admissible";
    case Role::Candidate:
      return "candidate";
    case Role::Target:
      return "target";
  }
  return "candidate";
}

Role parse_role(std::string_view text) {
  if (text == "sensitive") return Role::Sensitive;
  if (text == "admissible") return Role::Admissible;
  if (text == "candidate") return Role::Candidate;
  if (text == "target") return Role::Target;
  throw ArgumentError("unknown role '" + std::string(text) + "'");
}

NodeSet make_set(std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Dag::Dag(std::vector<Node> nodes, const std::vector<Edge>& edges) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  index_.reserve(n);
  std::size_t targets = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (nodes_[i].name.empty()) throw StructuralError("node name must be nonempty");
    if (!index_.emplace(nodes_[i].name, i).second)
      throw StructuralError("duplicate node '" + nodes_[i].name + "'");
    if (nodes_[i].role == Role::Target) {
      ++targets;
      target_ = i;
    }
  }
  if (targets != 1)
    throw StructuralError("graph must have exactly one target node, found " +
                          std::to_string(targets));

  parents_.assign(n, {});
  children_.assign(n, {});
  for (const auto& [from, to] : edges) {
    const NodeId u = id(from);
    const NodeId v = id(to);
    if (u == v) throw StructuralError("self-loop on '" + from + "'");
    if (std::find(children_[u].begin(), children_[u].end(), v) != children_[u].end())
      throw StructuralError("duplicate edge " + from + " -> " + to);
    children_[u].push_back(v);
    parents_[v].push_back(u);
    ++edge_count_;
  }
  for (NodeId i = 0; i < n; ++i) {
    std::sort(parents_[i].begin(), parents_[i].end());
    std::sort(children_[i].begin(), children_[i].end());
    if (nodes_[i].role == Role::Sensitive && !parents_[i].empty())
      throw StructuralError("sensitive node '" + nodes_[i].name + "' must have no parents");
    if (nodes_[i].role == Role::Target && !children_[i].empty())
      throw StructuralError("target node '" + nodes_[i].name + "' must have no children");
  }

  // Kahn's algorithm; smallest ready id first so the order is canonical.
  std::vector<std::size_t> indegree(n);
  for (NodeId i = 0; i < n; ++i) indegree[i] = parents_[i].size();
  std::vector<NodeId> ready;
  for (NodeId i = n; i-- > 0;)
    if (indegree[i] == 0) ready.push_back(i);
  topo_.reserve(n);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), std::greater<>{});
    const NodeId v = ready.back();
    ready.pop_back();
    topo_.push_back(v);
    for (NodeId c : children_[v]) {
      if (--indegree[c] == 0) {
        ready.push_back(c);
        std::push_heap(ready.begin(), ready.end(), std::greater<>{});
      }
    }
  }
  if (topo_.size() != n) throw StructuralError("graph contains a cycle");
}

NodeId Dag::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw LookupError("unknown variable '" + std::string(name) + "'");
}

std::optional<NodeId> Dag::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeSet Dag::ids(const std::vector<std::string>& names) const {
  std::vector<NodeId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(id(n));
  return make_set(std::move(out));
}

std::vector<std::string> Dag::names(const NodeSet& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (NodeId i : ids) out.push_back(name(i));
  return out;
}

bool Dag::has_edge(NodeId from, NodeId to) const {
  const auto& c = children_.at(from);
  return std::binary_search(c.begin(), c.end(), to);
}

NodeSet Dag::with_role(Role role) const {
  NodeSet out;
  for (NodeId i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].role == role) out.push_back(i);
  return out;
}

std::vector<Dag::Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < nodes_.size(); ++u)
    for (NodeId v : children_[u]) out.emplace_back(nodes_[u].name, nodes_[v].name);
  return out;
}

Path make_path(const Dag& dag, std::vector<NodeId> nodes) {
  Path path;
  path.steps.reserve(nodes.empty() ? 0 : nodes.size() - 1);
  std::vector<char> seen(dag.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= dag.size()) throw StructuralError("path references unknown node");
    if (seen[nodes[i]]) throw StructuralError("path repeats node '" + dag.name(nodes[i]) + "'");
    seen[nodes[i]] = 1;
    if (i == 0) continue;
    const NodeId a = nodes[i - 1];
    const NodeId b = nodes[i];
    if (dag.has_edge(a, b)) {
      path.steps.push_back(Path::Step::Forward);
    } else if (dag.has_edge(b, a)) {
      path.steps.push_back(Path::Step::Backward);
    } else {
      throw StructuralError("path step " + dag.name(a) + " - " + dag.name(b) +
                            " is not an edge");
    }
  }
  path.nodes = std::move(nodes);
  return path;
}

namespace {

void check_path(const Dag& dag, const Path& path) {
  if (path.nodes.empty()) throw StructuralError("empty path");
  if (path.steps.size() + 1 != path.nodes.size())
    throw StructuralError("path step count does not match node count");
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    const NodeId a = path.nodes[i];
    const NodeId b = path.nodes[i + 1];
    if (a >= dag.size() || b >= dag.size()) throw StructuralError("path references unknown node");
    const bool ok = path.steps[i] == Path::Step::Forward ? dag.has_edge(a, b) : dag.has_edge(b, a);
    if (!ok)
      throw StructuralError("path step " + dag.name(a) + " - " + dag.name(b) +
                            " does not match the graph");
  }
}

bool contains(const NodeSet& s, NodeId v) { return std::binary_search(s.begin(), s.end(), v); }

void require_disjoint(const NodeSet& a, const NodeSet& b, const char* what) {
  for (NodeId v : a)
    if (contains(b, v)) throw ContractError(std::string("argument sets overlap: ") + what);
}

void require_known(const Dag& dag, const NodeSet& s) {
  for (NodeId v : s)
    if (v >= dag.size()) throw LookupError("node id out of range");
}

std::vector<char> membership(const Dag& dag, const NodeSet& s) {
  std::vector<char> m(dag.size(), 0);
  for (NodeId v : s) m[v] = 1;
  return m;
}

}  // namespace

bool is_blocked(const Dag& dag, const Path& path, const NodeSet& z) {
  check_path(dag, path);
  if (contains(z, path.nodes.front()) || contains(z, path.nodes.back()))
    throw ContractError("conditioning set contains a path endpoint");
  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    const NodeId mid = path.nodes[i];
    const bool into_from_left = path.steps[i - 1] == Path::Step::Forward;
    const bool into_from_right = path.steps[i] == Path::Step::Backward;
    if (into_from_left && into_from_right) {
      if (contains(z, mid)) continue;
      bool open = false;
      for (NodeId d : descendants(dag, mid))
        if (contains(z, d)) {
          open = true;
          break;
        }
      if (!open) return true;
    } else if (contains(z, mid)) {
      return true;
    }
  }
  return false;
}

NodeSet descendants(const Dag& dag, NodeId v) {
  if (v >= dag.size()) throw LookupError("node id out of range");
  std::vector<char> seen(dag.size(), 0);
  std::vector<NodeId> stack(dag.children(v).begin(), dag.children(v).end());
  NodeSet out;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = 1;
    out.push_back(u);
    for (NodeId c : dag.children(u))
      if (!seen[c]) stack.push_back(c);
  }
  return make_set(std::move(out));
}

NodeSet ancestors_inclusive(const Dag& dag, const NodeSet& vs) {
  require_known(dag, vs);
  std::vector<char> seen(dag.size(), 0);
  std::vector<NodeId> stack(vs.begin(), vs.end());
  NodeSet out;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = 1;
    out.push_back(u);
    for (NodeId p : dag.parents(u))
      if (!seen[p]) stack.push_back(p);
  }
  return make_set(std::move(out));
}

bool d_separated(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  require_known(dag, x);
  require_known(dag, y);
  require_known(dag, z);
  require_disjoint(x, y, "x and y");
  require_disjoint(x, z, "x and z");
  require_disjoint(y, z, "y and z");
  if (x.empty() || y.empty()) return true;

  const std::size_t n = dag.size();
  const std::vector<char> in_z = membership(dag, z);
  const std::vector<char> in_y = membership(dag, y);
  std::vector<char> z_anc(n, 0);
  for (NodeId a : ancestors_inclusive(dag, z)) z_anc[a] = 1;

  // State 2*v: arrived at v from a child (moving up).
  // State 2*v+1: arrived at v from a parent (moving down).
  std::vector<char> visited(2 * n, 0);
  std::vector<std::size_t> queue;
  queue.reserve(2 * n);
  for (NodeId v : x) queue.push_back(2 * v);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t state = queue[head];
    if (visited[state]) continue;
    visited[state] = 1;
    const NodeId v = state / 2;
    const bool up = (state % 2) == 0;
    if (!in_z[v] && in_y[v]) return false;
    if (up) {
      if (in_z[v]) continue;
      for (NodeId p : dag.parents(v))
        if (!visited[2 * p]) queue.push_back(2 * p);
      for (NodeId c : dag.children(v))
        if (!visited[2 * c + 1]) queue.push_back(2 * c + 1);
    } else {
      if (!in_z[v])
        for (NodeId c : dag.children(v))
          if (!visited[2 * c + 1]) queue.push_back(2 * c + 1);
      if (z_anc[v])
        for (NodeId p : dag.parents(v))
          if (!visited[2 * p]) queue.push_back(2 * p);
    }
  }
  return true;
}

bool d_separated_bruteforce(const Dag& dag, const NodeSet& x, const NodeSet& y,
                            const NodeSet& z) {
  require_known(dag, x);
  require_known(dag, y);
  require_known(dag, z);
  require_disjoint(x, y, "x and y");
  require_disjoint(x, z, "x and z");
  require_disjoint(y, z, "y and z");

  std::vector<char> on_path(dag.size(), 0);
  std::vector<NodeId> current;
  bool found_open = false;

  std::function<void(NodeId)> extend = [&](NodeId v) {
    if (found_open) return;
    if (contains(y, v)) {
      if (!is_blocked(dag, make_path(dag, current), z)) found_open = true;
      return;
    }
    auto visit = [&](NodeId u) {
      if (on_path[u]) return;
      on_path[u] = 1;
      current.push_back(u);
      extend(u);
      current.pop_back();
      on_path[u] = 0;
    };
    for (NodeId p : dag.parents(v)) visit(p);
    for (NodeId c : dag.children(v)) visit(c);
  };

  for (NodeId start : x) {
    on_path[start] = 1;
    current = {start};
    extend(start);
    on_path[start] = 0;
    if (found_open) return false;
  }
  return true;
}

std::optional<Path> find_active_path(const Dag& dag, const NodeSet& x, const NodeSet& y,
                                     const NodeSet& z) {
  if (d_separated(dag, x, y, z)) return std::nullopt;

  const std::vector<char> in_z = membership(dag, z);
  const std::vector<char> in_y = membership(dag, y);
  std::vector<char> z_anc(dag.size(), 0);
  for (NodeId a : ancestors_inclusive(dag, z)) z_anc[a] = 1;

  // Depth-first over simple paths, pruning as soon as an interior node blocks.
  std::vector<char> on_path(dag.size(), 0);
  std::vector<NodeId> nodes;
  std::vector<Path::Step> steps;

  std::function<bool(NodeId)> extend = [&](NodeId v) -> bool {
    if (in_y[v] && nodes.size() > 1) return true;
    auto try_step = [&](NodeId u, Path::Step step) -> bool {
      if (on_path[u]) return false;
      if (!steps.empty()) {
        const bool collider = steps.back() == Path::Step::Forward && step == Path::Step::Backward;
        if (collider ? !z_anc[v] : in_z[v]) return false;
      }
      on_path[u] = 1;
      nodes.push_back(u);
      steps.push_back(step);
      if (extend(u)) return true;
      steps.pop_back();
      nodes.pop_back();
      on_path[u] = 0;
      return false;
    };
    for (NodeId c : dag.children(v))
      if (try_step(c, Path::Step::Forward)) return true;
    for (NodeId p : dag.parents(v))
      if (try_step(p, Path::Step::Backward)) return true;
    return false;
  };

  for (NodeId start : x) {
    on_path[start] = 1;
    nodes = {start};
    steps.clear();
    if (extend(start)) return Path{nodes, steps};
    on_path[start] = 0;
  }
  return std::nullopt;
}

Dag remove_incoming(const Dag& dag, const NodeSet& targets) {
  require_known(dag, targets);
  std::vector<Dag::Edge> kept;
  kept.reserve(dag.edge_count());
  for (NodeId u = 0; u < dag.size(); ++u)
    for (NodeId v : dag.children(u))
      if (!contains(targets, v)) kept.emplace_back(dag.name(u), dag.name(v));
  return Dag(dag.nodes(), kept);
}

NodeSet oracle_c1(const Dag& dag, bool subset_mode) {
  const NodeSet s = dag.with_role(Role::Sensitive);
  const NodeSet a = dag.with_role(Role::Admissible);
  NodeSet out;
  for (NodeId x : dag.with_role(Role::Candidate)) {
    if (d_separated(dag, {x}, s, a)) {
      out.push_back(x);
      continue;
    }
    if (!subset_mode) continue;
    const std::size_t subsets = std::size_t{1} << a.size();
    for (std::size_t mask = 0; mask + 1 < subsets; ++mask) {
      NodeSet sub;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (mask & (std::size_t{1} << i)) sub.push_back(a[i]);
      if (d_separated(dag, {x}, s, sub)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

NodeSet oracle_c2(const Dag& dag, const NodeSet& c1) {
  NodeSet z = dag.with_role(Role::Admissible);
  z.insert(z.end(), c1.begin(), c1.end());
  z = make_set(std::move(z));
  const NodeSet y{dag.target()};
  NodeSet out;
  for (NodeId x : dag.with_role(Role::Candidate)) {
    if (contains(c1, x)) continue;
    if (d_separated(dag, {x}, y, z)) out.push_back(x);
  }
  return out;
}

NodeSet oracle_theorem(const Dag& dag, bool subset_mode) {
  const NodeSet c1 = oracle_c1(dag, subset_mode);
  const NodeSet c2 = oracle_c2(dag, c1);
  const Dag cut = remove_incoming(dag, dag.with_role(Role::Admissible));
  std::vector<char> tainted(dag.size(), 0);
  for (NodeId s : dag.with_role(Role::Sensitive))
    for (NodeId d : descendants(cut, s)) tainted[d] = 1;

  NodeSet out;
  for (NodeId x : dag.with_role(Role::Candidate))
    if (contains(c1, x) || contains(c2, x) || !tainted[x]) out.push_back(x);
  return out;
}

std::string format_path(const Dag& dag, const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (i > 0) out += path.steps[i - 1] == Path::Step::Forward ? " -> " : " <- ";
    out += dag.name(path.nodes[i]);
  }
  return out;
}

}  // namespace fairsel

#include "fairsel/selector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include "fairsel/errors.hpp"
#include "fairsel/scm.hpp"

namespace fairsel {

RoleAssignment roles_from_dag(const Dag& dag) {
  RoleAssignment roles;
  roles.sensitive = dag.names(dag.with_role(Role::Sensitive));
  roles.admissible = dag.names(dag.with_role(Role::Admissible));
  roles.candidates = dag.names(dag.with_role(Role::Candidate));
  roles.target = dag.name(dag.target());
  return roles;
}

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::SeqSel ? "seqsel" : "grpsel";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "seqsel") return Algorithm::SeqSel;
  if (text == "grpsel") return Algorithm::GrpSel;
  throw ArgumentError("unknown algorithm '" + std::string(text) + "' (expected seqsel or grpsel)");
}

namespace {

constexpr std::size_t kMaxSubsetAdmissible = 20;

struct Resolved {
  std::vector<VarId> sensitive;
  std::vector<VarId> admissible;
  std::vector<VarId> candidates;
  VarId target = 0;
  std::vector<std::vector<VarId>> conditioning;  // phase-one conditioning sets, full A first
};

Resolved resolve(const CiTester& tester, const RoleAssignment& roles, bool subset_mode) {
  if (roles.sensitive.empty()) throw ContractError("roles: missing sensitive variables");
  if (roles.target.empty()) throw ContractError("roles: missing target variable");
  Resolved r;
  r.sensitive = tester.indices(roles.sensitive);
  r.admissible = tester.indices(roles.admissible);
  r.candidates = tester.indices(roles.candidates);
  r.target = tester.index(roles.target);

  std::vector<char> seen(tester.variables().size(), 0);
  auto claim = [&](VarId v) {
    if (seen[v]) throw ContractError("roles: variable '" + tester.variables()[v] + "' has two roles");
    seen[v] = 1;
  };
  for (VarId v : r.sensitive) claim(v);
  for (VarId v : r.admissible) claim(v);
  for (VarId v : r.candidates) claim(v);
  claim(r.target);

  r.conditioning.push_back(r.admissible);
  if (subset_mode) {
    const std::size_t k = r.admissible.size();
    if (k > kMaxSubsetAdmissible)
      throw ContractError("subset mode supports at most " + std::to_string(kMaxSubsetAdmissible) +
                          " admissible variables");
    for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << k); ++mask) {
      std::vector<VarId> sub;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) sub.push_back(r.admissible[i]);
      r.conditioning.push_back(std::move(sub));
    }
  }
  return r;
}

/// Is `group` independent of S given some allowed conditioning set?
bool test_sensitive(const CiTester& tester, const Resolved& r, const std::vector<VarId>& group,
                    double alpha, std::vector<TraceEntry>& trace) {
  for (const auto& z : r.conditioning) {
    CiQuery q{group, r.sensitive, z, alpha};
    CiResult res = tester.test(q);
    trace.push_back({Phase::Sensitive, std::move(q), res});
    if (res.independent) return true;
  }
  return false;
}

bool test_target(const CiTester& tester, const Resolved& r, const std::vector<VarId>& group,
                 const std::vector<VarId>& z, double alpha, std::vector<TraceEntry>& trace) {
  CiQuery q{group, {r.target}, z, alpha};
  CiResult res = tester.test(q);
  trace.push_back({Phase::Target, std::move(q), res});
  return res.independent;
}

/// Runs `body(i, trace_i)` for each i, possibly concurrently, and returns the
/// per-item traces in index order. Exceptions are rethrown after the loop.
template <class Body>
std::vector<std::vector<TraceEntry>> for_each_item(std::size_t count, Exec exec, Body body,
                                                   std::vector<char>& accepted) {
  std::vector<std::vector<TraceEntry>> traces(count);
  accepted.assign(count, 0);
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
  auto step = [&](long long i) {
    try {
      accepted[i] = body(static_cast<std::size_t>(i), traces[i]) ? 1 : 0;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < n; ++i) step(i);
  } else {
    for (long long i = 0; i < n; ++i) step(i);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

std::vector<VarId> conditioning_with(const std::vector<VarId>& admissible, const std::vector<VarId>& c1) {
  std::vector<VarId> z = admissible;
  z.insert(z.end(), c1.begin(), c1.end());
  return z;
}

SelectionResult finish(const CiTester& tester, const Resolved& r, const std::vector<char>& in_c1,
                       const std::vector<char>& in_c2, std::vector<TraceEntry> trace) {
  SelectionResult out;
  const auto& names = tester.variables();
  for (VarId v : r.candidates) {
    if (in_c1[v]) out.c1.push_back(names[v]);
    if (in_c2[v]) out.c2.push_back(names[v]);
    if (in_c1[v] || in_c2[v]) out.selected.push_back(names[v]);
  }
  for (const auto& e : trace) (e.phase == Phase::Sensitive ? out.phase1_tests : out.phase2_tests)++;
  out.test_count = trace.size();
  out.trace = std::move(trace);
  return out;
}

}  // namespace

SelectionResult seq_sel(const CiTester& tester, const RoleAssignment& roles,
                        const SelectionOptions& options) {
  const Resolved r = resolve(tester, roles, options.subset_mode);
  const std::size_t nvars = tester.variables().size();
  std::vector<char> in_c1(nvars, 0), in_c2(nvars, 0);
  std::vector<TraceEntry> trace;
  std::vector<char> accepted;

  auto phase1 = for_each_item(
      r.candidates.size(), options.exec,
      [&](std::size_t i, std::vector<TraceEntry>& t) {
        return test_sensitive(tester, r, {r.candidates[i]}, options.alpha, t);
      },
      accepted);
  std::vector<VarId> c1, rest;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    for (auto& e : phase1[i]) trace.push_back(std::move(e));
    if (accepted[i]) {
      c1.push_back(r.candidates[i]);
      in_c1[r.candidates[i]] = 1;
    } else {
      rest.push_back(r.candidates[i]);
    }
  }

  const std::vector<VarId> z = conditioning_with(r.admissible, c1);
  auto phase2 = for_each_item(
      rest.size(), options.exec,
      [&](std::size_t i, std::vector<TraceEntry>& t) {
        return test_target(tester, r, {rest[i]}, z, options.alpha, t);
      },
      accepted);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (auto& e : phase2[i]) trace.push_back(std::move(e));
    if (accepted[i]) in_c2[rest[i]] = 1;
  }
  return finish(tester, r, in_c1, in_c2, std::move(trace));
}

SelectionResult grp_sel(const CiTester& tester, const RoleAssignment& roles,
                        const SelectionOptions& options) {
  const Resolved r = resolve(tester, roles, options.subset_mode);
  const std::size_t nvars = tester.variables().size();
  std::vector<char> in_c1(nvars, 0), in_c2(nvars, 0);
  std::vector<TraceEntry> trace;
  std::uint64_t splits = 0;

  // Recursive halving; `accept` runs the group query for the current phase.
  auto search = [&](auto& self, const std::vector<VarId>& group, auto&& accept,
                    std::vector<char>& into, std::uint64_t phase_tag) -> void {
    if (accept(group)) {
      for (VarId v : group) into[v] = 1;
      return;
    }
    if (group.size() < 2) return;
    auto [left, right] = group_split(group, derive_seed(options.seed, (phase_tag << 40) + splits++));
    self(self, left, accept, into, phase_tag);
    self(self, right, accept, into, phase_tag);
  };

  if (!r.candidates.empty()) {
    search(search, r.candidates,
           [&](const std::vector<VarId>& g) { return test_sensitive(tester, r, g, options.alpha, trace); },
           in_c1, 1);
  }

  std::vector<VarId> c1, rest;
  for (VarId v : r.candidates) (in_c1[v] ? c1 : rest).push_back(v);
  // Phase two always conditions on A and the complete phase-one set.
  const std::vector<VarId> z = conditioning_with(r.admissible, c1);
  if (!rest.empty()) {
    search(search, rest,
           [&](const std::vector<VarId>& g) { return test_target(tester, r, g, z, options.alpha, trace); },
           in_c2, 2);
  }
  return finish(tester, r, in_c1, in_c2, std::move(trace));
}

SelectionResult run_selection(Algorithm algorithm, const CiTester& tester, const RoleAssignment& roles,
                              const SelectionOptions& options) {
  return algorithm == Algorithm::SeqSel ? seq_sel(tester, roles, options)
                                        : grp_sel(tester, roles, options);
}

// ---------------------------------------------------------------- test counts

std::vector<BenchRow> bench_counts(const BenchGrid& grid, Exec exec) {
  if (grid.n_grid.empty()) throw ArgumentError("bench: n grid is empty");
  if (grid.seeds.empty()) throw ArgumentError("bench: seed list is empty");
  if (!grid.k_fixed && grid.p_grid.empty()) throw ArgumentError("bench: p grid is empty");

  struct Instance {
    std::size_t n;
    double p;
    std::uint64_t seed;
  };
  std::vector<Instance> instances;
  for (std::size_t n : grid.n_grid) {
    if (grid.k_fixed) {
      for (auto s : grid.seeds)
        instances.push_back({n, static_cast<double>(*grid.k_fixed) / static_cast<double>(n), s});
    } else {
      for (double p : grid.p_grid)
        for (auto s : grid.seeds) instances.push_back({n, p, s});
    }
  }

  std::vector<BenchRow> rows(2 * instances.size());
  std::vector<std::exception_ptr> errors(instances.size());
  auto run_one = [&](std::size_t i) {
    try {
      const Instance& inst = instances[i];
      const Benchmark bench = grid.k_fixed ? gen_benchmark_k(inst.n, *grid.k_fixed, inst.seed)
                                           : gen_benchmark(inst.n, inst.p, inst.seed);
      const OracleTester oracle(bench.model.dag());
      const RoleAssignment roles = roles_from_dag(bench.model.dag());
      SelectionOptions opts;
      opts.seed = inst.seed;
      opts.exec = Exec::Serial;
      for (Algorithm algo : {Algorithm::SeqSel, Algorithm::GrpSel}) {
        const SelectionResult res = run_selection(algo, oracle, roles, opts);
        rows[2 * i + (algo == Algorithm::SeqSel ? 0 : 1)] =
            BenchRow{algo,          inst.n,           inst.p,           inst.seed,
                     res.test_count, res.phase1_tests, res.phase2_tests, res.c1.size(),
                     bench.biased.size()};
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const long long count = static_cast<long long>(instances.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) run_one(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < count; ++i) run_one(static_cast<std::size_t>(i));
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows) {
  using Key = std::tuple<std::size_t, double, int>;
  std::vector<Key> order;
  std::map<Key, std::vector<const BenchRow*>> groups;
  for (const auto& row : rows) {
    Key key{row.n, row.p, static_cast<int>(row.algorithm)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  std::vector<BenchSummary> out;
  for (const auto& key : order) {
    const auto& members = groups[key];
    const double m = static_cast<double>(members.size());
    double sum = 0.0, sum_p1 = 0.0;
    for (const auto* r : members) {
      sum += static_cast<double>(r->test_count);
      sum_p1 += static_cast<double>(r->phase1_tests);
    }
    const double mean = sum / m;
    double ss = 0.0;
    for (const auto* r : members) ss += std::pow(static_cast<double>(r->test_count) - mean, 2);
    const double sd = members.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    out.push_back({members.front()->algorithm, std::get<0>(key), std::get<1>(key), mean, sd,
                   sum_p1 / m, members.size()});
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "algorithm,n,p,seed,test_count\n";
  char buf[64];
  for (const auto& r : rows) {
    auto res = std::to_chars(buf, buf + sizeof buf, r.p);
    out << to_string(r.algorithm) << ',' << r.n << ',' << std::string_view(buf, res.ptr - buf) << ','
        << r.seed << ',' << r.test_count << '\n';
  }
}

}  // namespace fairsel

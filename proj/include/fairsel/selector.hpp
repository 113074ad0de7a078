#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairsel/ci_test.hpp"
#include "fairsel/exec.hpp"

namespace fairsel {

/// Variable roles for a selection run; mirrors the roles sidecar file.
struct RoleAssignment {
  std::vector<std::string> sensitive;
  std::vector<std::string> admissible;
  std::string target;
  std::vector<std::string> candidates;
};

/// Roles read off a graph (candidates in node order).
RoleAssignment roles_from_dag(const Dag& dag);

enum class Algorithm { SeqSel, GrpSel };
std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view text);

struct SelectionOptions {
  double alpha = 0.01;
  /// Phase one accepts a candidate if it is independent of S given any
  /// subset of A (full A is tried first). Exponential in |A|.
  bool subset_mode = false;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

enum class Phase { Sensitive = 1, Target = 2 };

struct TraceEntry {
  Phase phase;
  CiQuery query;
  CiResult result;
};

/// Outcome of a selection run. Sets are listed in candidate order.
struct SelectionResult {
  std::vector<std::string> c1;
  std::vector<std::string> c2;
  std::vector<std::string> selected;
  /// One per query issued; a set query counts once.
  std::size_t test_count = 0;
  std::size_t phase1_tests = 0;
  std::size_t phase2_tests = 0;
  std::vector<TraceEntry> trace;
};

/// Tests every candidate against S given A, then every remaining candidate
/// against Y given A and the first-phase set.
SelectionResult seq_sel(const CiTester& tester, const RoleAssignment& roles,
                        const SelectionOptions& options = {});

/// Same two phases, testing whole groups and splitting only dependent ones.
SelectionResult grp_sel(const CiTester& tester, const RoleAssignment& roles,
                        const SelectionOptions& options = {});

SelectionResult run_selection(Algorithm algorithm, const CiTester& tester,
                              const RoleAssignment& roles, const SelectionOptions& options = {});

// ---------------------------------------------------------------- test counts

struct BenchGrid {
  std::vector<std::size_t> n_grid;
  /// Used when k_fixed is unset.
  std::vector<double> p_grid;
  /// Exactly this many biased features per instance.
  std::optional<std::size_t> k_fixed;
  std::vector<std::uint64_t> seeds;
};

struct BenchRow {
  Algorithm algorithm;
  std::size_t n;
  double p;  // k / n when k is fixed
  std::uint64_t seed;
  std::size_t test_count;
  std::size_t phase1_tests;
  std::size_t phase2_tests;
  std::size_t c1_size;
  std::size_t biased;
};

/// Runs both selectors with the graph oracle over benchmark instances.
/// Rows are ordered by (n, p, seed, algorithm) regardless of `exec`.
std::vector<BenchRow> bench_counts(const BenchGrid& grid, Exec exec = Exec::Parallel);

struct BenchSummary {
  Algorithm algorithm;
  std::size_t n;
  double p;
  double mean_test_count;
  double sd_test_count;
  double mean_phase1_tests;
  std::size_t runs;
};

std::vector<BenchSummary> summarize(const std::vector<BenchRow>& rows);

/// CSV with header `algorithm,n,p,seed,test_count`.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace fairsel

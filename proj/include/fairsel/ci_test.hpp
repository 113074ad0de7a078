#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairsel/causal_graph.hpp"
#include "fairsel/dataset.hpp"
#include "fairsel/exec.hpp"

namespace fairsel {

/// Index into a tester's variable list.
using VarId = std::size_t;

/// Is x independent of y given z at level alpha? x and y may be sets.
struct CiQuery {
  std::vector<VarId> x;
  std::vector<VarId> y;
  std::vector<VarId> z;
  double alpha = 0.01;
};

struct CiResult {
  bool independent = false;
  /// Bonferroni-adjusted for set queries; independent <=> p_value > alpha.
  double p_value = 0.0;
  double statistic = 0.0;
  /// Number of pairwise statistics evaluated (|x| * |y| for data backends).
  std::size_t tests_consumed = 1;
};

enum class Backend { Oracle, FisherZ, GTest };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

/// A conditional-independence backend over a fixed list of variables.
///
/// `test` validates the query and then dispatches to the backend. All
/// backends are immutable after construction and safe to share.
class CiTester {
 public:
  virtual ~CiTester() = default;

  virtual Backend backend() const noexcept = 0;
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  VarId index(std::string_view name) const;
  std::vector<VarId> indices(const std::vector<std::string>& names) const;

  CiResult test(const CiQuery& query) const;

 protected:
  explicit CiTester(std::vector<std::string> variables);
  virtual CiResult run(const CiQuery& query) const = 0;

 private:
  std::vector<std::string> variables_;
  std::unordered_map<std::string, VarId> index_;
};

/// Decides independence by d-separation in a known graph.
class OracleTester final : public CiTester {
 public:
  explicit OracleTester(const Dag& dag);
  Backend backend() const noexcept override { return Backend::Oracle; }

 private:
  CiResult run(const CiQuery& query) const override;
  const Dag& dag_;
};

/// Partial correlation with the Fisher z-transform; set queries combine the
/// pairwise p-values with a Bonferroni min-p rule. Discrete columns are used
/// through their integer codes.
class FisherZTester final : public CiTester {
 public:
  explicit FisherZTester(const Dataset& data, Exec exec = Exec::Parallel);
  Backend backend() const noexcept override { return Backend::FisherZ; }

  /// Minimum rows: |z| + this.
  static constexpr std::size_t kMinRowsOverZ = 10;

 private:
  CiResult run(const CiQuery& query) const override;
  struct Cache;
  const Dataset& data_;
  Exec exec_;
  std::shared_ptr<Cache> cache_;
};

/// Likelihood-ratio G test stratified over the joint values of z. All
/// columns must be discrete.
class GTester final : public CiTester {
 public:
  explicit GTester(const Dataset& data);
  Backend backend() const noexcept override { return Backend::GTest; }

  /// Minimum average expected count per cell of the full table.
  static constexpr double kMinExpectedPerCell = 5.0;

 private:
  CiResult run(const CiQuery& query) const override;
  const Dataset& data_;
};

/// Free-function form of CiTester::test.
inline CiResult ci_test(const CiTester& tester, const CiQuery& query) { return tester.test(query); }

/// Seeded shuffle, then split at ceil(|xs| / 2). Requires |xs| >= 2.
std::pair<std::vector<VarId>, std::vector<VarId>> group_split(const std::vector<VarId>& xs,
                                                              std::uint64_t seed);

/// Two-sided p-value of a Fisher z statistic.
double fisher_z_pvalue(double partial_corr, std::size_t rows, std::size_t conditioning_size);

/// Partial correlation of every (x, y) pair given z, via least-squares
/// residuals on [1, z]. Row-major |x| by |y|. Exposed for the kernel benchmark.
std::vector<double> partial_correlations(const Dataset& data, const std::vector<std::size_t>& x,
                                         const std::vector<std::size_t>& y,
                                         const std::vector<std::size_t>& z, Exec exec);

}  // namespace fairsel

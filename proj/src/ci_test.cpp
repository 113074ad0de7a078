#include "fairsel/ci_test.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <list>
#include <mutex>
#include <random>

#include "fairsel/errors.hpp"

namespace fairsel {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Oracle:
      return "oracle";
    case Backend::FisherZ:
      return "fisher_z";
    case Backend::GTest:
      return "g_test";
  }
  return "oracle";
}

Backend parse_backend(std::string_view text) {
  if (text == "oracle") return Backend::Oracle;
  if (text == "fisher_z") return Backend::FisherZ;
  if (text == "g_test") return Backend::GTest;
  throw ArgumentError("unknown backend '" + std::string(text) +
                      "' (expected oracle, fisher_z or g_test)");
}

CiTester::CiTester(std::vector<std::string> variables) : variables_(std::move(variables)) {
  for (VarId i = 0; i < variables_.size(); ++i) index_.emplace(variables_[i], i);
}

VarId CiTester::index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw LookupError("unknown variable '" + std::string(name) + "'");
  return it->second;
}

std::vector<VarId> CiTester::indices(const std::vector<std::string>& names) const {
  std::vector<VarId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index(n));
  return out;
}

CiResult CiTester::test(const CiQuery& q) const {
  if (q.x.empty() || q.y.empty()) throw ContractError("CI query needs nonempty x and y");
  if (!(q.alpha > 0.0 && q.alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
  std::vector<char> seen(variables_.size(), 0);
  for (const auto* part : {&q.x, &q.y, &q.z}) {
    for (VarId v : *part) {
      if (v >= variables_.size()) throw LookupError("variable id out of range");
      if (seen[v]) throw ContractError("CI query sets overlap at '" + variables_[v] + "'");
      seen[v] = 1;
    }
  }
  return run(q);
}

// ---------------------------------------------------------------- oracle

OracleTester::OracleTester(const Dag& dag)
    : CiTester([&] {
        std::vector<std::string> names;
        for (const auto& n : dag.nodes()) names.push_back(n.name);
        return names;
      }()),
      dag_(dag) {}

CiResult OracleTester::run(const CiQuery& q) const {
  const bool sep = d_separated(dag_, make_set(q.x), make_set(q.y), make_set(q.z));
  return CiResult{sep, sep ? 1.0 : 0.0, sep ? 0.0 : 1.0, 1};
}

// ---------------------------------------------------------------- fisher z

double fisher_z_pvalue(double partial_corr, std::size_t rows, std::size_t conditioning_size) {
  if (rows < conditioning_size + 4)
    throw InsufficientDataError("too few rows for the Fisher z transform");
  const double dof = static_cast<double>(rows - conditioning_size - 3);
  const double r = std::clamp(partial_corr, -1.0 + 1e-15, 1.0 - 1e-15);
  const double z = std::atanh(r) * std::sqrt(dof);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

namespace {

/// Least-squares projection onto [1, z] for one conditioning set.
struct Projection {
  Eigen::MatrixXd design;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

std::shared_ptr<const Projection> make_projection(const Dataset& data, const std::vector<std::size_t>& z) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  auto p = std::make_shared<Projection>();
  p->design.resize(n, static_cast<Eigen::Index>(z.size() + 1));
  p->design.col(0).setOnes();
  for (std::size_t k = 0; k < z.size(); ++k)
    p->design.col(static_cast<Eigen::Index>(k + 1)) =
        Eigen::Map<const Eigen::VectorXd>(data.column(z[k]).values.data(), n);
  p->qr.compute(p->design);
  return p;
}

std::vector<double> partial_correlations(const Dataset& data, const Projection& proj,
                                         const std::vector<std::size_t>& x, const std::vector<std::size_t>& y,
                                         Exec exec) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  std::vector<std::size_t> targets = x;
  targets.insert(targets.end(), y.begin(), y.end());
  const long long m = static_cast<long long>(targets.size());
  std::vector<Eigen::VectorXd> residuals(targets.size());
  std::vector<double> norms(targets.size());

  auto residualize = [&](long long j) {
    const Eigen::Map<const Eigen::VectorXd> v(data.column(targets[j]).values.data(), n);
    Eigen::VectorXd r = v - proj.design * proj.qr.solve(v);
    norms[j] = r.norm();
    residuals[j] = std::move(r);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < m; ++j) residualize(j);
  } else {
    for (long long j = 0; j < m; ++j) residualize(j);
  }

  for (long long j = 0; j < m; ++j) {
    const auto& col = data.column(targets[j]).values;
    const Eigen::Map<const Eigen::VectorXd> v(col.data(), n);
    const double spread = (v.array() - v.mean()).matrix().norm();
    if (!(norms[j] > 1e-8 * spread) || spread == 0.0)
      throw DegeneracyError("column '" + data.column(targets[j]).name +
                            "' is constant given the conditioning set");
  }

  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  std::vector<double> out(nx * ny);
  const long long pairs = static_cast<long long>(nx * ny);
  auto correlate = [&](long long p) {
    const std::size_t i = static_cast<std::size_t>(p) / ny;
    const std::size_t j = nx + static_cast<std::size_t>(p) % ny;
    out[p] = residuals[i].dot(residuals[j]) / (norms[i] * norms[j]);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < pairs; ++p) correlate(p);
  } else {
    for (long long p = 0; p < pairs; ++p) correlate(p);
  }
  return out;
}

}  // namespace

std::vector<double> partial_correlations(const Dataset& data, const std::vector<std::size_t>& x,
                                         const std::vector<std::size_t>& y,
                                         const std::vector<std::size_t>& z, Exec exec) {
  return partial_correlations(data, *make_projection(data, z), x, y, exec);
}

// Recently used projections, keyed by conditioning set. Selection reuses the
// same z for a whole phase, so a handful of entries covers it.
struct FisherZTester::Cache {
  static constexpr std::size_t kEntries = 4;
  std::mutex mutex;
  std::list<std::pair<std::vector<std::size_t>, std::shared_ptr<const Projection>>> entries;

  std::shared_ptr<const Projection> get(const Dataset& data, const std::vector<std::size_t>& z) {
    {
      const std::lock_guard lock(mutex);
      for (auto it = entries.begin(); it != entries.end(); ++it)
        if (it->first == z) {
          entries.splice(entries.begin(), entries, it);
          return it->second;
        }
    }
    auto p = make_projection(data, z);
    const std::lock_guard lock(mutex);
    entries.emplace_front(z, p);
    if (entries.size() > kEntries) entries.pop_back();
    return p;
  }
};

FisherZTester::FisherZTester(const Dataset& data, Exec exec)
    : CiTester(data.names()), data_(data), exec_(exec), cache_(std::make_shared<Cache>()) {}

namespace {

CiResult bonferroni(const std::vector<double>& pvalues, const std::vector<double>& statistics,
                    double alpha) {
  const auto m = pvalues.size();
  const double p_min = *std::min_element(pvalues.begin(), pvalues.end());
  const double stat = *std::max_element(statistics.begin(), statistics.end());
  const double adjusted = std::min(1.0, p_min * static_cast<double>(m));
  return CiResult{adjusted > alpha, adjusted, stat, m};
}

}  // namespace

CiResult FisherZTester::run(const CiQuery& q) const {
  const std::size_t n = data_.rows();
  if (n < q.z.size() + kMinRowsOverZ)
    throw InsufficientDataError("fisher_z needs at least |z| + " + std::to_string(kMinRowsOverZ) +
                                " rows, have " + std::to_string(n));
  const auto r = partial_correlations(data_, *cache_->get(data_, q.z), q.x, q.y, exec_);
  std::vector<double> p(r.size());
  std::vector<double> stat(r.size());
  const double scale = std::sqrt(static_cast<double>(n - q.z.size() - 3));
  for (std::size_t i = 0; i < r.size(); ++i) {
    p[i] = fisher_z_pvalue(r[i], n, q.z.size());
    stat[i] = std::abs(std::atanh(std::clamp(r[i], -1.0 + 1e-15, 1.0 - 1e-15))) * scale;
  }
  return bonferroni(p, stat, q.alpha);
}

// ---------------------------------------------------------------- G test

GTester::GTester(const Dataset& data) : CiTester(data.names()), data_(data) {}

CiResult GTester::run(const CiQuery& q) const {
  const std::size_t n = data_.rows();
  auto card = [&](VarId v) {
    const Column& c = data_.column(v);
    if (!c.discrete()) throw ContractError("g_test requires discrete column '" + c.name + "'");
    return static_cast<std::size_t>(c.cardinality);
  };

  std::size_t strata = 1;
  double cells = 1.0;
  for (VarId v : q.z) {
    strata *= card(v);
    cells *= static_cast<double>(card(v));
  }
  std::size_t max_x = 0, max_y = 0;
  for (VarId v : q.x) max_x = std::max(max_x, card(v));
  for (VarId v : q.y) max_y = std::max(max_y, card(v));
  cells *= static_cast<double>(max_x * max_y);
  if (static_cast<double>(n) < kMinExpectedPerCell * cells)
    throw InsufficientDataError("g_test needs at least " + std::to_string(kMinExpectedPerCell) +
                                " rows per table cell");

  for (const auto* part : {&q.x, &q.y}) {
    for (VarId v : *part) {
      const auto& vals = data_.column(v).values;
      if (std::all_of(vals.begin(), vals.end(), [&](double a) { return a == vals.front(); }))
        throw DegeneracyError("column '" + data_.column(v).name + "' is constant");
    }
  }

  std::vector<std::size_t> stratum(n, 0);
  for (VarId v : q.z) {
    const auto k = card(v);
    const auto& vals = data_.column(v).values;
    for (std::size_t r = 0; r < n; ++r) stratum[r] = stratum[r] * k + static_cast<std::size_t>(vals[r]);
  }

  std::vector<double> pvalues;
  std::vector<double> stats;
  for (VarId xv : q.x) {
    for (VarId yv : q.y) {
      const std::size_t rx = card(xv);
      const std::size_t cy = card(yv);
      const auto& xs = data_.column(xv).values;
      const auto& ys = data_.column(yv).values;
      std::vector<double> counts(strata * rx * cy, 0.0);
      for (std::size_t r = 0; r < n; ++r)
        counts[(stratum[r] * rx + static_cast<std::size_t>(xs[r])) * cy +
               static_cast<std::size_t>(ys[r])] += 1.0;

      double g = 0.0;
      double dof = 0.0;
      std::vector<double> row(rx), col(cy);
      for (std::size_t s = 0; s < strata; ++s) {
        const double* t = &counts[s * rx * cy];
        std::fill(row.begin(), row.end(), 0.0);
        std::fill(col.begin(), col.end(), 0.0);
        double total = 0.0;
        for (std::size_t a = 0; a < rx; ++a)
          for (std::size_t b = 0; b < cy; ++b) {
            row[a] += t[a * cy + b];
            col[b] += t[a * cy + b];
            total += t[a * cy + b];
          }
        if (total == 0.0) continue;
        for (std::size_t a = 0; a < rx; ++a)
          for (std::size_t b = 0; b < cy; ++b) {
            const double o = t[a * cy + b];
            if (o > 0.0) g += 2.0 * o * std::log(o * total / (row[a] * col[b]));
          }
        const auto nz_rows = std::count_if(row.begin(), row.end(), [](double v) { return v > 0; });
        const auto nz_cols = std::count_if(col.begin(), col.end(), [](double v) { return v > 0; });
        dof += static_cast<double>(std::max<long>(nz_rows - 1, 0) * std::max<long>(nz_cols - 1, 0));
      }
      g = std::max(g, 0.0);
      double p = 1.0;
      if (dof > 0.0) {
        const boost::math::chi_squared dist(dof);
        p = boost::math::cdf(boost::math::complement(dist, g));
      }
      pvalues.push_back(p);
      stats.push_back(g);
    }
  }
  return bonferroni(pvalues, stats, q.alpha);
}

// ---------------------------------------------------------------- splitting

std::pair<std::vector<VarId>, std::vector<VarId>> group_split(const std::vector<VarId>& xs,
                                                              std::uint64_t seed) {
  if (xs.size() < 2) throw ContractError("group_split needs at least two items");
  std::vector<VarId> shuffled = xs;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto half = static_cast<std::ptrdiff_t>((shuffled.size() + 1) / 2);
  return {std::vector<VarId>(shuffled.begin(), shuffled.begin() + half),
          std::vector<VarId>(shuffled.begin() + half, shuffled.end())};
}

}  // namespace fairsel

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairsel/causal_graph.hpp"

namespace fairsel {

enum class ColumnKind { Continuous, Discrete };

struct Column {
  std::string name;
  std::optional<Role> role;
  ColumnKind kind = ColumnKind::Continuous;
  int cardinality = 0;  // discrete only
  std::vector<double> values;

  bool discrete() const noexcept { return kind == ColumnKind::Discrete; }
};

/// Rectangular column-major table. Discrete values are stored as exact
/// integers in [0, cardinality).
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Column> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }

  const Column& column(std::size_t i) const { return columns_.at(i); }
  const Column& column(std::string_view name) const { return columns_.at(index(name)); }
  std::size_t index(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::vector<std::string> names() const;

  /// Discrete column as integer codes.
  std::vector<int> codes(std::string_view name) const;

  /// New dataset containing the given rows, in the given order.
  Dataset take_rows(std::span<const std::size_t> rows) const;
  /// Copy with the role of each listed column replaced.
  Dataset with_roles(const std::unordered_map<std::string, Role>& roles) const;

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t rows_ = 0;
};

}  // namespace fairsel

#include "fairsel/dataset.hpp"

#include <cmath>

#include "fairsel/errors.hpp"

namespace fairsel {

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  rows_ = columns_.empty() ? 0 : columns_.front().values.size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (!index_.emplace(c.name, i).second)
      throw ContractError("duplicate column '" + c.name + "'");
    if (c.values.size() != rows_)
      throw ContractError("column '" + c.name + "' has " + std::to_string(c.values.size()) +
                          " rows, expected " + std::to_string(rows_));
    if (c.discrete() && c.cardinality < 2)
      throw ContractError("discrete column '" + c.name + "' needs cardinality >= 2");
    for (double v : c.values) {
      if (!std::isfinite(v)) throw ContractError("column '" + c.name + "' has a missing value");
      if (c.discrete() && (v != std::floor(v) || v < 0 || v >= c.cardinality))
        throw ContractError("column '" + c.name + "' has value " + std::to_string(v) +
                            " outside [0, " + std::to_string(c.cardinality) + ")");
    }
  }
}

std::size_t Dataset::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw LookupError("unknown column '" + std::string(name) + "'");
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<int> Dataset::codes(std::string_view name) const {
  const Column& c = column(name);
  if (!c.discrete()) throw ContractError("column '" + c.name + "' is not discrete");
  std::vector<int> out(c.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(c.values[i]);
  return out;
}

Dataset Dataset::take_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> out = columns_;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].values.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[j].values[i] = columns_[j].values.at(rows[i]);
  }
  return Dataset(std::move(out));
}

Dataset Dataset::with_roles(const std::unordered_map<std::string, Role>& roles) const {
  std::vector<Column> out = columns_;
  for (const auto& [name, role] : roles) out.at(index(name)).role = role;
  return Dataset(std::move(out));
}

}  // namespace fairsel

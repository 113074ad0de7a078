#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairsel/causal_graph.hpp"
#include "fairsel/classifier.hpp"
#include "fairsel/dataset.hpp"
#include "fairsel/metrics.hpp"
#include "fairsel/scm.hpp"
#include "fairsel/selector.hpp"

namespace fairsel::io {

using nlohmann::json;

// Graph and model specs. An SCM spec is a DAG spec whose nodes also carry a
// `mechanism` object.
json to_json(const Dag& dag);
Dag dag_from_json(const json& doc);
json to_json(const ScmSpec& spec);
ScmSpec scm_from_json(const json& doc);

struct ColumnSchema {
  std::optional<Role> role;
  ColumnKind kind = ColumnKind::Continuous;
  int cardinality = 0;
};
using ColumnSchemas = std::map<std::string, ColumnSchema>;

/// Roles sidecar: {"sensitive":[...], "admissible":[...], "target":"...",
/// "candidates":[...]} plus an optional "columns" map of column -> role/kind.
json roles_to_json(const RoleAssignment& roles, const ColumnSchemas& columns = {});
RoleAssignment roles_from_json(const json& doc);
ColumnSchemas schemas_from_json(const json& doc);
ColumnSchemas schemas_of(const Dataset& data);

void write_csv(std::ostream& out, const Dataset& data);
/// Columns absent from `schemas` are continuous with no role.
Dataset read_csv(std::istream& in, const ColumnSchemas& schemas = {});

json selection_to_json(const SelectionResult& result);
json summary_to_json(const SelectionResult& result);
/// One JSON object per line for each trace entry.
void write_trace_jsonl(std::ostream& out, const SelectionResult& result,
                       const std::vector<std::string>& variables);

json to_json(const LogRegModel& model);
LogRegModel model_from_json(const json& doc);
json to_json(const FairnessReport& report);

json read_json_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string dump(const json& doc);

}  // namespace fairsel::io

#include "fairsel/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fairsel/errors.hpp"

namespace fairsel::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ContractError(std::string(what) + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json nodes_and_edges(const Dag& dag) {
  json nodes = json::array();
  for (const auto& n : dag.nodes()) nodes.push_back({{"name", n.name}, {"role", to_string(n.role)}});
  json edges = json::array();
  for (const auto& [from, to] : dag.edges()) edges.push_back({{"from", from}, {"to", to}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json mechanism_to_json(const Mechanism& m) {
  if (const auto* lg = std::get_if<LinearGaussian>(&m))
    return {{"type", "linear_gaussian"}, {"weights", lg->weights}, {"noise_sd", lg->noise_sd},
            {"intercept", lg->intercept}};
  if (const auto* lb = std::get_if<LogisticBernoulli>(&m))
    return {{"type", "logistic"}, {"weights", lb->weights}, {"intercept", lb->intercept}};
  const auto& cpt = std::get<DiscreteCpt>(m);
  return {{"type", "discrete_cpt"}, {"cardinality", cpt.cardinality}, {"parents", cpt.parents},
          {"table", cpt.table}};
}

Mechanism mechanism_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear_gaussian") {
    LinearGaussian m;
    m.weights = j.value("weights", std::map<std::string, double>{});
    m.noise_sd = j.value("noise_sd", 1.0);
    m.intercept = j.value("intercept", 0.0);
    return m;
  }
  if (type == "logistic") {
    LogisticBernoulli m;
    m.weights = j.value("weights", std::map<std::string, double>{});
    m.intercept = j.value("intercept", 0.0);
    return m;
  }
  if (type == "discrete_cpt") {
    DiscreteCpt m;
    m.cardinality = j.at("cardinality").get<int>();
    m.parents = j.value("parents", std::vector<std::string>{});
    m.table = j.at("table").get<std::vector<std::vector<double>>>();
    return m;
  }
  throw ContractError("unknown mechanism type '" + type + "'");
}

std::string_view kind_name(ColumnKind k) { return k == ColumnKind::Discrete ? "discrete" : "continuous"; }

}  // namespace

json to_json(const Dag& dag) { return nodes_and_edges(dag); }

Dag dag_from_json(const json& doc) {
  return guarded("DAG spec", [&] {
    std::vector<Dag::Node> nodes;
    for (const auto& n : doc.at("nodes"))
      nodes.push_back({n.at("name").get<std::string>(), parse_role(n.at("role").get<std::string>())});
    std::vector<Dag::Edge> edges;
    for (const auto& e : doc.value("edges", json::array()))
      edges.emplace_back(e.at("from").get<std::string>(), e.at("to").get<std::string>());
    return Dag(std::move(nodes), edges);
  });
}

json to_json(const ScmSpec& spec) {
  json doc = nodes_and_edges(spec.dag());
  for (std::size_t i = 0; i < spec.dag().size(); ++i)
    doc["nodes"][i]["mechanism"] = mechanism_to_json(spec.mechanism(i));
  return doc;
}

ScmSpec scm_from_json(const json& doc) {
  Dag dag = dag_from_json(doc);
  return guarded("SCM spec", [&] {
    std::vector<Mechanism> mechs;
    for (const auto& n : doc.at("nodes")) {
      if (!n.contains("mechanism"))
        throw ContractError("node '" + n.at("name").get<std::string>() + "' has no mechanism");
      mechs.push_back(mechanism_from_json(n.at("mechanism")));
    }
    return ScmSpec(std::move(dag), std::move(mechs));
  });
}

json roles_to_json(const RoleAssignment& roles, const ColumnSchemas& columns) {
  json doc = {{"sensitive", roles.sensitive},
              {"admissible", roles.admissible},
              {"target", roles.target},
              {"candidates", roles.candidates}};
  if (!columns.empty()) {
    json cols = json::object();
    for (const auto& [name, s] : columns) {
      json c = {{"kind", kind_name(s.kind)}};
      if (s.role) c["role"] = to_string(*s.role);
      if (s.kind == ColumnKind::Discrete) c["cardinality"] = s.cardinality;
      cols[name] = std::move(c);
    }
    doc["columns"] = std::move(cols);
  }
  return doc;
}

RoleAssignment roles_from_json(const json& doc) {
  return guarded("roles file", [&] {
    if (!doc.contains("sensitive") || doc.at("sensitive").empty())
      throw ContractError("roles file is missing the 'sensitive' role");
    if (!doc.contains("target") || doc.at("target").get<std::string>().empty())
      throw ContractError("roles file is missing the 'target' role");
    RoleAssignment r;
    r.sensitive = doc.at("sensitive").get<std::vector<std::string>>();
    r.admissible = doc.value("admissible", std::vector<std::string>{});
    r.target = doc.at("target").get<std::string>();
    r.candidates = doc.value("candidates", std::vector<std::string>{});
    return r;
  });
}

ColumnSchemas schemas_from_json(const json& doc) {
  return guarded("roles file", [&] {
    ColumnSchemas out;
    auto set_role = [&](const std::string& name, Role role) { out[name].role = role; };
    for (const auto& n : doc.value("sensitive", std::vector<std::string>{})) set_role(n, Role::Sensitive);
    for (const auto& n : doc.value("admissible", std::vector<std::string>{})) set_role(n, Role::Admissible);
    for (const auto& n : doc.value("candidates", std::vector<std::string>{})) set_role(n, Role::Candidate);
    if (doc.contains("target")) set_role(doc.at("target").get<std::string>(), Role::Target);
    if (doc.contains("columns")) {
      for (const auto& [name, c] : doc.at("columns").items()) {
        ColumnSchema& s = out[name];
        const std::string kind = c.value("kind", "continuous");
        if (kind == "discrete") {
          s.kind = ColumnKind::Discrete;
          s.cardinality = c.at("cardinality").get<int>();
        } else if (kind != "continuous") {
          throw ContractError("column '" + name + "' has unknown kind '" + kind + "'");
        }
        if (c.contains("role")) s.role = parse_role(c.at("role").get<std::string>());
      }
    }
    return out;
  });
}

ColumnSchemas schemas_of(const Dataset& data) {
  ColumnSchemas out;
  for (const auto& c : data.columns()) out[c.name] = {c.role, c.kind, c.cardinality};
  return out;
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& cols = data.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].name;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) line += ',';
      line += format_double(cols[j].values[i]);
    }
    line += '\n';
    out << line;
  }
}

Dataset read_csv(std::istream& in, const ColumnSchemas& schemas) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
  };

  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV input is empty");
  std::vector<Column> cols;
  for (auto& name : split(strip(line))) {
    Column c;
    c.name = strip(name);
    if (auto it = schemas.find(c.name); it != schemas.end()) {
      c.role = it->second.role;
      c.kind = it->second.kind;
      c.cardinality = it->second.cardinality;
    }
    cols.push_back(std::move(c));
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size())
      throw IoError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                    " fields, expected " + std::to_string(cols.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string cell = strip(cells[j]);
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw IoError("CSV line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
      cols[j].values.push_back(v);
    }
  }
  return Dataset(std::move(cols));
}

json selection_to_json(const SelectionResult& r) {
  return {{"c1", r.c1}, {"c2", r.c2}, {"selected", r.selected}};
}

json summary_to_json(const SelectionResult& r) {
  return {{"test_count", r.test_count}, {"phase1_tests", r.phase1_tests}, {"phase2_tests", r.phase2_tests}};
}

void write_trace_jsonl(std::ostream& out, const SelectionResult& result,
                       const std::vector<std::string>& variables) {
  auto names = [&](const std::vector<VarId>& ids) {
    std::vector<std::string> n;
    for (VarId v : ids) n.push_back(variables.at(v));
    return n;
  };
  for (const auto& e : result.trace) {
    const json line = {{"phase", static_cast<int>(e.phase)},
                       {"x", names(e.query.x)},
                       {"y", names(e.query.y)},
                       {"z", names(e.query.z)},
                       {"alpha", e.query.alpha},
                       {"independent", e.result.independent},
                       {"p_value", e.result.p_value},
                       {"statistic", e.result.statistic},
                       {"tests_consumed", e.result.tests_consumed}};
    out << line.dump() << '\n';
  }
}

json to_json(const LogRegModel& m) {
  return {{"features", m.features},
          {"weights", m.weights},
          {"bias", m.bias},
          {"means", m.means},
          {"scales", m.scales},
          {"config",
           {{"learning_rate", m.config.learning_rate},
            {"iterations", m.config.iterations},
            {"l2", m.config.l2},
            {"seed", m.config.seed},
            {"standardize", m.config.standardize}}},
          {"final_loss", m.final_loss},
          {"final_gradient_norm", m.final_gradient_norm}};
}

LogRegModel model_from_json(const json& doc) {
  return guarded("model file", [&] {
    LogRegModel m;
    m.features = doc.at("features").get<std::vector<std::string>>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.bias = doc.at("bias").get<double>();
    m.means = doc.at("means").get<std::vector<double>>();
    m.scales = doc.at("scales").get<std::vector<double>>();
    const auto& c = doc.at("config");
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.iterations = c.at("iterations").get<std::size_t>();
    m.config.l2 = c.at("l2").get<double>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.standardize = c.at("standardize").get<bool>();
    m.final_loss = doc.value("final_loss", 0.0);
    m.final_gradient_norm = doc.value("final_gradient_norm", 0.0);
    if (m.weights.size() != m.features.size() || m.means.size() != m.features.size() ||
        m.scales.size() != m.features.size())
      throw ContractError("model file: parameter counts do not match feature count");
    return m;
  });
}

json to_json(const FairnessReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"accuracy", r.accuracy},
          {"abs_odds_difference", opt(r.abs_odds_difference)},
          {"cmi_nats", r.cmi_nats},
          {"interventional_gap", opt(r.interventional_gap)},
          {"interventional_gap_probability", opt(r.interventional_gap_probability)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace fairsel::io

#include "fairsel/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "fairsel/errors.hpp"
#include "fairsel/io.hpp"

namespace fairsel::cli {

namespace {

using io::json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

json names_json(const Dag& dag, const NodeSet& ids) { return dag.names(ids); }

Dataset load_csv(const fs::path& path, const io::ColumnSchemas& schemas) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path.string() + "'");
  return io::read_csv(in, schemas);
}

void check_roles_cover(const RoleAssignment& roles, const std::vector<std::string>& names) {
  std::vector<std::string> all = roles.sensitive;
  all.insert(all.end(), roles.admissible.begin(), roles.admissible.end());
  all.insert(all.end(), roles.candidates.begin(), roles.candidates.end());
  all.push_back(roles.target);
  for (const auto& n : all)
    if (std::find(names.begin(), names.end(), n) == names.end())
      throw LookupError("role variable '" + n + "' is not in the input");
}

}  // namespace

// ---------------------------------------------------------------- gen

void cmd_gen(const GenConfig& config) {
  if (config.rows == 0) throw ArgumentError("--rows must be at least 1");
  if (config.n_features == 0) throw ArgumentError("--n-features must be at least 1");
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw ArgumentError("--p must lie in [0, 1]");
  ensure_dir(config.out);

  const Benchmark bench = config.k ? gen_benchmark_k(config.n_features, *config.k, config.seed)
                                   : gen_benchmark(config.n_features, config.p, config.seed);
  const Dag& dag = bench.model.dag();
  const Dataset data = sample(bench.model, config.rows, derive_seed(config.seed, 0xda7a));

  json spec = io::to_json(bench.model);
  spec["ground_truth"] = {{"biased", bench.biased},
                          {"clean", bench.clean},
                          {"clean_in_target", bench.clean_in_target}};
  io::write_file(config.out / "scm.json", io::dump(spec));

  std::ostringstream csv;
  io::write_csv(csv, data);
  io::write_file(config.out / "data.csv", csv.str());

  io::write_file(config.out / "roles.json",
                 io::dump(io::roles_to_json(roles_from_dag(dag), io::schemas_of(data))));

  const NodeSet c1 = oracle_c1(dag);
  const NodeSet c2 = oracle_c2(dag, c1);
  NodeSet c12 = c1;
  c12.insert(c12.end(), c2.begin(), c2.end());
  c12 = make_set(std::move(c12));
  const json truth = {{"c1", names_json(dag, c1)},
                      {"c2", names_json(dag, c2)},
                      {"selected", names_json(dag, c12)},
                      {"fair_set", names_json(dag, oracle_theorem(dag))}};
  io::write_file(config.out / "ground_truth.json", io::dump(truth));
}

// ---------------------------------------------------------------- select

SelectionResult cmd_select(const SelectConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ArgumentError("--alpha must lie in (0, 1)");
  std::optional<RoleAssignment> roles;
  io::ColumnSchemas schemas;
  if (config.roles) {
    const json doc = io::read_json_file(*config.roles);
    roles = io::roles_from_json(doc);
    schemas = io::schemas_from_json(doc);
  }

  SelectionOptions options;
  options.alpha = config.alpha;
  options.subset_mode = config.subset_mode;
  options.seed = config.seed;

  std::optional<Dag> dag;
  std::optional<Dataset> data;
  std::unique_ptr<CiTester> tester;
  if (config.backend == Backend::Oracle) {
    if (!config.spec) throw ArgumentError("the oracle backend needs --spec");
    dag = io::dag_from_json(io::read_json_file(*config.spec));
    if (!roles) roles = roles_from_dag(*dag);
    tester = std::make_unique<OracleTester>(*dag);
  } else {
    if (!config.data) throw ArgumentError("data backends need --data");
    if (!roles) throw ArgumentError("data backends need --roles");
    data = load_csv(*config.data, schemas);
    if (config.backend == Backend::FisherZ)
      tester = std::make_unique<FisherZTester>(*data);
    else
      tester = std::make_unique<GTester>(*data);
  }
  check_roles_cover(*roles, tester->variables());

  SelectionResult result = run_selection(config.algorithm, *tester, *roles, options);

  ensure_dir(config.out);
  io::write_file(config.out / "selected.json", io::dump(io::selection_to_json(result)));
  std::ostringstream trace;
  io::write_trace_jsonl(trace, result, tester->variables());
  io::write_file(config.out / "trace.jsonl", trace.str());
  json summary = io::summary_to_json(result);
  summary["algorithm"] = std::string(to_string(config.algorithm));
  summary["backend"] = std::string(to_string(config.backend));
  summary["alpha"] = config.alpha;
  summary["subset_mode"] = config.subset_mode;
  summary["seed"] = config.seed;
  io::write_file(config.out / "summary.json", io::dump(summary));
  return result;
}

// ---------------------------------------------------------------- eval

std::vector<ModelEvaluation> cmd_eval(const EvalConfigFiles& config) {
  const json roles_doc = io::read_json_file(config.roles);
  const RoleAssignment roles = io::roles_from_json(roles_doc);
  const Dataset data = load_csv(config.data, io::schemas_from_json(roles_doc));
  check_roles_cover(roles, data.names());
  if (!data.column(roles.target).discrete() || data.column(roles.target).cardinality != 2)
    throw ContractError("target '" + roles.target + "' must be a binary discrete column");

  const json sel = io::read_json_file(config.selected);
  if (!sel.contains("selected")) throw ContractError("selected file has no 'selected' list");
  const auto selected = sel.at("selected").get<std::vector<std::string>>();

  std::optional<ScmSpec> spec;
  if (config.spec) spec = io::scm_from_json(io::read_json_file(*config.spec));

  EvalConfig ec;
  ec.seed = config.seed;
  ec.n_mc = config.n_mc;
  auto models = evaluate_models(data, roles, selected, spec ? &*spec : nullptr, ec);

  ensure_dir(config.out);
  json doc = json::object();
  for (const auto& m : models)
    doc[m.name] = {{"features", m.features}, {"report", io::to_json(m.report)},
                   {"model", io::to_json(m.model)}};
  io::write_file(config.out / "report.json", io::dump(doc));
  return models;
}

// ---------------------------------------------------------------- bench

std::vector<BenchRow> cmd_bench(const BenchConfig& config) {
  BenchGrid grid;
  grid.n_grid = config.n_grid;
  grid.p_grid = config.k ? std::vector<double>{} : config.p_grid;
  grid.k_fixed = config.k;
  grid.seeds.resize(config.seeds);
  std::iota(grid.seeds.begin(), grid.seeds.end(), config.seed);
  auto rows = bench_counts(grid);
  ensure_dir(config.out);
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  io::write_file(config.out / "bench.csv", csv.str());
  return rows;
}

// ---------------------------------------------------------------- dsep

std::string cmd_dsep(const DsepConfig& config) {
  const Dag dag = io::dag_from_json(io::read_json_file(config.spec));
  const NodeSet x = dag.ids(config.x), y = dag.ids(config.y), z = dag.ids(config.z);
  if (x.empty() || y.empty()) throw ArgumentError("--x and --y must name at least one variable");
  const auto path = find_active_path(dag, x, y, z);
  if (!path) return "d-separated\n";
  return "d-connected\npath: " + format_path(dag, *path) + "\n";
}

// ---------------------------------------------------------------- driver

namespace {

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causally fair feature selection"};
  app.name("fairsel");
  app.require_subcommand(1);

  GenConfig gen;
  std::string gen_out = ".";
  std::size_t gen_k = 0;
  auto* g = app.add_subcommand("gen", "Generate a synthetic benchmark");
  g->add_option("--n-features", gen.n_features, "Number of candidate features")->required();
  g->add_option("--p", gen.p, "Probability that a feature is biased");
  auto* gk = g->add_option("--k", gen_k, "Exact number of biased features (overrides --p)");
  g->add_option("--rows", gen.rows, "Rows to sample")->required();
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen_out, "Output directory");

  SelectConfig sel;
  std::string sel_spec, sel_data, sel_roles, sel_out = ".", sel_backend = "oracle", sel_algo = "seqsel";
  auto* s = app.add_subcommand("select", "Select fair features");
  auto* s_spec = s->add_option("--spec", sel_spec, "DAG or SCM spec (oracle backend)");
  auto* s_data = s->add_option("--data", sel_data, "Data CSV");
  auto* s_roles = s->add_option("--roles", sel_roles, "Roles sidecar JSON");
  s->add_option("--backend", sel_backend)->check(CLI::IsMember({"oracle", "fisher_z", "g_test"}));
  s->add_option("--algo", sel_algo)->check(CLI::IsMember({"seqsel", "grpsel"}));
  s->add_option("--alpha", sel.alpha, "Significance level")->check(CLI::Range(0.001, 0.1));
  s->add_flag("--subset-mode", sel.subset_mode, "Accept independence given any subset of A");
  s->add_option("--seed", sel.seed);
  s->add_option("--out", sel_out);

  EvalConfigFiles ev;
  std::string ev_data, ev_roles, ev_sel, ev_spec, ev_out = ".";
  auto* e = app.add_subcommand("eval", "Train and evaluate A-only, ALL and selected models");
  e->add_option("--data", ev_data)->required();
  e->add_option("--roles", ev_roles)->required();
  e->add_option("--selected", ev_sel, "selected.json from the select command")->required();
  auto* e_spec = e->add_option("--spec", ev_spec, "SCM spec for the interventional gap");
  e->add_option("--seed", ev.seed);
  e->add_option("--n-mc", ev.n_mc, "Monte-Carlo rows per intervention cell");
  e->add_option("--out", ev_out);

  BenchConfig bc;
  std::string bench_out = ".";
  std::size_t bench_k = 0;
  auto* b = app.add_subcommand("bench", "Count CI tests of both selectors over benchmark instances");
  b->add_option("--n-grid", bc.n_grid)->delimiter(',');
  b->add_option("--p-grid", bc.p_grid)->delimiter(',');
  auto* bk = b->add_option("--k", bench_k, "Fixed number of biased features");
  b->add_option("--seeds", bc.seeds, "Seeds per grid cell");
  b->add_option("--seed", bc.seed, "First seed");
  b->add_option("--out", bench_out);

  DsepConfig dc;
  std::string dsep_spec;
  auto* d = app.add_subcommand("dsep", "Query d-separation in a DAG spec");
  d->add_option("--spec", dsep_spec)->required();
  d->add_option("--x", dc.x)->delimiter(',')->required();
  d->add_option("--y", dc.y)->delimiter(',')->required();
  d->add_option("--z", dc.z)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& ex) {
    print_error(err, "argument", ex.what());
    return 2;
  }

  try {
    if (g->parsed()) {
      if (*gk) gen.k = gen_k;
      gen.out = gen_out;
      cmd_gen(gen);
    } else if (s->parsed()) {
      if (*s_spec) sel.spec = sel_spec;
      if (*s_data) sel.data = sel_data;
      if (*s_roles) sel.roles = sel_roles;
      sel.backend = parse_backend(sel_backend);
      sel.algorithm = parse_algorithm(sel_algo);
      sel.out = sel_out;
      cmd_select(sel);
    } else if (e->parsed()) {
      ev.data = ev_data;
      ev.roles = ev_roles;
      ev.selected = ev_sel;
      if (*e_spec) ev.spec = ev_spec;
      ev.out = ev_out;
      cmd_eval(ev);
    } else if (b->parsed()) {
      if (*bk) bc.k = bench_k;
      bc.out = bench_out;
      cmd_bench(bc);
    } else if (d->parsed()) {
      dc.spec = dsep_spec;
      out << cmd_dsep(dc);
    }
  } catch (const Error& ex) {
    print_error(err, ex.kind(), ex.what());
    return 1;
  } catch (const std::exception& ex) {
    print_error(err, "internal", ex.what());
    return 1;
  }
  return 0;
}

}  // namespace fairsel::cli

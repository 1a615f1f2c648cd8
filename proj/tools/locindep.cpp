// Command-line front end: validate, simulate, loglik, triplet, test, graph,
// experiment.
//
// Exit codes: 0 success, 1 domain violation (invalid spec, failed
// simulation or likelihood), 2 I/O or usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locindep/locindep.hpp"

namespace fs = std::filesystem;
using namespace locindep;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

std::vector<std::string> names_of(const ProcessSpec& spec) {
  std::vector<std::string> out;
  for (const auto& c : spec.components) out.push_back(c.name);
  return out;
}

std::size_t component_arg(const ProcessSpec& spec, std::size_t one_based, const char* what) {
  if (one_based == 0 || one_based > spec.size())
    throw UsageError(std::string(what) + " must be between 1 and " + std::to_string(spec.size()));
  return one_based - 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  io::write_file_atomic(out_path, text);
}

int cmd_validate(const std::string& spec_path) {
  const ProcessSpec spec = load_spec(spec_path);
  const auto rep = validate(spec);
  if (rep.ok()) {
    std::cout << "ok: " << spec.size() << " component(s)\n";
    return kOk;
  }
  for (const auto& v : rep.violations) std::cout << v.describe(spec) << '\n';
  return kDomain;
}

struct SimulateArgs {
  std::string spec;
  double dt = 0.01;
  long long paths = 100;
  std::uint64_t seed = 0;
  std::string out;
  bool triplet = false;
  bool loglik = false;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.paths < 1) throw UsageError("--paths must be at least 1");
  if (!(a.dt > 0.0)) throw UsageError("--dt must be positive");
  const ProcessSpec spec = load_spec(a.spec);
  require_valid(spec);
  const PathSet paths = simulate(spec, a.dt, static_cast<std::size_t>(a.paths), a.seed);
  const fs::path dir(a.out);
  io::write_path_dir(dir, paths);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (a.triplet) {
      std::ostringstream s;
      io::write_triplet_csv(s, paths, evaluate_triplet(spec, paths, k));
      io::write_file_atomic(dir / ("triplet_x" + std::to_string(k + 1) + ".csv"), s.str());
    }
    if (a.loglik) {
      std::ostringstream s;
      io::write_loglik_csv(s, paths, loglik(spec, paths, k));
      io::write_file_atomic(dir / ("loglik_x" + std::to_string(k + 1) + ".csv"), s.str());
    }
  }

  std::cout << "component,mean_at_tau,variance_at_tau\n";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    std::vector<double> xs(paths.n_paths());
    for (std::size_t p = 0; p < paths.n_paths(); ++p) xs[p] = paths.value(p, paths.steps(), k);
    const auto ms = stats::mean_se(xs);
    const double n = static_cast<double>(xs.size());
    const double var = xs.size() > 1 ? ms.se * ms.se * n : 0.0;
    std::cout << spec.components[k].name << ',' << format_double(ms.mean) << ','
              << format_double(var) << '\n';
  }
  return kOk;
}

int cmd_loglik(const std::string& spec_path, const std::string& data, std::size_t component,
               const std::string& out) {
  const ProcessSpec spec = load_spec(spec_path);
  require_valid(spec);
  const PathSet paths = io::read_path_dir(data);
  const std::size_t k = component_arg(spec, component, "--component");
  std::ostringstream s;
  io::write_loglik_csv(s, paths, loglik(spec, paths, k));
  emit(s.str(), out);
  return kOk;
}

int cmd_triplet(const std::string& spec_path, const std::string& data, std::size_t component,
                const std::string& out) {
  const ProcessSpec spec = load_spec(spec_path);
  require_valid(spec);
  const PathSet paths = io::read_path_dir(data);
  const std::size_t k = component_arg(spec, component, "--component");
  std::ostringstream s;
  io::write_triplet_csv(s, paths, evaluate_triplet(spec, paths, k));
  emit(s.str(), out);
  return kOk;
}

struct TestArgs {
  std::string spec;
  std::string data;
  std::string method = "lrt";
  std::string family;
  std::string correction = "none";
  std::size_t from = 0;
  std::size_t to = 0;
  double alpha = 0.05;
  std::size_t order = 1;
  std::size_t stride = 1;
  std::string out;
};

std::optional<ModelFamily> family_for(const TestArgs& a, const ProcessSpec& spec) {
  if (parse_method(a.method) != Method::Lrt) return std::nullopt;
  return a.family.empty() ? linear_family(spec) : load_family(a.family);
}

int cmd_test(const TestArgs& a) {
  const ProcessSpec spec = load_spec(a.spec);
  require_valid(spec);
  const PathSet paths = io::read_path_dir(a.data);
  if (paths.dimension() != spec.size()) throw UsageError("data and spec disagree on the dimension");
  const Method method = parse_method(a.method);
  const auto fam = family_for(a, spec);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (a.from || a.to) {
    const auto j = component_arg(spec, a.from, "--from");
    const auto k = component_arg(spec, a.to, "--to");
    if (j == k) throw UsageError("--from and --to must differ");
    pairs.emplace_back(j, k);
  } else {
    for (std::size_t k = 0; k < spec.size(); ++k)
      for (std::size_t j = 0; j < spec.size(); ++j)
        if (j != k) pairs.emplace_back(j, k);
  }
  const double level = per_test_alpha(a.alpha, parse_correction(a.correction), spec.size());
  const PathSet coarse = method == Method::Lrt ? PathSet{} : discretize(paths, a.stride);

  nlohmann::json doc = nlohmann::json::array();
  for (const auto& [j, k] : pairs) {
    TestReport rep;
    switch (method) {
      case Method::Lrt: rep = lrt_direct_influence(*fam, paths, j, k, level); break;
      case Method::Granger: rep = granger_test(coarse, j, k, a.order, level); break;
      case Method::Fscli: rep = fscli_test(coarse, j, k, level); break;
    }
    doc.push_back(to_json(rep));
  }
  emit(doc.dump(2) + "\n", a.out);
  return kOk;
}

int cmd_graph(const TestArgs& a, bool infer) {
  const ProcessSpec spec = load_spec(a.spec);
  require_valid(spec);
  InfluenceGraph g = syntactic_graph(spec);
  std::vector<std::string> errors;
  if (infer) {
    if (a.data.empty()) throw UsageError("--infer needs --data");
    const PathSet paths = io::read_path_dir(a.data);
    if (paths.dimension() != spec.size()) throw UsageError("data and spec disagree on the dimension");
    RecoveryOptions opts;
    opts.method = parse_method(a.method);
    opts.alpha = a.alpha;
    opts.correction = parse_correction(a.correction);
    opts.granger_order = a.order;
    opts.stride = a.stride;
    const auto fam = family_for(a, spec);
    auto rec = recover_graph(paths, opts, fam ? &*fam : nullptr);
    g = std::move(rec.graph);
    errors = std::move(rec.errors);
  }

  const auto names = names_of(spec);
  if (!a.out.empty()) {
    io::write_file_atomic(a.out + ".dot", to_dot(g, names));
    io::write_file_atomic(a.out + ".json", to_json(g).dump(2) + "\n");
  }
  std::cout << to_dot(g, names);
  std::cout << to_json(g).dump() << '\n';
  std::cout << "\nclass of row -> column:\n" << taxonomy_table(g, names);
  if (spec.size() > 1) {
    std::cout << "\npair taxonomy (j -> k, k -> j):\n";
    for (std::size_t j = 0; j < spec.size(); ++j)
      for (std::size_t k = j + 1; k < spec.size(); ++k) {
        const auto [fwd, back] = pair_taxonomy(g, j, k);
        std::cout << "  " << names[j] << ", " << names[k] << ": (" << to_string(fwd) << ", "
                  << to_string(back) << ")\n";
      }
  }
  for (const auto& e : errors) std::cerr << "undecided " << e << '\n';
  return kOk;
}

int cmd_experiment(const std::string& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const auto res = run_experiment(cfg);
  std::cout << "pair,method,rejection_rate,mean_stat\n";
  for (const auto& s : res.pairs)
    std::cout << s.from + 1 << "->" << s.to + 1 << ',' << to_string(cfg.method) << ','
              << format_double(s.rejection_rate()) << ',' << format_double(s.mean_statistic) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-independence toolkit for multivariate jump diffusions"};
  app.require_subcommand(1);

  std::string spec_path, data, out, config;
  std::size_t component = 0;

  auto* validate_cmd = app.add_subcommand("validate", "check a process spec");
  validate_cmd->add_option("spec", spec_path, "spec JSON")->required();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate paths to CSV");
  simulate_cmd->add_option("spec", sim.spec, "spec JSON")->required();
  simulate_cmd->add_option("--dt", sim.dt, "time step")->required();
  simulate_cmd->add_option("--paths", sim.paths, "number of paths")->required();
  simulate_cmd->add_option("--seed", sim.seed, "master seed")->required();
  simulate_cmd->add_option("--out", sim.out, "output directory")->required();
  simulate_cmd->add_flag("--triplet", sim.triplet, "also write triplet_x<k>.csv");
  simulate_cmd->add_flag("--loglik", sim.loglik, "also write loglik_x<k>.csv");

  auto* loglik_cmd = app.add_subcommand("loglik", "log-likelihood process of one component");
  loglik_cmd->add_option("spec", spec_path, "spec JSON")->required();
  loglik_cmd->add_option("--data", data, "directory written by simulate")->required();
  loglik_cmd->add_option("--component", component, "component number (1-based)")->required();
  loglik_cmd->add_option("--out", out, "output CSV (default stdout)");

  auto* triplet_cmd = app.add_subcommand("triplet", "characteristics of one component");
  triplet_cmd->add_option("spec", spec_path, "spec JSON")->required();
  triplet_cmd->add_option("--data", data, "directory written by simulate")->required();
  triplet_cmd->add_option("--component", component, "component number (1-based)")->required();
  triplet_cmd->add_option("--out", out, "output CSV (default stdout)");

  TestArgs ta;
  bool infer = false;
  auto add_test_options = [&](CLI::App* cmd) {
    cmd->add_option("--method", ta.method, "lrt, granger or fscli")
        ->check(CLI::IsMember({"lrt", "granger", "fscli"}));
    cmd->add_option("--alpha", ta.alpha, "test level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    cmd->add_option("--correction", ta.correction, "none or bonferroni")
        ->check(CLI::IsMember({"none", "bonferroni"}));
    cmd->add_option("--family", ta.family, "model family JSON for lrt (default: linear)");
    cmd->add_option("--order", ta.order, "Granger lag order")->check(CLI::PositiveNumber);
    cmd->add_option("--stride", ta.stride, "subsampling stride")->check(CLI::PositiveNumber);
  };

  auto* test_cmd = app.add_subcommand("test", "test direct influence from data");
  test_cmd->add_option("spec", ta.spec, "spec JSON")->required();
  test_cmd->add_option("--data", ta.data, "directory written by simulate")->required();
  test_cmd->add_option("--from", ta.from, "influencing component (1-based)");
  test_cmd->add_option("--to", ta.to, "influenced component (1-based)");
  test_cmd->add_option("--out", ta.out, "output JSON (default stdout)");
  add_test_options(test_cmd);

  auto* graph_cmd = app.add_subcommand("graph", "influence graph (syntactic or inferred)");
  graph_cmd->add_option("spec", ta.spec, "spec JSON")->required();
  graph_cmd->add_flag("--infer", infer, "estimate edges from --data");
  graph_cmd->add_option("--data", ta.data, "directory written by simulate");
  graph_cmd->add_option("--out", ta.out, "write <out>.dot and <out>.json");
  add_test_options(graph_cmd);

  auto* experiment_cmd = app.add_subcommand("experiment", "replicated simulate/test study");
  experiment_cmd->add_option("config", config, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(spec_path);
    if (simulate_cmd->parsed()) return cmd_simulate(sim);
    if (loglik_cmd->parsed()) return cmd_loglik(spec_path, data, component, out);
    if (triplet_cmd->parsed()) return cmd_triplet(spec_path, data, component, out);
    if (test_cmd->parsed()) return cmd_test(ta);
    if (graph_cmd->parsed()) return cmd_graph(ta, infer);
    if (experiment_cmd->parsed()) return cmd_experiment(config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SpecError& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << '\n';
    return what.rfind("invalid process spec", 0) == 0 ? kDomain : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

#pragma once

// Repeated simulate -> test cycles with derived seeds, summarized as
// rejection rates per ordered pair.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "locindep/error.hpp"
#include "locindep/format.hpp"
#include "locindep/inference.hpp"
#include "locindep/io.hpp"
#include "locindep/model.hpp"
#include "locindep/parallel.hpp"
#include "locindep/rng.hpp"
#include "locindep/simulate.hpp"

namespace locindep {

struct ExperimentConfig {
  ProcessSpec spec;
  std::optional<ModelFamily> family;  // defaults to linear_family(spec) for lrt
  double dt = 0.01;
  std::size_t n_paths = 100;
  std::uint64_t seed = 1;
  Method method = Method::Lrt;
  double alpha = 0.05;
  Correction correction = Correction::None;
  std::size_t replications = 1;
  std::size_t granger_order = 1;
  std::size_t stride = 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // empty: all ordered pairs
  std::filesystem::path output;                             // empty: no files
};

inline void check_config(const ExperimentConfig& c) {
  if (!(c.dt > 0.0)) throw SpecError("dt must be positive");
  if (c.n_paths < 1) throw SpecError("n_paths must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw SpecError("alpha must lie in (0, 1)");
  if (c.replications < 1) throw SpecError("replications must be at least 1");
  for (const auto& [j, k] : c.pairs)
    if (j == k || j >= c.spec.size() || k >= c.spec.size()) throw SpecError("invalid pair in config");
}

/// Reads a config document. Relative spec/family/output paths are resolved
/// against `base`.
inline ExperimentConfig config_from_json(const nlohmann::json& doc,
                                         const std::filesystem::path& base = {}) {
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
  };
  try {
    const auto& spec = doc.at("spec");
    c.spec = spec.is_object() ? spec_from_json(spec) : load_spec(resolve(spec.get<std::string>()));
    if (doc.contains("family")) {
      const auto& fam = doc.at("family");
      c.family = fam.is_object() ? family_from_json(fam) : load_family(resolve(fam.get<std::string>()));
    }
    c.dt = doc.at("dt").get<double>();
    c.n_paths = doc.at("n_paths").get<std::size_t>();
    c.seed = doc.value("seed", std::uint64_t{1});
    c.method = parse_method(doc.value("method", std::string("lrt")));
    c.alpha = doc.value("alpha", 0.05);
    c.correction = parse_correction(doc.value("correction", std::string("none")));
    c.replications = doc.value("replications", std::size_t{1});
    c.granger_order = doc.value("granger_order", std::size_t{1});
    c.stride = doc.value("stride", std::size_t{1});
    if (doc.contains("pairs"))
      for (const auto& p : doc.at("pairs")) {
        const auto j = p.at(0).get<std::size_t>();
        const auto k = p.at(1).get<std::size_t>();
        if (j == 0 || k == 0) throw SpecError("pairs use 1-based component numbers");
        c.pairs.emplace_back(j - 1, k - 1);
      }
    if (doc.contains("output")) c.output = resolve(doc.at("output").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed experiment config: ") + e.what());
  }
  check_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

struct PairSummary {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t decided = 0;
  std::size_t rejections = 0;
  std::size_t failures = 0;
  double mean_statistic = 0.0;
  std::vector<double> p_values;

  double rejection_rate() const {
    return decided ? static_cast<double>(rejections) / static_cast<double>(decided) : 0.0;
  }
};

struct ExperimentResult {
  std::vector<PairSummary> pairs;
  std::vector<std::vector<TestReport>> replications;
};

namespace detail {

inline std::vector<TestReport> run_replication(const ExperimentConfig& c, const ModelFamily* fam,
                                               std::size_t r, std::vector<std::string>& errors) {
  const PathSet paths = simulate(c.spec, c.dt, c.n_paths, replication_seed(c.seed, r));
  const std::size_t m = c.spec.size();
  const double level = per_test_alpha(c.alpha, c.correction, m);
  const PathSet coarse = c.method == Method::Lrt ? PathSet{} : discretize(paths, c.stride);

  std::vector<std::pair<std::size_t, std::size_t>> pairs = c.pairs;
  if (pairs.empty())
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < m; ++j)
        if (j != k) pairs.emplace_back(j, k);

  std::vector<std::optional<MleFit>> full(m);
  std::vector<TestReport> out;
  for (const auto& [j, k] : pairs) {
    try {
      switch (c.method) {
        case Method::Lrt:
          if (!full[k]) full[k] = fit_mle(*fam, paths, k);
          out.push_back(detail::lrt_from_full(*fam, paths, j, k, level, *full[k], {}));
          break;
        case Method::Granger:
          out.push_back(granger_test(coarse, j, k, c.granger_order, level));
          break;
        case Method::Fscli:
          out.push_back(fscli_test(coarse, j, k, level));
          break;
      }
    } catch (const Error& e) {
      errors.push_back("replication " + std::to_string(r) + ", pair (" + std::to_string(j + 1) +
                       ", " + std::to_string(k + 1) + "): " + e.what());
    }
  }
  return out;
}

}  // namespace detail

/// Runs every replication (in parallel when allowed) and aggregates the
/// per-pair rejection rates. With an output directory, writes
/// replication_NNNN.json per replication and summary.csv.
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  check_config(c);
  require_valid(c.spec);
  std::optional<ModelFamily> auto_family;
  const ModelFamily* fam = nullptr;
  if (c.method == Method::Lrt) {
    if (c.family) {
      fam = &*c.family;
    } else {
      auto_family = linear_family(c.spec);
      fam = &*auto_family;
    }
  }
  if (!c.output.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(c.output, ec);
    if (ec) throw SpecError("cannot create output directory " + c.output.string());
  }

  ExperimentResult res;
  res.replications.resize(c.replications);
  std::vector<std::vector<std::string>> errors(c.replications);
  parallel_for(c.replications, [&](std::size_t r) {
    res.replications[r] = detail::run_replication(c, fam, r, errors[r]);
    if (!c.output.empty()) {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& rep : res.replications[r]) doc.push_back(to_json(rep));
      char name[32];
      std::snprintf(name, sizeof(name), "replication_%04zu.json", r);
      io::write_file_atomic(c.output / name, doc.dump(2) + "\n");
    }
  });

  for (std::size_t r = 0; r < c.replications; ++r) {
    for (const auto& rep : res.replications[r]) {
      auto it = std::find_if(res.pairs.begin(), res.pairs.end(),
                             [&](const PairSummary& s) { return s.from == rep.from && s.to == rep.to; });
      if (it == res.pairs.end()) {
        res.pairs.push_back(PairSummary{rep.from, rep.to, 0, 0, 0, 0.0, {}});
        it = res.pairs.end() - 1;
      }
      ++it->decided;
      if (rep.reject) ++it->rejections;
      it->mean_statistic += rep.statistic;
      it->p_values.push_back(rep.p_value);
    }
  }
  for (auto& s : res.pairs) {
    if (s.decided) s.mean_statistic /= static_cast<double>(s.decided);
    s.failures = c.replications - s.decided;
  }

  if (!c.output.empty()) {
    std::ostringstream csv;
    csv << "pair,method,rejection_rate,mean_stat\n";
    for (const auto& s : res.pairs)
      csv << s.from + 1 << "->" << s.to + 1 << ',' << to_string(c.method) << ','
          << format_double(s.rejection_rate()) << ',' << format_double(s.mean_statistic) << '\n';
    io::write_file_atomic(c.output / "summary.csv", csv.str());
    std::ostringstream log;
    for (const auto& list : errors)
      for (const auto& e : list) log << e << '\n';
    if (!log.str().empty()) io::write_file_atomic(c.output / "errors.log", log.str());
  }
  return res;
}

}  // namespace locindep

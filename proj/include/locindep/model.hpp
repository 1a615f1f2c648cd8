#pragma once

// Declarative jump-diffusion specifications, structural validation of the
// orthogonal-martingale / deterministic-bracket assumptions, and the
// syntactic direct-dependency structure of each component.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "locindep/error.hpp"
#include "locindep/expr.hpp"

namespace locindep {

enum class Kind { Diffusion, Counting, JumpDiffusion };

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Diffusion: return "diffusion";
    case Kind::Counting: return "counting";
    case Kind::JumpDiffusion: return "jump-diffusion";
  }
  return "?";
}

inline Kind parse_kind(std::string_view s) {
  if (s == "diffusion") return Kind::Diffusion;
  if (s == "counting") return Kind::Counting;
  if (s == "jump-diffusion" || s == "jump_diffusion") return Kind::JumpDiffusion;
  throw SpecError("unknown component kind '" + std::string(s) + "'");
}

inline bool has_continuous_part(Kind k) { return k != Kind::Counting; }
inline bool has_jump_part(Kind k) { return k != Kind::Diffusion; }

/// One coordinate of the process. Which expressions are present depends on
/// `kind`; `validate` reports inconsistent combinations.
struct ComponentSpec {
  std::string name;
  Kind kind = Kind::Diffusion;
  std::optional<Expr> drift;
  std::optional<Expr> sigma;
  std::optional<Expr> jump_intensity;
  std::optional<Expr> jump_size;  // counting components jump by exactly 1
  double x0 = 0.0;
  std::string driver;  // label of the noise source; empty means private
};

struct ProcessSpec {
  std::vector<ComponentSpec> components;
  std::size_t params = 0;
  std::vector<double> theta;  // empty when parameters are left free
  double horizon = 1.0;
  double jump_bound = 100.0;

  std::size_t size() const { return components.size(); }
  bool has_bound_theta() const { return theta.size() == params; }
};

/// Jump size actually used for component `c`, i.e. 1 for counting.
inline Expr effective_jump_size(const ComponentSpec& c) {
  if (c.kind == Kind::Counting || !c.jump_size) return Expr::number(1.0);
  return *c.jump_size;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline std::optional<Expr> read_expr(const nlohmann::json& obj, const char* key,
                                     const ExprBounds& bounds, std::size_t component) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const auto& v = obj.at(key);
  try {
    if (v.is_number()) return Expr::number(v.get<double>());
    return parse(v.get<std::string>(), bounds);
  } catch (const ParseError& e) {
    throw SpecError("component " + std::to_string(component + 1) + " field '" + key +
                    "': " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("component " + std::to_string(component + 1) + " field '" + key +
                    "': " + e.what());
  }
}

}  // namespace detail

inline ProcessSpec spec_from_json(const nlohmann::json& doc) {
  ProcessSpec spec;
  try {
    const auto& comps = doc.at("components");
    if (!comps.is_array()) throw SpecError("'components' must be an array");
    const std::size_t m = doc.value("m", comps.size());
    if (m != comps.size())
      throw SpecError("'m' is " + std::to_string(m) + " but " + std::to_string(comps.size()) +
                      " components are declared");
    spec.params = doc.value("params", std::size_t{0});
    spec.horizon = doc.at("horizon").get<double>();
    spec.jump_bound = doc.value("jump_bound", spec.jump_bound);
    if (doc.contains("theta")) spec.theta = doc.at("theta").get<std::vector<double>>();
    const ExprBounds bounds{m, spec.params};
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto& c = comps[k];
      ComponentSpec cs;
      cs.name = c.value("name", "X" + std::to_string(k + 1));
      cs.kind = parse_kind(c.at("kind").get<std::string>());
      cs.drift = detail::read_expr(c, "drift", bounds, k);
      cs.sigma = detail::read_expr(c, "sigma", bounds, k);
      cs.jump_intensity = detail::read_expr(c, "jump_intensity", bounds, k);
      cs.jump_size = detail::read_expr(c, "jump_size", bounds, k);
      cs.x0 = c.value("x0", 0.0);
      cs.driver = c.value("driver", std::string{});
      spec.components.push_back(std::move(cs));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed spec: ") + e.what());
  }
  return spec;
}

inline ProcessSpec spec_from_string(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  return spec_from_json(doc);
}

inline ProcessSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return spec_from_string(ss.str());
}

inline nlohmann::json spec_to_json(const ProcessSpec& spec) {
  nlohmann::json doc;
  doc["m"] = spec.size();
  doc["horizon"] = spec.horizon;
  doc["params"] = spec.params;
  doc["jump_bound"] = spec.jump_bound;
  if (!spec.theta.empty()) doc["theta"] = spec.theta;
  doc["components"] = nlohmann::json::array();
  for (const auto& c : spec.components) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["kind"] = std::string(to_string(c.kind));
    if (c.drift) jc["drift"] = to_string(*c.drift);
    if (c.sigma) jc["sigma"] = to_string(*c.sigma);
    if (c.jump_intensity) jc["jump_intensity"] = to_string(*c.jump_intensity);
    if (c.jump_size) jc["jump_size"] = to_string(*c.jump_size);
    jc["x0"] = c.x0;
    if (!c.driver.empty()) jc["driver"] = c.driver;
    doc["components"].push_back(std::move(jc));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Validation

enum class Assumption { Structure, A1, A2Prime, Boundedness };

inline std::string_view to_string(Assumption a) {
  switch (a) {
    case Assumption::Structure: return "structure";
    case Assumption::A1: return "A1";
    case Assumption::A2Prime: return "A2'";
    case Assumption::Boundedness: return "boundedness";
  }
  return "?";
}

struct Violation {
  std::optional<std::size_t> component;
  Assumption assumption;
  std::string expression;
  std::string message;

  std::string describe(const ProcessSpec& spec) const {
    std::string out;
    if (component) {
      const auto& c = spec.components[*component];
      out += "component " + std::to_string(*component + 1) + " (" + c.name + "): ";
    }
    out += std::string(to_string(assumption)) + " violation: " + message;
    if (!expression.empty()) out += " ['" + expression + "']";
    return out;
  }
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::string list_components(const std::set<std::size_t>& s) {
  std::string out;
  for (auto k : s) {
    if (!out.empty()) out += ", ";
    out += "x" + std::to_string(k + 1);
  }
  return out;
}

// Samples a state-free expression on a uniform time grid over [0, horizon].
template <class Check>
void scan_time(const Expr& e, const ProcessSpec& spec, Check&& check) {
  constexpr int kSamples = 100;
  const std::vector<double> zeros(spec.size(), 0.0);
  for (int i = 0; i <= kSamples; ++i) {
    const double t = spec.horizon * i / kSamples;
    double v;
    try {
      v = eval(e, zeros, t, spec.theta);
    } catch (const DomainError&) {
      v = std::numeric_limits<double>::quiet_NaN();
    }
    if (!check(v, t)) return;
  }
}

}  // namespace detail

/// Structural checks. Violations are returned, never thrown.
inline ValidationReport validate(const ProcessSpec& spec) {
  ValidationReport rep;
  auto add = [&](std::optional<std::size_t> k, Assumption a, std::string expr, std::string msg) {
    rep.violations.push_back({k, a, std::move(expr), std::move(msg)});
  };

  const std::size_t m = spec.size();
  if (m == 0) add(std::nullopt, Assumption::Structure, "", "no components declared");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon))
    add(std::nullopt, Assumption::Structure, "", "horizon must be a positive finite number");
  if (!spec.theta.empty() && spec.theta.size() != spec.params)
    add(std::nullopt, Assumption::Structure, "",
        "theta has " + std::to_string(spec.theta.size()) + " values but params = " +
            std::to_string(spec.params));
  if (!(spec.jump_bound > 0.0))
    add(std::nullopt, Assumption::Structure, "", "jump_bound must be positive");

  for (std::size_t k = 0; k < m; ++k) {
    const auto& c = spec.components[k];
    auto require = [&](const std::optional<Expr>& e, const char* field, bool wanted) {
      if (wanted && !e)
        add(k, Assumption::Structure, "",
            std::string(to_string(c.kind)) + " component needs '" + field + "'");
      if (!wanted && e)
        add(k, Assumption::Structure, to_string(*e),
            std::string(to_string(c.kind)) + " component must not declare '" + field + "'");
    };
    const bool continuous = has_continuous_part(c.kind);
    require(c.drift, "drift", continuous);
    require(c.sigma, "sigma", continuous);
    require(c.jump_intensity, "jump_intensity", has_jump_part(c.kind));
    if (c.kind == Kind::Diffusion) require(c.jump_size, "jump_size", false);
    if (c.kind == Kind::JumpDiffusion) require(c.jump_size, "jump_size", true);
    if (c.kind == Kind::Counting) {
      if (c.jump_size && !(c.jump_size->op() == Op::Number && c.jump_size->value() == 1.0))
        add(k, Assumption::Structure, to_string(*c.jump_size),
            "counting components jump by exactly 1");
      if (c.x0 != 0.0) add(k, Assumption::Structure, "", "counting components start at 0");
    }
    if (!std::isfinite(c.x0)) add(k, Assumption::Structure, "", "x0 must be finite");

    for (const auto* e : {&c.drift, &c.sigma, &c.jump_intensity, &c.jump_size}) {
      if (!*e) continue;
      for (auto j : free_components(**e))
        if (j >= m)
          add(k, Assumption::Structure, to_string(**e),
              "references x" + std::to_string(j + 1) + " but m = " + std::to_string(m));
      for (auto p : free_params(**e))
        if (p >= spec.params)
          add(k, Assumption::Structure, to_string(**e),
              "references theta" + std::to_string(p + 1) + " but params = " +
                  std::to_string(spec.params));
    }

    if (c.sigma) {
      const auto reads = free_components(*c.sigma);
      if (!reads.empty()) {
        add(k, Assumption::A2Prime, to_string(*c.sigma),
            "sigma must be a deterministic function of t but reads " +
                detail::list_components(reads));
      } else if (spec.has_bound_theta()) {
        detail::scan_time(*c.sigma, spec, [&](double v, double t) {
          if (std::isfinite(v) && v >= 0.0) return true;
          add(k, Assumption::A2Prime, to_string(*c.sigma),
              "sigma is negative or undefined at t = " + format_double(t));
          return false;
        });
      }
    }

    if (c.kind == Kind::JumpDiffusion && c.jump_size && free_components(*c.jump_size).empty() &&
        spec.has_bound_theta()) {
      detail::scan_time(*c.jump_size, spec, [&](double v, double t) {
        if (std::isfinite(v) && std::fabs(v) <= spec.jump_bound) return true;
        add(k, Assumption::Boundedness, to_string(*c.jump_size),
            "|jump_size| exceeds jump_bound " + format_double(spec.jump_bound) + " at t = " +
                format_double(t));
        return false;
      });
    }
  }

  for (std::size_t a = 0; a < m; ++a) {
    const auto& da = spec.components[a].driver;
    if (da.empty()) continue;
    for (std::size_t b = a + 1; b < m; ++b) {
      if (spec.components[b].driver == da)
        add(b, Assumption::A1, "",
            "noise driver '" + da + "' is shared with component " + std::to_string(a + 1) +
                "; component martingales must be orthogonal");
    }
  }
  return rep;
}

/// Throws SpecError listing every violation when `spec` is not valid.
inline void require_valid(const ProcessSpec& spec) {
  const auto rep = validate(spec);
  if (rep.ok()) return;
  std::string msg = "invalid process spec:";
  for (const auto& v : rep.violations) msg += "\n  " + v.describe(spec);
  throw SpecError(msg);
}

// ---------------------------------------------------------------------------
// Dependency structure

/// Components read by the drift, intensity or jump size of `k`, plus `k`.
/// Sigma is never included since it is deterministic.
inline std::set<std::size_t> dependency_set(const ProcessSpec& spec, std::size_t k) {
  if (k >= spec.size()) throw SpecError("component index out of range");
  const auto& c = spec.components[k];
  std::set<std::size_t> d{k};
  for (const auto* e : {&c.drift, &c.jump_intensity, &c.jump_size})
    if (*e) d.merge(free_components(**e));
  return d;
}

/// True when component `k` is weakly conditionally locally independent of
/// component `j`, i.e. nothing that determines k's drift or jump compensator
/// reads x_j.
inline bool is_wcli(const ProcessSpec& spec, std::size_t j, std::size_t k) {
  if (j == k) throw SpecError("is_wcli needs two distinct components");
  if (j >= spec.size()) throw SpecError("component index out of range");
  return !dependency_set(spec, k).contains(j);
}

// ---------------------------------------------------------------------------
// Built-in instances of the three reference systems. The same documents ship
// as specs/ex1.json, specs/ex2.json and specs/ex3.json.

inline constexpr std::string_view kExample1Json = R"json({
  "m": 3,
  "horizon": 5,
  "params": 0,
  "components": [
    {"name": "X1", "kind": "diffusion", "drift": "-1.5*x1 + 0.5*x2 + 0.5*x3", "sigma": "1", "x0": 0},
    {"name": "X2", "kind": "diffusion", "drift": "0.5*x1 - 1.5*x2 + 0.5*x3", "sigma": "1", "x0": 0},
    {"name": "X3", "kind": "diffusion", "drift": "1.0*x2 - 1.5*x3", "sigma": "1", "x0": 0}
  ]
})json";

inline constexpr std::string_view kExample2Json = R"json({
  "m": 3,
  "horizon": 5,
  "params": 0,
  "components": [
    {"name": "X1", "kind": "diffusion", "drift": "-1.5*x1 + 0.5*x2 + 0.2*x3", "sigma": "1", "x0": 0},
    {"name": "X2", "kind": "diffusion", "drift": "0.5*x1 - 1.5*x2 + 0.2*x3", "sigma": "1", "x0": 0},
    {"name": "X3", "kind": "counting", "jump_intensity": "exp(0.5*x2 - 0.1*x3)", "x0": 0}
  ]
})json";

inline constexpr std::string_view kExample3Json = R"json({
  "m": 3,
  "horizon": 5,
  "params": 0,
  "jump_bound": 1,
  "components": [
    {"name": "X1", "kind": "jump-diffusion", "drift": "-1.5*x1 + 0.5*x2 + 0.5*x3",
     "sigma": "1", "jump_intensity": "exp(0.3*x3)", "jump_size": "0.5", "x0": 0},
    {"name": "X2", "kind": "jump-diffusion", "drift": "0.5*x1 - 1.5*x2",
     "sigma": "1 + 0.5*sin(t)", "jump_intensity": "exp(0.3*x2 - 0.3*x3)", "jump_size": "-0.5", "x0": 0},
    {"name": "X3", "kind": "jump-diffusion", "drift": "1.0*x2 - 1.5*x3",
     "sigma": "0.8", "jump_intensity": "exp(0.3*x2 - 0.3*x3)", "jump_size": "0.5", "x0": 0}
  ]
})json";

/// Reference systems 1-3 (1: three diffusions, 2: third component counting,
/// 3: three jump diffusions). All share the direct-influence edges
/// 2->1, 3->1, 1->2, 3->2, 2->3.
inline ProcessSpec builtin_example(int which) {
  switch (which) {
    case 1: return spec_from_string(kExample1Json);
    case 2: return spec_from_string(kExample2Json);
    case 3: return spec_from_string(kExample3Json);
    default: throw SpecError("no built-in example " + std::to_string(which));
  }
}

}  // namespace locindep
